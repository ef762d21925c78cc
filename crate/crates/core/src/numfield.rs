//! Number fields `ℚ(θ) = ℚ[x]/(m)`, one-step quadratic towers over them, and
//! an exact square test with witnesses and modular non-square certificates.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::funcfield::{Field, GPoly, RationalField};
use crate::qpoly::{self, ext_gcd, is_square_rational, rat, Rational, UniPoly, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("elements belong to different fields")]
    MixedFields,
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("modulus {0} is not monic of positive degree")]
    BadModulus(String),
    #[error("modulus {0} is reducible over Q")]
    Reducible(String),
    #[error("cannot adjoin the square root of zero")]
    ZeroRadicand,
}

#[derive(Debug)]
struct NfInner {
    modulus: UniPoly,
    disc: Rational,
}

/// `ℚ[x]/(m(x))` for a monic irreducible `m`. Cloning is cheap.
#[derive(Clone)]
pub struct NumberField(Arc<NfInner>);

impl NumberField {
    /// Builds the field after certifying `m` monic and irreducible.
    pub fn new(m: &UniPoly) -> Result<Self, FieldError> {
        if !m.is_monic() || m.is_constant() {
            return Err(FieldError::BadModulus(m.to_string()));
        }
        let f = qpoly::factor(m).map_err(|_| FieldError::BadModulus(m.to_string()))?;
        if f.factors.len() != 1 || f.factors[0].1 != 1 {
            return Err(FieldError::Reducible(m.to_string()));
        }
        Ok(Self::from_irreducible(m))
    }

    /// For moduli already known to be monic irreducible (factorization output).
    pub(crate) fn from_irreducible(m: &UniPoly) -> Self {
        debug_assert!(m.is_monic() && !m.is_constant());
        let modulus = m.with_var(Var::X);
        let disc = qpoly::discriminant(&modulus).expect("nonzero modulus");
        NumberField(Arc::new(NfInner { modulus, disc }))
    }

    pub fn modulus(&self) -> &UniPoly {
        &self.0.modulus
    }

    pub fn degree(&self) -> usize {
        self.0.modulus.deg0()
    }

    /// The class of `x`, i.e. θ.
    pub fn theta(&self) -> NFElement {
        self.reduce(&UniPoly::var(Var::X))
    }

    pub fn element(&self, r: &Rational) -> NFElement {
        self.reduce(&UniPoly::constant(Var::X, r.clone()))
    }

    /// `p(θ)`: reduction of `p` modulo the minimal polynomial.
    pub fn reduce(&self, p: &UniPoly) -> NFElement {
        let p = p.with_var(Var::X);
        let rep = p.rem(&self.0.modulus).expect("modulus nonzero");
        NFElement { field: self.clone(), rep }
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.modulus == other.0.modulus
    }
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[x]/({})", self.0.modulus)
    }
}

/// `reduce_mod(p, K)`: the element `p(θ)` of `K`.
pub fn reduce_mod(p: &UniPoly, k: &NumberField) -> NFElement {
    k.reduce(p)
}

/// An element of a [`NumberField`], stored as its canonical residue.
#[derive(Clone, PartialEq)]
pub struct NFElement {
    field: NumberField,
    rep: UniPoly,
}

impl NFElement {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    /// Canonical representative, degree below the field degree.
    pub fn rep(&self) -> &UniPoly {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    /// The element as a rational number, when it lies in ℚ.
    pub fn as_rational(&self) -> Option<Rational> {
        self.rep.is_constant().then(|| self.rep.coeff(0))
    }

    fn same_field(&self, o: &NFElement) -> Result<(), FieldError> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(FieldError::MixedFields)
        }
    }

    pub fn try_add(&self, o: &NFElement) -> Result<NFElement, FieldError> {
        self.same_field(o)?;
        Ok(NFElement { field: self.field.clone(), rep: &self.rep + &o.rep })
    }

    pub fn try_sub(&self, o: &NFElement) -> Result<NFElement, FieldError> {
        self.same_field(o)?;
        Ok(NFElement { field: self.field.clone(), rep: &self.rep - &o.rep })
    }

    pub fn try_mul(&self, o: &NFElement) -> Result<NFElement, FieldError> {
        self.same_field(o)?;
        Ok(self.field.reduce(&(&self.rep * &o.rep)))
    }

    pub fn neg(&self) -> NFElement {
        NFElement { field: self.field.clone(), rep: -&self.rep }
    }

    /// Inverse via extended Euclid against the modulus.
    pub fn inverse(&self) -> Result<NFElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::InverseOfZero);
        }
        let (g, s, _) = ext_gcd(&self.rep, self.field.modulus());
        debug_assert!(g.is_constant());
        Ok(self.field.reduce(&s))
    }

    fn eval_mod_p(&self, r: u64, p: u64) -> Option<u64> {
        eval_poly_mod(&self.rep, r, p)
    }
}

impl fmt::Debug for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

impl fmt::Display for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

impl Field for NumberField {
    type Elem = NFElement;

    fn zero(&self) -> NFElement {
        NFElement { field: self.clone(), rep: UniPoly::zero(Var::X) }
    }
    fn one(&self) -> NFElement {
        self.element(&Rational::one())
    }
    fn from_rational(&self, r: &Rational) -> NFElement {
        self.element(r)
    }
    fn add(&self, a: &NFElement, b: &NFElement) -> NFElement {
        a.try_add(b).expect("same number field")
    }
    fn neg(&self, a: &NFElement) -> NFElement {
        a.neg()
    }
    fn mul(&self, a: &NFElement, b: &NFElement) -> NFElement {
        a.try_mul(b).expect("same number field")
    }
    fn inv(&self, a: &NFElement) -> Option<NFElement> {
        a.inverse().ok()
    }
    fn is_zero(&self, a: &NFElement) -> bool {
        a.is_zero()
    }
}

/// Fields with an exact square-root routine.
pub trait SqrtField: Field {
    /// Some `β` with `β² = a`, or `None` when `a` is not a square.
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem>;
}

impl SqrtField for RationalField {
    fn sqrt(&self, a: &Rational) -> Option<Rational> {
        is_square_rational(a)
    }
}

impl SqrtField for NumberField {
    fn sqrt(&self, a: &NFElement) -> Option<NFElement> {
        is_square_nf(self, a)
    }
}

/// Evidence that `a` is not a square in `K`: a prime `p` not dividing the
/// discriminant or any denominator, a root `r` of `m` modulo `p` (so a
/// degree-one prime of `K` with `θ ↦ r`), and `a(r) mod p`, a nonzero
/// quadratic non-residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonSquareCertificate {
    pub prime: u64,
    pub root: u64,
    pub residue: u64,
}

impl NonSquareCertificate {
    /// Recomputes every claim of the certificate from scratch.
    pub fn verify(&self, a: &NFElement) -> bool {
        let p = self.prime;
        let k = a.field();
        if !prime_is_admissible(k, a, p) {
            return false;
        }
        if eval_poly_mod(k.modulus(), self.root, p) != Some(0) {
            return false;
        }
        match a.eval_mod_p(self.root, p) {
            Some(v) => v == self.residue && v != 0 && legendre(v, p) == p - 1,
            None => false,
        }
    }
}

/// Outcome of [`square_test`].
#[derive(Debug, Clone, PartialEq)]
pub enum SquareTest {
    Square(NFElement),
    NonSquare(Option<NonSquareCertificate>),
}

const PREFILTER_PRIMES: usize = 24;
const CERTIFICATE_PRIMES: usize = 400;

/// Square test in a number field: a cheap modular pre-filter, then an exact
/// decision by factoring `y² − a` over `K` (norm + gcd method).
pub fn square_test(a: &NFElement) -> SquareTest {
    if a.is_zero() {
        return SquareTest::Square(a.clone());
    }
    if let Some(cert) = modular_certificate(a, PREFILTER_PRIMES) {
        return SquareTest::NonSquare(Some(cert));
    }
    match exact_sqrt(a) {
        Some(b) => SquareTest::Square(b),
        None => SquareTest::NonSquare(modular_certificate(a, CERTIFICATE_PRIMES)),
    }
}

/// `is_square_nf(K, a)`: a witness `β ∈ K` with `β² = a`, if any.
pub fn is_square_nf(k: &NumberField, a: &NFElement) -> Option<NFElement> {
    debug_assert!(a.field() == k);
    match square_test(a) {
        SquareTest::Square(b) => Some(b),
        SquareTest::NonSquare(_) => None,
    }
}

fn rational_mod(r: &Rational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = r.denom().mod_floor(&pb);
    if d.is_zero() {
        return None;
    }
    let n = r.numer().mod_floor(&pb).to_u64()?;
    let d = d.to_u64()?;
    Some(n * pow_mod(d, p - 2, p) % p)
}

fn eval_poly_mod(f: &UniPoly, r: u64, p: u64) -> Option<u64> {
    let mut acc = 0u64;
    for c in f.coeffs().iter().rev() {
        acc = (acc * r + rational_mod(c, p)?) % p;
    }
    Some(acc)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn legendre(v: u64, p: u64) -> u64 {
    pow_mod(v, (p - 1) / 2, p)
}

fn prime_is_admissible(k: &NumberField, a: &NFElement, p: u64) -> bool {
    if p < 3 || !is_prime(p) {
        return false;
    }
    let pb = BigInt::from(p);
    let disc = &k.0.disc;
    if disc.numer().is_multiple_of(&pb) || disc.denom().is_multiple_of(&pb) {
        return false;
    }
    k.modulus()
        .coeffs()
        .iter()
        .chain(a.rep().coeffs())
        .all(|c| !c.denom().is_multiple_of(&pb))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Searches the first `max_primes` odd primes for a non-square certificate.
fn modular_certificate(a: &NFElement, max_primes: usize) -> Option<NonSquareCertificate> {
    let k = a.field();
    (3u64..)
        .step_by(2)
        .filter(|&p| is_prime(p))
        .take(max_primes)
        .filter(|&p| prime_is_admissible(k, a, p))
        .find_map(|p| {
            (0..p).find_map(|r| {
                if eval_poly_mod(k.modulus(), r, p) != Some(0) {
                    return None;
                }
                let v = a.eval_mod_p(r, p)?;
                (v != 0 && legendre(v, p) == p - 1)
                    .then_some(NonSquareCertificate { prime: p, root: r, residue: v })
            })
        })
}

/// Lagrange/Newton interpolation through `(xs[i], ys[i])`, result in `var`.
fn interpolate(var: Var, xs: &[Rational], ys: &[Rational]) -> UniPoly {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut acc = UniPoly::zero(var);
    for i in (0..n).rev() {
        let lin = UniPoly::new(var, vec![-xs[i].clone(), Rational::one()]);
        acc = &(&acc * &lin) + &UniPoly::constant(var, coef[i].clone());
    }
    acc
}

/// Exact square root by factoring `y² − a` over `K`.
///
/// With a shift `s` making `N(y) = Res_x(m(x), (y − s·x)² − a(x))`
/// square-free, every irreducible factor `Nᵢ` of `N` over ℚ gives a factor
/// `gcd((y − sθ)² − a, Nᵢ(y))` of the shifted polynomial over `K`. A linear
/// factor `y − γ` yields the root `β = γ − sθ`.
fn exact_sqrt(a: &NFElement) -> Option<NFElement> {
    let k = a.field().clone();
    let n = k.degree();
    if n == 1 {
        let r = a.as_rational().expect("degree one field is Q");
        return is_square_rational(&r).map(|s| k.element(&s));
    }
    let m = k.modulus();
    let ar = a.rep().clone();
    let theta = k.theta();
    for shift in (0i64..).flat_map(|i| if i == 0 { vec![0] } else { vec![i, -i] }).take(64) {
        let s = rat(shift);
        let xs: Vec<Rational> = (0..=(2 * n) as i64).map(rat).collect();
        let ys: Vec<Rational> = xs
            .iter()
            .map(|y| {
                // (y − s x)² − a(x)
                let lin = UniPoly::new(Var::X, vec![y.clone(), -s.clone()]);
                let g = &(&lin * &lin) - &ar;
                if g.is_zero() {
                    Rational::zero()
                } else {
                    qpoly::resultant(m, &g).expect("nonzero inputs")
                }
            })
            .collect();
        let norm = interpolate(Var::T, &xs, &ys);
        if !qpoly::gcd(&norm, &norm.derivative()).is_constant() {
            continue;
        }
        let st = k.mul(&k.element(&s), &theta);
        // f_s(y) = y² − 2sθ·y + (s²θ² − a)
        let fs = GPoly::new(
            k.clone(),
            vec![k.sub(&k.square(&st), a), k.neg(&k.add(&st, &st)), k.one()],
        );
        let factored = qpoly::factor(&norm).expect("norm nonzero");
        for (ni, _) in factored.factors {
            if !n.is_multiple_of(ni.deg0()) {
                continue;
            }
            let h = fs.gcd(&GPoly::from_qpoly(k.clone(), &ni));
            if h.degree() == Some(1) {
                let gamma = k.neg(&h.coeff(0));
                let beta = k.sub(&gamma, &st);
                debug_assert_eq!(k.square(&beta), *a);
                return Some(beta);
            }
        }
        return None;
    }
    unreachable!("no square-free shift found for nonzero radicand")
}

/// `K(√α)` for `α` a certified non-square of the base field. Elements are
/// pairs `(u, v)` meaning `u + v·√α`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadTower<F: Field> {
    base: F,
    alpha: F::Elem,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TowerElem<E> {
    pub u: E,
    pub v: E,
}

impl<F: Field> QuadTower<F> {
    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn alpha(&self) -> &F::Elem {
        &self.alpha
    }

    pub fn embed(&self, a: &F::Elem) -> TowerElem<F::Elem> {
        TowerElem { u: a.clone(), v: self.base.zero() }
    }

    /// The element `√α`.
    pub fn sqrt_alpha(&self) -> TowerElem<F::Elem> {
        TowerElem { u: self.base.zero(), v: self.base.one() }
    }

    pub fn pair(&self, u: F::Elem, v: F::Elem) -> TowerElem<F::Elem> {
        TowerElem { u, v }
    }
}

impl<F: Field> Field for QuadTower<F> {
    type Elem = TowerElem<F::Elem>;

    fn zero(&self) -> Self::Elem {
        self.embed(&self.base.zero())
    }
    fn one(&self) -> Self::Elem {
        self.embed(&self.base.one())
    }
    fn from_rational(&self, r: &Rational) -> Self::Elem {
        self.embed(&self.base.from_rational(r))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let f = &self.base;
        TowerElem { u: f.add(&a.u, &b.u), v: f.add(&a.v, &b.v) }
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        TowerElem { u: self.base.neg(&a.u), v: self.base.neg(&a.v) }
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let f = &self.base;
        // (u1 + v1√α)(u2 + v2√α) = (u1u2 + α v1v2) + (u1v2 + v1u2)√α
        let u = f.add(&f.mul(&a.u, &b.u), &f.mul(&self.alpha, &f.mul(&a.v, &b.v)));
        let v = f.add(&f.mul(&a.u, &b.v), &f.mul(&a.v, &b.u));
        TowerElem { u, v }
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let f = &self.base;
        // (u + v√α)⁻¹ = (u − v√α) / (u² − α v²)
        let norm = f.sub(&f.square(&a.u), &f.mul(&self.alpha, &f.square(&a.v)));
        let ninv = f.inv(&norm)?;
        Some(TowerElem { u: f.mul(&a.u, &ninv), v: f.neg(&f.mul(&a.v, &ninv)) })
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.base.is_zero(&a.u) && self.base.is_zero(&a.v)
    }
}

/// Result of [`adjoin_sqrt`].
#[derive(Debug, Clone, PartialEq)]
pub enum Adjoined<F: Field> {
    /// `a` was already a square; the witness lives in the base field.
    Root(F::Elem),
    /// `a` is a non-square; `√a` is `(0, 1)` in the tower.
    Tower(QuadTower<F>),
}

pub fn adjoin_sqrt<F: SqrtField>(base: &F, a: &F::Elem) -> Result<Adjoined<F>, FieldError> {
    if base.is_zero(a) {
        return Err(FieldError::ZeroRadicand);
    }
    Ok(match base.sqrt(a) {
        Some(root) => Adjoined::Root(root),
        None => Adjoined::Tower(QuadTower { base: base.clone(), alpha: a.clone() }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::ratio;

    fn x(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(Var::X, c)
    }

    fn field(c: &[i64]) -> NumberField {
        NumberField::new(&x(c)).unwrap()
    }

    #[test]
    fn arithmetic() {
        let k = field(&[1, 0, 1]);
        let i = k.theta();
        assert_eq!(i.try_mul(&i).unwrap(), k.element(&rat(-1)));
        let k2 = field(&[-2, 0, 1]);
        let r2 = k2.theta();
        assert_eq!(r2.inverse().unwrap(), k2.reduce(&UniPoly::new(Var::X, vec![rat(0), ratio(1, 2)])));
        assert_eq!(i.try_add(&k.zero()).unwrap(), i);
        assert_eq!(i.try_add(&r2), Err(FieldError::MixedFields));
        assert_eq!(k.zero().inverse(), Err(FieldError::InverseOfZero));
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(matches!(NumberField::new(&x(&[-1, 0, 1])), Err(FieldError::Reducible(_))));
        assert!(matches!(NumberField::new(&x(&[1, 0, 2])), Err(FieldError::BadModulus(_))));
    }

    #[test]
    fn reduce_examples() {
        let k1 = field(&[-1, 1]);
        assert!(reduce_mod(&x(&[-1, 0, 1]), &k1).is_zero());
        let k = field(&[-2, 0, 1]);
        assert_eq!(reduce_mod(&x(&[0, 0, 0, 1]), &k), k.reduce(&x(&[0, 2])));
        assert_eq!(reduce_mod(&x(&[5]), &k), k.element(&rat(5)));
    }

    #[test]
    fn square_examples() {
        let k = field(&[1, 0, 1]);
        let w = is_square_nf(&k, &k.element(&rat(-1))).unwrap();
        assert_eq!(k.square(&w), k.element(&rat(-1)));

        let k = field(&[-2, 0, 1]);
        let w = is_square_nf(&k, &k.element(&rat(2))).unwrap();
        assert_eq!(w.rep().deg0(), 1);
        assert_eq!(k.square(&w), k.element(&rat(2)));

        let k = field(&[-3, 0, 1]);
        assert!(is_square_nf(&k, &k.element(&rat(2))).is_none());
        assert!(is_square_nf(&k, &k.zero()).unwrap().is_zero());
    }

    #[test]
    fn non_square_certificates_verify() {
        let k = field(&[1, -1, 1]);
        let two = k.element(&rat(2));
        match square_test(&two) {
            SquareTest::NonSquare(Some(c)) => assert!(c.verify(&two)),
            other => panic!("expected certified non-square, got {other:?}"),
        }
    }

    #[test]
    fn cubic_field_square() {
        // K = Q(2^{1/3}); (1 + θ + θ²)² is a square, θ is not.
        let k = field(&[-2, 0, 0, 1]);
        let b = k.reduce(&x(&[1, 1, 1]));
        let sq = k.square(&b);
        let w = is_square_nf(&k, &sq).unwrap();
        assert_eq!(k.square(&w), sq);
        assert!(is_square_nf(&k, &k.theta()).is_none());
    }

    #[test]
    fn adjoin_examples() {
        match adjoin_sqrt(&RationalField, &rat(4)).unwrap() {
            Adjoined::Root(r) => assert_eq!(r, rat(2)),
            _ => panic!(),
        }
        let t = match adjoin_sqrt(&RationalField, &rat(2)).unwrap() {
            Adjoined::Tower(t) => t,
            _ => panic!(),
        };
        let s = t.sqrt_alpha();
        assert_eq!(t.mul(&s, &s), t.from_int(2));
        let a = t.pair(rat(1), rat(1));
        assert_eq!(t.inv(&a).unwrap(), t.pair(rat(-1), rat(1)));
        assert_eq!(adjoin_sqrt(&RationalField, &rat(0)), Err(FieldError::ZeroRadicand));
    }
}
