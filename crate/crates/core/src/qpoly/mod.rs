//! Exact rational arithmetic and dense univariate polynomials over ℚ.
//!
//! Coefficients are [`Rational`] (arbitrary precision, always reduced). A
//! polynomial carries a [`Var`] tag so that polynomials in `T` and in `x`
//! are not mixed by accident.

mod factor;
mod modp;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use factor::{factor, FactoredPoly};

/// Arbitrary precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("variable mismatch: {0} vs {1}")]
    VariableMismatch(Var, Var),
}

/// Formal variable of a [`UniPoly`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    X,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T => f.write_str("T"),
            Var::X => f.write_str("x"),
        }
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Returns `s ≥ 0` with `s² = r` when `r` is a square in ℚ.
///
/// Zero is a square (witness 0); callers that need a *nonzero* square check
/// that separately.
pub fn is_square_rational(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

/// Dense univariate polynomial with rational coefficients, lowest degree
/// first. The highest stored coefficient is never zero; the zero polynomial
/// has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    var: Var,
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(var: Var, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { var, coeffs }
    }

    pub fn from_ints(var: Var, coeffs: &[i64]) -> Self {
        Self::new(var, coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero(var: Var) -> Self {
        UniPoly { var, coeffs: Vec::new() }
    }

    pub fn one(var: Var) -> Self {
        Self::constant(var, Rational::one())
    }

    pub fn constant(var: Var, c: Rational) -> Self {
        Self::new(var, vec![c])
    }

    /// The monomial `c·var^k`.
    pub fn monomial(var: Var, c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(var, coeffs)
    }

    /// The polynomial `var`.
    pub fn var(var: Var) -> Self {
        Self::monomial(var, Rational::one(), 1)
    }

    pub fn variable(&self) -> Var {
        self.var
    }

    /// The same coefficients read in another variable.
    pub fn with_var(&self, var: Var) -> Self {
        UniPoly { var, coeffs: self.coeffs.clone() }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `var^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Divides by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lc) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn eval(&self, at: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat(i as i64))
            .collect();
        Self::new(self.var, coeffs)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.var);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitutes `other` for the variable (Horner); the result lives in
    /// `other`'s variable.
    pub fn compose(&self, other: &UniPoly) -> UniPoly {
        let mut acc = UniPoly::zero(other.var);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &UniPoly::constant(other.var, c.clone());
        }
        acc
    }

    fn check_var(&self, other: &UniPoly) -> Result<(), PolyError> {
        if self.var != other.var && !self.is_constant() && !other.is_constant() {
            return Err(PolyError::VariableMismatch(self.var, other.var));
        }
        Ok(())
    }

    /// Euclidean division, `deg(remainder) < deg(divisor)`.
    pub fn divrem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly), PolyError> {
        self.check_var(divisor)?;
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let var = self.var;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((UniPoly::zero(var), self.clone()));
        }
        let lc_inv = divisor.leading().recip();
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * &lc_inv;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * d;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((UniPoly::new(var, quot), UniPoly::new(var, rem)))
    }

    pub fn rem(&self, divisor: &UniPoly) -> Result<UniPoly, PolyError> {
        Ok(self.divrem(divisor)?.1)
    }

    /// Exact quotient when `divisor` divides `self`, otherwise `None`.
    pub fn div_exact(&self, divisor: &UniPoly) -> Option<UniPoly> {
        match self.divrem(divisor) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn divides(&self, other: &UniPoly) -> bool {
        !self.is_zero() && other.div_exact(self).is_some()
    }

    /// Multiplicity of `factor` in `self`; `None` when `self` is zero
    /// (infinite valuation).
    pub fn multiplicity(&self, factor: &UniPoly) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        assert!(!factor.is_constant(), "multiplicity of a constant factor");
        let mut k = 0;
        let mut cur = self.clone();
        while let Some(q) = cur.div_exact(factor) {
            cur = q;
            k += 1;
        }
        Some(k)
    }

    /// Integer content of the coefficient numerators over the lcm of the
    /// denominators: returns `(c, primitive integer coefficients)` with
    /// `self = c · primitive`, primitive leading coefficient positive.
    pub fn primitive_integer(&self) -> (Rational, Vec<BigInt>) {
        if self.is_zero() {
            return (Rational::zero(), Vec::new());
        }
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().is_some_and(Signed::is_negative) {
            g = -g;
        }
        let prim = ints.iter().map(|c| c / &g).collect();
        (Rational::new(g, den), prim)
    }

    pub fn from_integers(var: Var, coeffs: &[BigInt]) -> Self {
        Self::new(
            var,
            coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect(),
        )
    }
}

/// Monic greatest common divisor. `gcd(0, 0)` is the zero polynomial.
pub fn gcd(p: &UniPoly, q: &UniPoly) -> UniPoly {
    let (mut a, mut b) = (p.clone(), q.clone());
    while !b.is_zero() {
        let r = a.rem(&b).expect("nonzero divisor");
        a = b;
        b = r;
    }
    a.monic()
}

/// Extended Euclid: returns `(g, s, t)` with `s·p + t·q = g`, `g` monic.
pub fn ext_gcd(p: &UniPoly, q: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
    let var = p.var;
    let (mut r0, mut r1) = (p.clone(), q.clone());
    let (mut s0, mut s1) = (UniPoly::one(var), UniPoly::zero(var));
    let (mut t0, mut t1) = (UniPoly::zero(var), UniPoly::one(var));
    while !r1.is_zero() {
        let (quo, rem) = r0.divrem(&r1).expect("nonzero divisor");
        r0 = std::mem::replace(&mut r1, rem);
        let s2 = &s0 - &(&quo * &s1);
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &(&quo * &t1);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_zero() {
        return (r0, s0, t0);
    }
    let inv = r0.leading().recip();
    (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
}

/// Yun's square-free decomposition: `p = unit · ∏ gᵢ^i` with each `gᵢ`
/// monic, square-free and pairwise coprime. Only nonconstant parts are
/// returned, in increasing multiplicity.
pub fn squarefree_decomposition(p: &UniPoly) -> Result<Vec<(UniPoly, u32)>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    if p.is_constant() {
        return Ok(out);
    }
    let f = p.monic();
    let df = f.derivative();
    let a0 = gcd(&f, &df);
    let mut b = f.div_exact(&a0).expect("gcd divides");
    let mut c = df.div_exact(&a0).expect("gcd divides derivative");
    let mut d = &c - &b.derivative();
    let mut i = 1;
    loop {
        let a = gcd(&b, &d);
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a).expect("gcd divides");
        if b.is_constant() {
            break;
        }
        c = d.div_exact(&a).expect("gcd divides");
        d = &c - &b.derivative();
        i += 1;
    }
    Ok(out)
}

/// Resultant with the Sylvester-matrix convention:
/// `Res(p, q) = lc(p)^deg(q) · ∏_{p(α)=0} q(α)`.
///
/// Computed by a Euclidean remainder sequence over ℚ using
/// `Res(p, q) = (-1)^{mn} Res(q, p)` and
/// `Res(q, p) = lc(q)^{m - deg(p mod q)} Res(q, p mod q)`.
pub fn resultant(p: &UniPoly, q: &UniPoly) -> Result<Rational, PolyError> {
    if p.is_zero() || q.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    p.check_var(q)?;
    let mut sign_neg = false;
    let mut acc = Rational::one();
    let (mut a, mut b) = (p.clone(), q.clone());
    loop {
        let m = a.deg0();
        let n = b.deg0();
        if n == 0 {
            // Res(a, c) = c^m
            return Ok(finish(acc * pow_rat(&b.leading(), m), sign_neg));
        }
        if m == 0 {
            return Ok(finish(acc * pow_rat(&a.leading(), n), sign_neg));
        }
        // Res(a, b) = (-1)^{mn} Res(b, a) = (-1)^{mn} lc(b)^{m - deg r} Res(b, r)
        if (m * n) % 2 == 1 {
            sign_neg = !sign_neg;
        }
        let r = a.rem(&b).expect("nonzero divisor");
        if r.is_zero() {
            return Ok(Rational::zero());
        }
        acc *= pow_rat(&b.leading(), m - r.deg0());
        a = b;
        b = r;
    }
}

fn finish(r: Rational, neg: bool) -> Rational {
    if neg {
        -r
    } else {
        r
    }
}

pub(crate) fn pow_rat(r: &Rational, e: usize) -> Rational {
    num_traits::pow(r.clone(), e)
}

/// Discriminant `(-1)^{n(n-1)/2} Res(p, p') / lc(p)`.
pub fn discriminant(p: &UniPoly) -> Result<Rational, PolyError> {
    let n = p.degree().ok_or(PolyError::ZeroPolynomial)?;
    if n == 0 {
        return Ok(Rational::one());
    }
    let res = resultant(p, &p.derivative())?;
    let d = res / p.leading();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}

impl<'a> Add<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        self.check_var(rhs).expect("polynomial variables differ");
        let var = if self.is_constant() { rhs.var } else { self.var };
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        UniPoly::new(var, coeffs)
    }
}

impl<'a> Sub<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { var: self.var, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl<'a> Mul<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        self.check_var(rhs).expect("polynomial variables differ");
        let var = if self.is_constant() { rhs.var } else { self.var };
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(var);
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::new(var, coeffs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<UniPoly> for UniPoly {
            type Output = UniPoly;
            fn $m(self, rhs: UniPoly) -> UniPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        -&self
    }
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mag = fmt_rational(&abs);
            let needs_paren = !abs.is_integer();
            match i {
                0 => f.write_str(&mag)?,
                _ => {
                    if !abs.is_one() {
                        if needs_paren {
                            write!(f, "({mag})*")?;
                        } else {
                            write!(f, "{mag}*")?;
                        }
                    }
                    if i == 1 {
                        write!(f, "{}", self.var)?;
                    } else {
                        write!(f, "{}^{}", self.var, i)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

/// Total order used to sort factors deterministically: by degree, then by
/// coefficients from the top down.
pub fn canonical_cmp(a: &UniPoly, b: &UniPoly) -> std::cmp::Ordering {
    a.coeffs
        .len()
        .cmp(&b.coeffs.len())
        .then_with(|| a.coeffs.iter().rev().cmp(b.coeffs.iter().rev()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(coeffs: &[i64]) -> UniPoly {
        UniPoly::from_ints(Var::X, coeffs)
    }

    #[test]
    fn ring_ops() {
        assert_eq!(&x(&[1, 1]) * &x(&[-1, 1]), x(&[-1, 0, 1]));
        let p = x(&[3, 0, 2]);
        assert_eq!(&p + &UniPoly::zero(Var::X), p);
        let (q, r) = x(&[0, 0, 0, 1]).divrem(&x(&[-2, 1])).unwrap();
        assert_eq!(q, x(&[4, 2, 1]));
        assert_eq!(r, x(&[8]));
        assert_eq!(p.divrem(&UniPoly::zero(Var::X)), Err(PolyError::DivisionByZero));
    }

    #[test]
    fn mixed_variables_rejected() {
        let t = UniPoly::from_ints(Var::T, &[0, 1]);
        assert!(matches!(x(&[0, 1]).divrem(&t), Err(PolyError::VariableMismatch(_, _))));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&x(&[-1, 0, 1]), &x(&[-1, 1])), x(&[-1, 1]));
        assert_eq!(gcd(&x(&[1, 0, 1]), &x(&[-1, 0, 1])), x(&[1]));
        assert_eq!(gcd(&x(&[4, 2]), &UniPoly::zero(Var::X)), x(&[2, 1]));
    }

    #[test]
    fn ext_gcd_bezout() {
        let p = x(&[1, 0, 1]);
        let q = x(&[-1, 1, 3]);
        let (g, s, t) = ext_gcd(&p, &q);
        assert_eq!(g, x(&[1]));
        assert_eq!(&(&s * &p) + &(&t * &q), g);
    }

    #[test]
    fn squarefree_examples() {
        let sq = x(&[-1, 0, 1]).pow(2);
        assert_eq!(squarefree_decomposition(&sq).unwrap(), vec![(x(&[-1, 0, 1]), 2)]);
        assert_eq!(
            squarefree_decomposition(&x(&[-1, 0, 1])).unwrap(),
            vec![(x(&[-1, 0, 1]), 1)]
        );
        assert_eq!(squarefree_decomposition(&x(&[0, 0, 0, 1])).unwrap(), vec![(x(&[0, 1]), 3)]);
        assert!(squarefree_decomposition(&UniPoly::zero(Var::X)).is_err());
        // (x+1) (x-2)^2 x^3, scaled
        let p = x(&[1, 1]) * x(&[-2, 1]).pow(2) * x(&[0, 3]).pow(3);
        let d = squarefree_decomposition(&p).unwrap();
        assert_eq!(d, vec![(x(&[1, 1]), 1), (x(&[-2, 1]), 2), (x(&[0, 1]), 3)]);
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&x(&[-2, 1]), &x(&[-3, 1])).unwrap(), rat(-1));
        assert_eq!(resultant(&x(&[5, 1, 7]), &x(&[1])).unwrap(), rat(1));
        assert_eq!(resultant(&x(&[0, 0, 1]), &x(&[-2, 1])).unwrap(), rat(4));
        assert_eq!(resultant(&x(&[-2, 1]), &x(&[0, 0, 1])).unwrap(), rat(4));
        assert!(resultant(&x(&[1]), &UniPoly::zero(Var::X)).is_err());
    }

    #[test]
    fn discriminant_of_cubic() {
        // x^3 + x + 1: -4 - 27 = -31
        assert_eq!(discriminant(&x(&[1, 1, 0, 1])).unwrap(), rat(-31));
        // x^2 - x + 1: 1 - 4 = -3
        assert_eq!(discriminant(&x(&[1, -1, 1])).unwrap(), rat(-3));
    }

    #[test]
    fn rational_squares() {
        assert_eq!(is_square_rational(&rat(4)), Some(rat(2)));
        assert_eq!(is_square_rational(&rat(2)), None);
        assert_eq!(is_square_rational(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(is_square_rational(&rat(0)), Some(rat(0)));
        assert_eq!(is_square_rational(&rat(-4)), None);
    }

    #[test]
    fn display() {
        assert_eq!(x(&[4, -1, 0, 1]).to_string(), "x^3 - x + 4");
        assert_eq!(UniPoly::new(Var::T, vec![ratio(1, 2), rat(-3)]).to_string(), "-3*T + 1/2");
    }
}
