//! Polynomials and rational functions over an arbitrary exact field.
//!
//! The coefficient field is a value implementing [`Field`]; elements are
//! plain data and every operation goes through the field handle. One
//! implementation therefore serves ℚ, number fields and quadratic towers.

use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::qpoly::{Rational, UniPoly};

/// An exact, computable field.
pub trait Field: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_rational(&self, r: &Rational) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_rational(&crate::qpoly::rat(n))
    }

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }
}

/// The rational numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn from_rational(&self, r: &Rational) -> Rational {
        r.clone()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
}

/// Dense polynomial in one variable over the field `F`, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct GPoly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> GPoly<F> {
    pub fn new(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        GPoly { field, coeffs }
    }

    pub fn zero(field: F) -> Self {
        GPoly { field, coeffs: Vec::new() }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        Self::new(field, vec![one])
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Self::new(field, vec![c])
    }

    /// The polynomial `T`.
    pub fn var(field: F) -> Self {
        let (z, o) = (field.zero(), field.one());
        Self::new(field, vec![z, o])
    }

    /// Maps a rational polynomial into `F[T]`.
    pub fn from_qpoly(field: F, p: &UniPoly) -> Self {
        let coeffs = p.coeffs().iter().map(|c| field.from_rational(c)).collect();
        Self::new(field, coeffs)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> F::Elem {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| self.field.add(&self.coeff(i), &o.coeff(i)))
            .collect();
        Self::new(self.field.clone(), c)
    }

    pub fn neg(&self) -> Self {
        let c = self.coeffs.iter().map(|a| self.field.neg(a)).collect();
        Self::new(self.field.clone(), c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.field.clone());
        }
        let f = &self.field;
        let mut c = vec![f.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = f.add(&c[i + j], &f.mul(a, b));
            }
        }
        Self::new(f.clone(), c)
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        let c = self.coeffs.iter().map(|a| self.field.mul(a, s)).collect();
        Self::new(self.field.clone(), c)
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lc) => {
                let inv = self.field.inv(lc).expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn divrem(&self, d: &Self) -> Option<(Self, Self)> {
        let f = &self.field;
        let dd = d.degree()?;
        if self.coeffs.len() <= dd {
            return Some((Self::zero(f.clone()), self.clone()));
        }
        let lc_inv = f.inv(&d.leading())?;
        let mut r = self.coeffs.clone();
        let mut q = vec![f.zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = f.mul(&r[i + dd], &lc_inv);
            if !f.is_zero(&c) {
                for (j, b) in d.coeffs.iter().enumerate() {
                    r[i + j] = f.sub(&r[i + j], &f.mul(&c, b));
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        Some((Self::new(f.clone(), q), Self::new(f.clone(), r)))
    }

    /// Monic gcd; zero only when both inputs are zero.
    pub fn gcd(&self, o: &Self) -> Self {
        // monic remainders keep coefficient growth in check
        let (mut a, mut b) = (self.monic(), o.monic());
        while !b.is_zero() {
            let r = a.divrem(&b).expect("nonzero divisor").1;
            a = b;
            b = r.monic();
        }
        a
    }

    pub fn eval(&self, at: &F::Elem) -> F::Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, at), c))
    }
}

/// A rational function `numerator / denominator` kept in lowest terms with
/// a monic denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RatFn<F: Field> {
    num: GPoly<F>,
    den: GPoly<F>,
}

impl<F: Field> RatFn<F> {
    /// Builds and normalizes `num / den`; `None` if `den` is zero.
    pub fn new(num: GPoly<F>, den: GPoly<F>) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::normalized(num, den))
    }

    fn normalized(num: GPoly<F>, den: GPoly<F>) -> Self {
        let field = den.field().clone();
        if num.is_zero() {
            return RatFn { num, den: GPoly::one(field) };
        }
        let (num, den) = if den.degree() == Some(0) {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.degree() == Some(0) {
                (num, den)
            } else {
                (num.divrem(&g).expect("gcd nonzero").0, den.divrem(&g).expect("gcd nonzero").0)
            }
        };
        let lc_inv = field.inv(&den.leading()).expect("nonzero");
        RatFn { num: num.scale(&lc_inv), den: den.scale(&lc_inv) }
    }

    pub fn from_poly(p: GPoly<F>) -> Self {
        let one = GPoly::one(p.field().clone());
        RatFn { num: p, den: one }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Self::from_poly(GPoly::constant(field, c))
    }

    pub fn zero(field: F) -> Self {
        Self::from_poly(GPoly::zero(field))
    }

    pub fn numerator(&self) -> &GPoly<F> {
        &self.num
    }

    pub fn denominator(&self) -> &GPoly<F> {
        &self.den
    }

    pub fn field(&self) -> &F {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Re-applies normalization (idempotent on normalized values).
    pub fn normalize(&self) -> Self {
        Self::normalized(self.num.clone(), self.den.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::normalized(self.num.add(&o.num), self.den.clone());
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::normalized(num, self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::normalized(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Option<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        Self::normalized(self.num.scale(s), self.den.clone())
    }

    /// Evaluates at `at`; `None` at a pole.
    pub fn eval(&self, at: &F::Elem) -> Option<F::Elem> {
        let d = self.den.eval(at);
        let inv = self.field().inv(&d)?;
        Some(self.field().mul(&self.num.eval(at), &inv))
    }
}
