//! Points over `K(T)` on the scaled model `Y² = X³ + pX² + qX + r`, the
//! chord–tangent group law, and the point identities induced by the conic
//! bundle.

use num_traits::Zero;
use thiserror::Error;

use crate::conic::{ConicFiber, ConicKind};
use crate::curve::CurveInput;
use crate::funcfield::{Field, GPoly, RatFn, RationalField};
use crate::kodaira::Place;
use crate::numfield::{adjoin_sqrt, reduce_mod, Adjoined, FieldError, NumberField, QuadTower};
use crate::qpoly::{is_square_rational, Rational, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("fiber at {0} is D-kind; its point is 2-torsion")]
    DKindLocation(String),
    #[error("fiber at {0} is not a finite D-kind fiber")]
    NotDKind(String),
    #[error("singular curve over K(T)")]
    Singular,
    #[error("constructed point at {0} is not on the curve")]
    OffCurve(String),
    #[error("relation check not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `Y² = X³ + pX² + qX + r` over `K(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveOverFF<F: Field> {
    field: F,
    p: GPoly<F>,
    q: GPoly<F>,
    r: GPoly<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FFPoint<F: Field> {
    Zero,
    Affine(RatFn<F>, RatFn<F>),
}

impl<F: Field> FFPoint<F> {
    pub fn is_zero(&self) -> bool {
        matches!(self, FFPoint::Zero)
    }
}

impl<F: Field> CurveOverFF<F> {
    pub fn new(field: F, p: GPoly<F>, q: GPoly<F>, r: GPoly<F>) -> Result<Self, PointError> {
        let e = CurveOverFF { field, p, q, r };
        if e.discriminant().is_zero() {
            return Err(PointError::Singular);
        }
        Ok(e)
    }

    /// Base change of the scaled model of `c` to `K(T)`.
    pub fn from_curve(field: F, c: &CurveInput) -> Result<Self, PointError> {
        let w = c.weierstrass();
        let lift = |p: &UniPoly| GPoly::from_qpoly(field.clone(), p);
        Self::new(field.clone(), lift(&w.p), lift(&w.q), lift(&w.r))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// `p²q² − 4q³ − 4p³r − 27r² + 18pqr`.
    pub fn discriminant(&self) -> GPoly<F> {
        let f = &self.field;
        let (p, q, r) = (&self.p, &self.q, &self.r);
        let k = |n: i64| f.from_int(n);
        let pq = p.mul(q);
        pq.mul(&pq)
            .sub(&q.mul(q).mul(q).scale(&k(4)))
            .sub(&p.mul(p).mul(p).mul(r).scale(&k(4)))
            .sub(&r.mul(r).scale(&k(27)))
            .add(&pq.mul(r).scale(&k(18)))
    }

    fn rf(&self, p: &GPoly<F>) -> RatFn<F> {
        RatFn::from_poly(p.clone())
    }

    fn rc(&self, n: i64) -> RatFn<F> {
        RatFn::constant(self.field.clone(), self.field.from_int(n))
    }

    /// Affine point from polynomial coordinates.
    pub fn point(&self, x: GPoly<F>, y: GPoly<F>) -> FFPoint<F> {
        FFPoint::Affine(RatFn::from_poly(x), RatFn::from_poly(y))
    }

    pub fn contains(&self, pt: &FFPoint<F>) -> bool {
        match pt {
            FFPoint::Zero => true,
            FFPoint::Affine(x, y) => {
                let rhs = x.mul(x).mul(x).add(&self.rf(&self.p).mul(x).mul(x))
                    .add(&self.rf(&self.q).mul(x))
                    .add(&self.rf(&self.r));
                y.mul(y) == rhs
            }
        }
    }

    pub fn neg(&self, pt: &FFPoint<F>) -> FFPoint<F> {
        match pt {
            FFPoint::Zero => FFPoint::Zero,
            FFPoint::Affine(x, y) => FFPoint::Affine(x.clone(), y.neg()),
        }
    }

    pub fn double(&self, pt: &FFPoint<F>) -> FFPoint<F> {
        let FFPoint::Affine(x, y) = pt else { return FFPoint::Zero };
        if y.is_zero() {
            return FFPoint::Zero;
        }
        let p = self.rf(&self.p);
        let num = self.rc(3).mul(x).mul(x).add(&self.rc(2).mul(&p).mul(x)).add(&self.rf(&self.q));
        let lambda = num.div(&self.rc(2).mul(y)).expect("y ≠ 0");
        self.third_point(&lambda, x, y, x)
    }

    pub fn add(&self, a: &FFPoint<F>, b: &FFPoint<F>) -> FFPoint<F> {
        let (FFPoint::Affine(x1, y1), FFPoint::Affine(x2, y2)) = (a, b) else {
            return if a.is_zero() { b.clone() } else { a.clone() };
        };
        if x1 == x2 {
            return if y1 == y2 { self.double(a) } else { FFPoint::Zero };
        }
        let lambda = y2.sub(y1).div(&x2.sub(x1)).expect("x1 ≠ x2");
        self.third_point(&lambda, x1, y1, x2)
    }

    fn third_point(&self, lambda: &RatFn<F>, x1: &RatFn<F>, y1: &RatFn<F>, x2: &RatFn<F>) -> FFPoint<F> {
        let x3 = lambda.mul(lambda).sub(&self.rf(&self.p)).sub(x1).sub(x2);
        let y3 = y1.add(&lambda.mul(&x3.sub(x1))).neg();
        FFPoint::Affine(x3, y3)
    }

    /// `[n]P` by double-and-add.
    pub fn mul(&self, n: i64, pt: &FFPoint<F>) -> FFPoint<F> {
        let mut base = if n < 0 { self.neg(pt) } else { pt.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = FFPoint::Zero;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.double(&base);
            }
        }
        acc
    }

    pub fn sum<'a>(&self, pts: impl IntoIterator<Item = &'a FFPoint<F>>) -> FFPoint<F>
    where
        F: 'a,
    {
        pts.into_iter().fold(FFPoint::Zero, |acc, p| self.add(&acc, p))
    }
}

/// Scaled point `(a₃θ, a₃·y)` where `y = ρ(T + B(θ)/(2A(θ)))` if
/// `A(θ) ≠ 0`, else `y = ρ`.
fn scaled_point<F: Field>(
    e: &CurveOverFF<F>,
    a3: &UniPoly,
    theta: &F::Elem,
    rho: &F::Elem,
    a_val: &F::Elem,
    b_val: &F::Elem,
) -> FFPoint<F> {
    let f = e.field();
    let y_raw = if f.is_zero(a_val) {
        GPoly::constant(f.clone(), rho.clone())
    } else {
        let two_a_inv = f.inv(&f.mul(&f.from_int(2), a_val)).expect("A(θ) ≠ 0");
        let shift = f.mul(b_val, &two_a_inv);
        GPoly::new(f.clone(), vec![f.mul(rho, &shift), rho.clone()])
    };
    let a3 = GPoly::from_qpoly(f.clone(), a3);
    e.point(a3.scale(theta), a3.mul(&y_raw))
}

/// `P_θ` for a location `θ` and square root `ρ` given directly in `F`.
pub fn conic_point<F: Field>(
    e: &CurveOverFF<F>,
    c: &CurveInput,
    theta: &F::Elem,
    rho: &F::Elem,
) -> FFPoint<F> {
    let cf = c.conic();
    let f = e.field().clone();
    let at = |p: &UniPoly| GPoly::from_qpoly(f.clone(), p).eval(theta);
    scaled_point(e, c.a(3), theta, rho, &at(&cf.a), &at(&cf.b))
}

/// `P_θ` together with the curve it lives on.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstructedPoint {
    /// The square root lies in `ℚ(θ)`.
    Base(CurveOverFF<NumberField>, FFPoint<NumberField>),
    /// The square root needs `ℚ(θ)(√α)`.
    Tower(CurveOverFF<QuadTower<NumberField>>, FFPoint<QuadTower<NumberField>>),
}

impl ConstructedPoint {
    pub fn on_curve(&self) -> bool {
        match self {
            ConstructedPoint::Base(e, p) => e.contains(p),
            ConstructedPoint::Tower(e, p) => e.contains(p),
        }
    }

    pub fn in_tower(&self) -> bool {
        matches!(self, ConstructedPoint::Tower(..))
    }
}

/// `P_θ` for an A-kind location; `negate_root` picks the other square root.
pub fn construct_point(
    c: &CurveInput,
    factor: &UniPoly,
    negate_root: bool,
) -> Result<ConstructedPoint, PointError> {
    let cf = c.conic();
    let k = NumberField::new(factor)?;
    let a = reduce_mod(&cf.a, &k);
    let b = reduce_mod(&cf.b, &k);
    let cc = reduce_mod(&cf.c, &k);
    if a.is_zero() && cc.is_zero() {
        return Err(PointError::DKindLocation(factor.to_string()));
    }
    let radicand = if a.is_zero() { &cc } else { &a };
    let a3 = c.a(3);
    let pt = match adjoin_sqrt(&k, radicand)? {
        Adjoined::Root(rho) => {
            let rho = if negate_root { k.neg(&rho) } else { rho };
            let e = CurveOverFF::from_curve(k.clone(), c)?;
            let p = scaled_point(&e, a3, &k.theta(), &rho, &a, &b);
            ConstructedPoint::Base(e, p)
        }
        Adjoined::Tower(t) => {
            let rho = t.sqrt_alpha();
            let rho = if negate_root { t.neg(&rho) } else { rho };
            let e = CurveOverFF::from_curve(t.clone(), c)?;
            let p = scaled_point(&e, a3, &t.embed(&k.theta()), &rho, &t.embed(&a), &t.embed(&b));
            ConstructedPoint::Tower(e, p)
        }
    };
    if !pt.on_curve() {
        return Err(PointError::OffCurve(factor.to_string()));
    }
    Ok(pt)
}

/// Checks that `(a₃θ, 0)` is on the curve and doubles to `O`.
pub fn verify_two_torsion(c: &CurveInput, fiber: &ConicFiber) -> Result<bool, PointError> {
    let Place::Finite(factor) = &fiber.location else {
        return Err(PointError::NotDKind(fiber.location.to_string()));
    };
    if fiber.kind != ConicKind::D {
        return Err(PointError::NotDKind(factor.to_string()));
    }
    let k = NumberField::new(factor)?;
    let e = CurveOverFF::from_curve(k.clone(), c)?;
    let a3 = GPoly::from_qpoly(k.clone(), c.a(3));
    let pt = e.point(a3.scale(&k.theta()), GPoly::zero(k.clone()));
    Ok(is_two_torsion(&e, &pt))
}

pub fn is_two_torsion<F: Field>(e: &CurveOverFF<F>, pt: &FFPoint<F>) -> bool {
    e.contains(pt) && !pt.is_zero() && e.double(pt).is_zero()
}

/// Outcome of [`verify_linear_relation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationCheck {
    /// `Σ [n_θ] P_θ = O` with `n_θ` the multiplicity of `θ` in `Δ_conic`.
    pub weighted_sum_zero: bool,
    /// `P₁ ⊕ P₂ ⊕ P₃ = O`, checked for the cubic-pencil shape.
    pub triple_sum_zero: Option<bool>,
}

impl RelationCheck {
    pub fn holds(&self) -> bool {
        self.weighted_sum_zero && self.triple_sum_zero.unwrap_or(true)
    }
}

/// Evaluates the conic-bundle relation among the points `P_θ` for rational
/// `θ`. All square roots must lie in one field `ℚ(√α₀)`.
pub fn verify_linear_relation(
    c: &CurveInput,
    fibers: &[ConicFiber],
    triple: bool,
) -> Result<RelationCheck, PointError> {
    let cf = c.conic();
    let mut data = Vec::new();
    for f in fibers.iter().filter(|f| f.kind == ConicKind::A) {
        let Place::Finite(factor) = &f.location else { continue };
        if factor.deg0() != 1 {
            return Err(PointError::NotApplicable(format!("irrational location {factor}")));
        }
        let theta = -factor.coeff(0);
        let a = cf.a.eval(&theta);
        let radicand = if a.is_zero() { cf.c.eval(&theta) } else { a.clone() };
        let b = cf.b.eval(&theta);
        data.push((theta, a, b, radicand, (f.n - 1) as i64));
    }
    if data.is_empty() {
        return Err(PointError::NotApplicable("no A-kind locations".into()));
    }
    let alpha0 = data.iter().find(|d| is_square_rational(&d.3).is_none()).map(|d| d.3.clone());
    // each root is s (rational) or s·√α₀
    let mut roots = Vec::new();
    for d in &data {
        let in_tower = alpha0.as_ref().and_then(|a0| is_square_rational(&(&d.3 / a0)));
        let root = match in_tower {
            Some(s) => (s, true),
            None => {
                let s = is_square_rational(&d.3)
                    .ok_or_else(|| PointError::NotApplicable("no common quadratic field".into()))?;
                (s, false)
            }
        };
        roots.push(root);
    }
    match alpha0 {
        None => {
            let e = CurveOverFF::from_curve(RationalField, c)?;
            let emb = |r: &Rational| r.clone();
            Ok(relation_in(&e, c, &data, &roots, emb, |s, _| s.clone(), triple))
        }
        Some(a0) => {
            let t = match adjoin_sqrt(&RationalField, &a0)? {
                Adjoined::Tower(t) => t,
                Adjoined::Root(_) => unreachable!("α₀ is a non-square"),
            };
            let e = CurveOverFF::from_curve(t.clone(), c)?;
            let emb = |r: &Rational| t.embed(r);
            let root = |s: &Rational, in_tower: bool| {
                if in_tower {
                    t.pair(Rational::zero(), s.clone())
                } else {
                    t.embed(s)
                }
            };
            Ok(relation_in(&e, c, &data, &roots, emb, root, triple))
        }
    }
}

type RationalData = (Rational, Rational, Rational, Rational, i64);

fn relation_in<F: Field>(
    e: &CurveOverFF<F>,
    c: &CurveInput,
    data: &[RationalData],
    roots: &[(Rational, bool)],
    emb: impl Fn(&Rational) -> F::Elem,
    root: impl Fn(&Rational, bool) -> F::Elem,
    triple: bool,
) -> RelationCheck {
    let pts: Vec<FFPoint<F>> = data
        .iter()
        .zip(roots)
        .map(|((theta, a, b, _, _), (s, t))| {
            scaled_point(e, c.a(3), &emb(theta), &root(s, *t), &emb(a), &emb(b))
        })
        .collect();
    debug_assert!(pts.iter().all(|p| e.contains(p)));
    let weighted: Vec<FFPoint<F>> =
        pts.iter().zip(data).map(|(p, d)| e.mul(d.4, p)).collect();
    let weighted_sum_zero = e.sum(&weighted).is_zero();
    let triple_sum_zero = (triple && pts.len() == 3).then(|| e.sum(&pts).is_zero());
    RelationCheck { weighted_sum_zero, triple_sum_zero }
}
