//! Defect, the orbit count `δ_k`, rank bounds over `ℚ(T)`, and the family
//! rules that pin the rank down exactly.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conic::{ConicFiber, ConicKind};
use crate::curve::{CurveInput, WeierstrassData};
use crate::kodaira::{fiber_at, KodairaFiber, KodairaType, Place};
use crate::numfield::{square_test, NFElement, NonSquareCertificate, SquareTest};
use crate::qpoly::{self, is_square_rational, Rational, UniPoly, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("negative defect: δ = {delta} < r = {rank}")]
    NegativeDefect { delta: u32, rank: u32 },
    #[error("shared fibers inconsistent with G∞ = D{n}: {detail}")]
    SharedFiberInconsistency { n: u32, detail: String },
    #[error("no shared-fiber table row for G∞ = D{n}, F = {fiber} at {place}")]
    TableMismatch { n: u32, fiber: String, place: String },
    #[error("family rule {rule} requires Df = 1, found {found}")]
    FamilyDefect { rule: &'static str, found: u32 },
}

/// Fibers of the elliptic fibration sharing components with `G∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedPlaces {
    pub places: Vec<Place>,
    /// One place counted twice (double root of the homogenized `a₃`).
    pub doubled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectReport {
    pub df_direct: u32,
    pub df_table: Option<u32>,
    pub consistent: bool,
    pub shared_places: Vec<(Place, KodairaFiber)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SquareStatus {
    ASquare(NFElement),
    ANonsquare(Option<NonSquareCertificate>),
    AZeroCSquare(NFElement),
    AZeroCNonsquare(Option<NonSquareCertificate>),
    DExcluded,
}

impl SquareStatus {
    pub fn counted(&self) -> bool {
        matches!(self, SquareStatus::ASquare(_) | SquareStatus::AZeroCSquare(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            SquareStatus::ASquare(_) => "A-square",
            SquareStatus::ANonsquare(_) => "A-nonsquare",
            SquareStatus::AZeroCSquare(_) => "A-zero-C-square",
            SquareStatus::AZeroCNonsquare(_) => "A-zero-C-nonsquare",
            SquareStatus::DExcluded => "D-excluded",
        }
    }

    pub fn witness(&self) -> Option<&NFElement> {
        match self {
            SquareStatus::ASquare(w) | SquareStatus::AZeroCSquare(w) => Some(w),
            _ => None,
        }
    }

    pub fn certificate(&self) -> Option<&NonSquareCertificate> {
        match self {
            SquareStatus::ANonsquare(c) | SquareStatus::AZeroCNonsquare(c) => c.as_ref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    pub factor: UniPoly,
    pub fiber_kind: ConicKind,
    pub square_status: SquareStatus,
    pub counted: bool,
}

/// The rule that fixed (or failed to fix) the rank over `ℚ(T)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum FamilyTag {
    /// `Df = 0`, so the bounds collapse.
    DefectZero,
    /// `A = μ`, `deg B ≤ 2`, `deg C = 3`.
    ConstantLeading { mu: String, mu_square: bool },
    /// `A = 0`, `B` monic separable cubic, `C = λB + μ`.
    CubicPencil { lambda: String, mu: String, mu_square: bool },
    BoundsOnly,
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTag::DefectZero => f.write_str("defect-zero"),
            FamilyTag::ConstantLeading { mu, mu_square } => {
                write!(f, "constant-leading (mu = {mu}, {})", square_word(*mu_square))
            }
            FamilyTag::CubicPencil { lambda, mu, mu_square } => write!(
                f,
                "cubic-pencil (lambda = {lambda}, mu = {mu}, {})",
                square_word(*mu_square)
            ),
            FamilyTag::BoundsOnly => f.write_str("bounds-only"),
        }
    }
}

fn square_word(sq: bool) -> &'static str {
    if sq {
        "square"
    } else {
        "non-square"
    }
}

/// Recognized curve shapes, reported for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    /// `deg a₃ ≥ 1`, `deg γ = 8`, `Res(a₃, γ) ≠ 0`.
    GenericNonconstantA3,
    /// `A = x³`, `B = 2g` with `g` monic cubic, `g(0) ≠ 0`.
    PureCubicLeading,
    /// `A = 0`, `deg B ≤ 2`, `deg C = 3`.
    LinearInT,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::GenericNonconstantA3 => "generic-nonconstant-a3",
            Shape::PureCubicLeading => "pure-cubic-leading",
            Shape::LinearInT => "linear-in-T",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    pub tag: FamilyTag,
    pub shapes: Vec<Shape>,
    pub rank_exact: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub delta: u32,
    pub epsilon: u32,
    pub rank_geometric: u32,
    pub defect: DefectReport,
    pub delta_k: u32,
    pub orbits: Vec<OrbitRecord>,
    pub bounds: (u32, u32),
    pub family: FamilyReport,
    pub notes: Vec<String>,
}

/// `Df = δ − r`.
pub fn defect_direct(delta: u32, rank: u32) -> Result<u32, RankError> {
    delta.checked_sub(rank).ok_or(RankError::NegativeDefect { delta, rank })
}

/// Zeros of `a₃` homogenized to degree 2 on `ℙ¹`.
pub fn shared_fiber_places(c: &CurveInput) -> SharedPlaces {
    let a3 = c.a(3);
    match a3.deg0() {
        0 => SharedPlaces { places: vec![Place::Infinity], doubled: true },
        1 => SharedPlaces { places: vec![Place::Finite(a3.monic()), Place::Infinity], doubled: false },
        _ => {
            let f = qpoly::factor(a3).expect("a₃ is nonzero");
            let doubled = f.factors.iter().any(|(_, e)| *e > 1);
            SharedPlaces {
                places: f.factors.into_iter().map(|(p, _)| Place::Finite(p)).collect(),
                doubled,
            }
        }
    }
}

fn smooth_fiber(place: &Place) -> KodairaFiber {
    KodairaFiber { place: place.clone(), kind: KodairaType::I(0), components: 1, euler: 0 }
}

/// Pairs each shared place with its Kodaira fiber (`I0` when smooth) and
/// checks the multiplicity pattern against `G∞ = D_n`.
pub fn shared_fibers(
    shared: &SharedPlaces,
    g_inf_n: u32,
    fibers: &[KodairaFiber],
) -> Result<Vec<(Place, KodairaFiber)>, RankError> {
    if shared.doubled != (g_inf_n >= 4) {
        let detail = if shared.doubled {
            "a₃ has a double zero on ℙ¹ but G∞ = D3".to_string()
        } else {
            format!("a₃ has simple zeros on ℙ¹ but G∞ = D{g_inf_n}")
        };
        return Err(RankError::SharedFiberInconsistency { n: g_inf_n, detail });
    }
    Ok(shared
        .places
        .iter()
        .map(|p| (p.clone(), fiber_at(fibers, p).cloned().unwrap_or_else(|| smooth_fiber(p))))
        .collect())
}

/// Defect from the type of `G∞` and the shared fibers.
pub fn defect_table(g_inf_n: u32, shared: &[(Place, KodairaFiber)]) -> Result<u32, RankError> {
    use KodairaType::*;
    if g_inf_n == 3 {
        return Ok(shared
            .iter()
            .filter(|(_, f)| matches!(f.kind, IV) || matches!(f.kind, I(m) if m >= 3))
            .map(|(p, _)| p.degree())
            .sum());
    }
    let [(place, fiber)] = shared else {
        return Err(RankError::SharedFiberInconsistency {
            n: g_inf_n,
            detail: format!("expected one shared fiber, found {}", shared.len()),
        });
    };
    let df = match (g_inf_n, fiber.kind) {
        (4, I(4)) => Some(0),
        (4, I(m)) if m >= 5 => Some(1),
        (5, IStar(1)) => Some(1),
        (5, IStar(m)) if m >= 2 => Some(0),
        (6, IVStar) => Some(1),
        (7, IIIStar) => Some(0),
        (9, IIStar) => Some(0),
        (n, IStar(m)) if n == m + 5 => Some(0),
        _ => None,
    };
    df.ok_or_else(|| RankError::TableMismatch {
        n: g_inf_n,
        fiber: fiber.kind.to_string(),
        place: place.to_string(),
    })
}

/// `δ_k` and one record per finite orbit of roots of `Δ_conic`.
pub fn delta_k(fibers: &[ConicFiber]) -> (u32, Vec<OrbitRecord>) {
    let record = |f: &ConicFiber| -> Option<OrbitRecord> {
        let Place::Finite(factor) = &f.location else { return None };
        let a = f.a_residue.as_ref().expect("finite fiber");
        let c = f.c_residue.as_ref().expect("finite fiber");
        let status = match f.kind {
            ConicKind::D => SquareStatus::DExcluded,
            ConicKind::A if !a.is_zero() => match square_test(a) {
                SquareTest::Square(w) => SquareStatus::ASquare(w),
                SquareTest::NonSquare(cert) => SquareStatus::ANonsquare(cert),
            },
            ConicKind::A => match square_test(c) {
                SquareTest::Square(w) => SquareStatus::AZeroCSquare(w),
                SquareTest::NonSquare(cert) => SquareStatus::AZeroCNonsquare(cert),
            },
        };
        Some(OrbitRecord {
            factor: factor.clone(),
            fiber_kind: f.kind,
            counted: status.counted(),
            square_status: status,
        })
    };
    #[cfg(feature = "parallel")]
    let orbits: Vec<OrbitRecord> = {
        use rayon::prelude::*;
        fibers.par_iter().filter_map(record).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let orbits: Vec<OrbitRecord> = fibers.iter().filter_map(record).collect();
    let n = orbits.iter().filter(|o| o.counted).count() as u32;
    (n, orbits)
}

/// `(max(0, δ_k − Df), δ_k)`.
pub fn rank_bounds(delta_k: u32, df: u32) -> (u32, u32) {
    (delta_k.saturating_sub(df), delta_k)
}

fn is_constant_nonzero(p: &UniPoly) -> Option<Rational> {
    (p.is_constant() && !p.is_zero()).then(|| p.coeff(0))
}

/// Shapes recognized for diagnostics.
pub fn detect_shapes(c: &CurveInput, w: &WeierstrassData) -> Vec<Shape> {
    let cf = c.conic();
    let mut out = Vec::new();
    let a3 = c.a(3);
    if a3.deg0() >= 1
        && w.gamma.degree() == Some(8)
        && !qpoly::resultant(a3, &w.gamma).expect("nonzero inputs").is_zero()
    {
        out.push(Shape::GenericNonconstantA3);
    }
    let x3 = UniPoly::monomial(Var::X, Rational::from_integer(1.into()), 3);
    if cf.a == x3 && cf.b.degree() == Some(3) {
        let g = cf.b.scale(&Rational::new(1.into(), 2.into()));
        if g.is_monic() && !g.coeff(0).is_zero() {
            out.push(Shape::PureCubicLeading);
        }
    }
    if cf.a.is_zero() && cf.b.degree().is_none_or(|d| d <= 2) && cf.c.degree() == Some(3) {
        out.push(Shape::LinearInT);
    }
    out
}

/// First matching family rule.
pub fn detect_family(
    c: &CurveInput,
    w: &WeierstrassData,
    df: u32,
    delta_k: u32,
) -> Result<FamilyReport, RankError> {
    let shapes = detect_shapes(c, w);
    if df == 0 {
        return Ok(FamilyReport { tag: FamilyTag::DefectZero, shapes, rank_exact: Some(delta_k) });
    }
    let cf = c.conic();
    let by_mu = |mu: &Rational| {
        let sq = is_square_rational(mu).is_some();
        (sq, if sq { delta_k.checked_sub(1) } else { Some(delta_k) })
    };
    if let Some(mu) = is_constant_nonzero(&cf.a) {
        if cf.b.degree().is_none_or(|d| d <= 2) && cf.c.degree() == Some(3) {
            if df != 1 {
                return Err(RankError::FamilyDefect { rule: "constant-leading", found: df });
            }
            let (mu_square, rank_exact) = by_mu(&mu);
            let tag = FamilyTag::ConstantLeading { mu: qpoly::fmt_rational(&mu), mu_square };
            return Ok(FamilyReport { tag, shapes, rank_exact });
        }
    }
    if cf.a.is_zero() && cf.b.degree() == Some(3) && cf.b.is_monic() {
        let b = &cf.b;
        let separable = qpoly::gcd(b, &b.derivative()).is_constant();
        let lambda = cf.c.coeff(3);
        let rest = &cf.c - &b.scale(&lambda);
        if let (true, Some(mu)) = (separable, is_constant_nonzero(&rest)) {
            if df != 1 {
                return Err(RankError::FamilyDefect { rule: "cubic-pencil", found: df });
            }
            let (mu_square, rank_exact) = by_mu(&mu);
            let tag = FamilyTag::CubicPencil {
                lambda: qpoly::fmt_rational(&lambda),
                mu: qpoly::fmt_rational(&mu),
                mu_square,
            };
            return Ok(FamilyReport { tag, shapes, rank_exact });
        }
    }
    Ok(FamilyReport { tag: FamilyTag::BoundsOnly, shapes, rank_exact: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::{classify_conic_fibers, delta_epsilon};
    use crate::kodaira::{kodaira_fibers, shioda_tate_rank};

    fn t(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(Var::T, c)
    }

    fn fiber(kind: KodairaType) -> (Place, KodairaFiber) {
        let place = Place::Infinity;
        let f = KodairaFiber {
            place: place.clone(),
            kind,
            components: kind.components(),
            euler: kind.euler(),
        };
        (place, f)
    }

    #[test]
    fn direct_defect() {
        assert_eq!(defect_direct(2, 2), Ok(0));
        assert_eq!(defect_direct(3, 2), Ok(1));
        assert_eq!(defect_direct(8, 8), Ok(0));
        assert!(matches!(defect_direct(1, 2), Err(RankError::NegativeDefect { .. })));
    }

    #[test]
    fn table_rows() {
        use KodairaType::*;
        assert_eq!(defect_table(5, &[fiber(IStar(2))]), Ok(0));
        assert_eq!(defect_table(6, &[fiber(IVStar)]), Ok(1));
        assert_eq!(defect_table(4, &[fiber(I(4))]), Ok(0));
        assert_eq!(defect_table(4, &[fiber(I(6))]), Ok(1));
        assert_eq!(defect_table(5, &[fiber(IStar(1))]), Ok(1));
        assert_eq!(defect_table(7, &[fiber(IIIStar)]), Ok(0));
        assert_eq!(defect_table(9, &[fiber(IIStar)]), Ok(0));
        assert_eq!(defect_table(6, &[fiber(IStar(1))]), Ok(0));
        assert_eq!(defect_table(3, &[fiber(IV), fiber(IStar(0))]), Ok(1));
        assert_eq!(defect_table(3, &[fiber(I(3)), fiber(I(4))]), Ok(2));
        assert!(matches!(defect_table(6, &[fiber(II)]), Err(RankError::TableMismatch { .. })));
    }

    #[test]
    fn shared_places_patterns() {
        let c = CurveInput::parse("(x^2-1)*T + x^3 - x + 4").unwrap();
        assert_eq!(shared_fiber_places(&c), SharedPlaces { places: vec![Place::Infinity], doubled: true });
        let c = CurveInput::parse("(x^3-x)T + 4").unwrap();
        assert_eq!(
            shared_fiber_places(&c),
            SharedPlaces { places: vec![Place::Finite(t(&[0, 1])), Place::Infinity], doubled: false }
        );
        let c = CurveInput::parse("T^2 x^3 + x^2 + x + T + 1").unwrap();
        assert_eq!(
            shared_fiber_places(&c),
            SharedPlaces { places: vec![Place::Finite(t(&[0, 1]))], doubled: true }
        );
    }

    #[test]
    fn orbit_counts() {
        let count = |s: &str| {
            let c = CurveInput::parse(s).unwrap();
            delta_k(&classify_conic_fibers(&c.conic()).unwrap()).0
        };
        assert_eq!(count("(x^2-1)*T + x^3 - x + 4"), 2);
        assert_eq!(count("T^2 + x^3 + 1"), 2);
        assert_eq!(count("2T^2 + x^3 + 1"), 0);
        assert_eq!(count("(x^3-x)T + 4"), 3);
    }

    #[test]
    fn witnesses_and_certificates_verify() {
        let c = CurveInput::parse("2T^2 + x^3 + 1").unwrap();
        let (_, orbits) = delta_k(&classify_conic_fibers(&c.conic()).unwrap());
        for o in &orbits {
            let cert = o.square_status.certificate().expect("certificate");
            let k = crate::numfield::NumberField::new(&o.factor).unwrap();
            assert!(cert.verify(&k.element(&crate::qpoly::rat(2))));
        }
        let c = CurveInput::parse("T^2 + x^3 + 1").unwrap();
        let fibers = classify_conic_fibers(&c.conic()).unwrap();
        let (_, orbits) = delta_k(&fibers);
        for (o, f) in orbits.iter().zip(&fibers) {
            let w = o.square_status.witness().unwrap();
            assert_eq!(&w.try_mul(w).unwrap(), f.a_residue.as_ref().unwrap());
        }
    }

    #[test]
    fn bounds() {
        assert_eq!(rank_bounds(2, 0), (2, 2));
        assert_eq!(rank_bounds(2, 1), (1, 2));
        assert_eq!(rank_bounds(0, 2), (0, 0));
    }

    fn family(s: &str) -> (FamilyReport, u32, u32) {
        let c = CurveInput::parse(s).unwrap();
        let w = c.weierstrass();
        let fibers = classify_conic_fibers(&c.conic()).unwrap();
        let (delta, _) = delta_epsilon(&fibers);
        let r = shioda_tate_rank(&kodaira_fibers(&w).unwrap()).unwrap();
        let df = defect_direct(delta, r).unwrap();
        let (dk, _) = delta_k(&fibers);
        (detect_family(&c, &w, df, dk).unwrap(), df, dk)
    }

    #[test]
    fn family_rules() {
        let (f, df, dk) = family("T^2 + x^3 + 1");
        assert_eq!((df, dk), (1, 2));
        assert_eq!(f.tag, FamilyTag::ConstantLeading { mu: "1".into(), mu_square: true });
        assert_eq!(f.rank_exact, Some(1));

        let (f, df, dk) = family("(x^3-x)T + 4");
        assert_eq!((df, dk), (1, 3));
        assert_eq!(
            f.tag,
            FamilyTag::CubicPencil { lambda: "0".into(), mu: "4".into(), mu_square: true }
        );
        assert_eq!(f.rank_exact, Some(2));

        let (f, df, _) = family("(x^2-1)*T + x^3 - x + 4");
        assert_eq!(df, 0);
        assert_eq!(f.tag, FamilyTag::DefectZero);
        assert_eq!(f.rank_exact, Some(2));
        assert_eq!(f.shapes, vec![Shape::LinearInT]);

        let (f, _, _) = family("x^2 T + x^3 + 1");
        assert!(f.shapes.contains(&Shape::LinearInT));
    }

    #[test]
    fn pure_cubic_shape_detected() {
        // A = x³, B = 2(x³ + x + 1), C = −(2x³ + x + 3)
        let c = CurveInput::parse("x^3 T^2 + 2(x^3 + x + 1) T - (2x^3 + x + 3)").unwrap();
        assert!(detect_shapes(&c, &c.weierstrass()).contains(&Shape::PureCubicLeading));
    }
}
