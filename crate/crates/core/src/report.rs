//! The full analysis pipeline and its text and JSON reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conic::{
    classify_conic_fibers, component_sum_check, delta_epsilon, ConicError, ConicFiber, ConicKind,
};
use crate::curve::{CurveError, CurveInput};
use crate::kodaira::{euler_check, kodaira_fibers, shioda_tate_rank, KodairaError, KodairaFiber, Place};
use crate::numfield::NFElement;
use crate::points::{construct_point, verify_linear_relation, verify_two_torsion, ConstructedPoint, PointError};
use crate::qpoly::{self, FactoredPoly, Rational, UniPoly};
use crate::rank::{
    defect_direct, defect_table, delta_k, detect_family, rank_bounds, shared_fiber_places,
    shared_fibers, DefectReport, FamilyTag, RankError, RankReport,
};

/// Validation failures (exit 2) versus violated internal invariants (exit 3).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Validation(#[from] CurveError),
    #[error("consistency violation: {0}")]
    Consistency(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Validation(_) => 2,
            PipelineError::Consistency(_) => 3,
        }
    }
}

impl From<ConicError> for PipelineError {
    fn from(e: ConicError) -> Self {
        match e {
            ConicError::Curve(c) => PipelineError::Validation(c),
            other => PipelineError::Consistency(other.to_string()),
        }
    }
}

impl From<KodairaError> for PipelineError {
    fn from(e: KodairaError) -> Self {
        PipelineError::Consistency(e.to_string())
    }
}

impl From<RankError> for PipelineError {
    fn from(e: RankError) -> Self {
        PipelineError::Consistency(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub check: String,
    pub subject: String,
    pub status: CheckStatus,
    pub detail: String,
}

/// Everything computed for one curve.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub curve: CurveInput,
    pub delta_conic: FactoredPoly,
    pub conic_fibers: Vec<ConicFiber>,
    pub kodaira_fibers: Vec<KodairaFiber>,
    pub rank: RankReport,
    pub verifications: Vec<Verification>,
}

impl Analysis {
    pub fn delta(&self) -> u32 {
        self.rank.delta
    }
    pub fn defect(&self) -> u32 {
        self.rank.defect.df_direct
    }
    pub fn rank_exact(&self) -> Option<u32> {
        self.rank.family.rank_exact
    }
    pub fn g_infinity(&self) -> &ConicFiber {
        self.conic_fibers.last().expect("fiber at infinity")
    }
    pub fn failed_verifications(&self) -> impl Iterator<Item = &Verification> {
        self.verifications.iter().filter(|v| v.status == CheckStatus::Fail)
    }
}

/// Runs every stage with its consistency checks.
pub fn analyze(c: &CurveInput, verify_points: bool) -> Result<Analysis, PipelineError> {
    let cf = c.conic();
    let delta_conic = qpoly::factor(&cf.delta_conic()?).expect("nonzero");
    let conic = classify_conic_fibers(&cf)?;
    component_sum_check(&conic)?;
    let w = c.weierstrass();
    let kodaira = kodaira_fibers(&w)?;
    euler_check(&kodaira)?;
    let r = shioda_tate_rank(&kodaira)?;
    let (delta, epsilon) = delta_epsilon(&conic);
    let df = defect_direct(delta, r)?;
    if df > 2 {
        return Err(PipelineError::Consistency(format!("defect {df} exceeds 2")));
    }
    let g_inf_n = conic.last().expect("fiber at infinity").n;
    let shared = shared_fibers(&shared_fiber_places(c), g_inf_n, &kodaira)?;
    let df_table = defect_table(g_inf_n, &shared)?;
    if df_table != df {
        return Err(PipelineError::Consistency(format!(
            "defect from fiber table {df_table} differs from δ − r = {df}"
        )));
    }
    let (dk, orbits) = delta_k(&conic);
    let bounds = rank_bounds(dk, df);
    let family = detect_family(c, &w, df, dk)?;
    if let Some(rk) = family.rank_exact {
        if rk < bounds.0 || rk > bounds.1 {
            return Err(PipelineError::Consistency(format!(
                "exact rank {rk} outside bounds [{}, {}]",
                bounds.0, bounds.1
            )));
        }
    }
    let mut notes = Vec::new();
    if family.tag == FamilyTag::BoundsOnly {
        notes.push(format!("no family rule applies; rank over Q(T) lies in [{}, {}]", bounds.0, bounds.1));
    }
    let rank = RankReport {
        delta,
        epsilon,
        rank_geometric: r,
        defect: DefectReport {
            df_direct: df,
            df_table: Some(df_table),
            consistent: true,
            shared_places: shared,
        },
        delta_k: dk,
        orbits,
        bounds,
        family,
        notes,
    };
    let verifications = if verify_points { run_verifications(c, &conic, &rank) } else { Vec::new() };
    Ok(Analysis { curve: c.clone(), delta_conic, conic_fibers: conic, kodaira_fibers: kodaira, rank, verifications })
}

fn status(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn run_verifications(c: &CurveInput, fibers: &[ConicFiber], rank: &RankReport) -> Vec<Verification> {
    let mut out = Vec::new();
    for f in fibers {
        let Place::Finite(q) = &f.location else { continue };
        match f.kind {
            ConicKind::A => {
                let v = match (construct_point(c, q, false), construct_point(c, q, true)) {
                    (Ok(p), Ok(m)) => {
                        let inverse = match (&p, &m) {
                            (ConstructedPoint::Base(e, p), ConstructedPoint::Base(_, m)) => e.neg(p) == *m,
                            (ConstructedPoint::Tower(e, p), ConstructedPoint::Tower(_, m)) => e.neg(p) == *m,
                            _ => false,
                        };
                        let field = if p.in_tower() { "Q(theta)(sqrt)" } else { "Q(theta)" };
                        Verification {
                            check: "point-on-curve".into(),
                            subject: q.to_string(),
                            status: status(p.on_curve() && m.on_curve() && inverse),
                            detail: format!("P over {field}(T); opposite root gives -P: {inverse}"),
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => Verification {
                        check: "point-on-curve".into(),
                        subject: q.to_string(),
                        status: CheckStatus::Fail,
                        detail: e.to_string(),
                    },
                };
                out.push(v);
            }
            ConicKind::D => {
                let (st, detail) = match verify_two_torsion(c, f) {
                    Ok(ok) => (status(ok), "(a3*theta, 0) doubles to O".to_string()),
                    Err(e) => (CheckStatus::Fail, e.to_string()),
                };
                out.push(Verification { check: "two-torsion".into(), subject: q.to_string(), status: st, detail });
            }
        }
    }
    // the relation among the P_theta is predicted only for these rules
    let expected = match &rank.family.tag {
        FamilyTag::DefectZero => Some(false),
        FamilyTag::ConstantLeading { .. } | FamilyTag::CubicPencil { .. } => Some(true),
        FamilyTag::BoundsOnly => None,
    };
    if let Some(expected) = expected {
        let triple = matches!(rank.family.tag, FamilyTag::CubicPencil { .. });
        let v = match verify_linear_relation(c, fibers, triple) {
            Ok(rc) => Verification {
                check: "linear-relation".into(),
                subject: "sum n_theta P_theta".into(),
                status: status(rc.holds() == expected),
                detail: format!(
                    "weighted sum is O: {}; P1+P2+P3 = O: {}; relation expected: {expected}",
                    rc.weighted_sum_zero,
                    rc.triple_sum_zero.map_or("not checked".to_string(), |b| b.to_string())
                ),
            },
            Err(PointError::NotApplicable(why)) => Verification {
                check: "linear-relation".into(),
                subject: "sum n_theta P_theta".into(),
                status: CheckStatus::NotApplicable,
                detail: why,
            },
            Err(e) => Verification {
                check: "linear-relation".into(),
                subject: "sum n_theta P_theta".into(),
                status: CheckStatus::Fail,
                detail: e.to_string(),
            },
        };
        out.push(v);
    }
    out
}

/// A polynomial as `[numerator, denominator]` pairs, lowest degree first.
pub type JsonPoly = Vec<[String; 2]>;

pub fn json_poly(p: &UniPoly) -> JsonPoly {
    p.coeffs().iter().map(json_rational).collect()
}

fn json_rational(r: &Rational) -> [String; 2] {
    [r.numer().to_string(), r.denom().to_string()]
}

fn json_element(e: &NFElement) -> JsonPoly {
    json_poly(e.rep())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonFactor {
    pub factor: JsonPoly,
    pub text: String,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonCurve {
    pub expression: String,
    pub a: Vec<JsonPoly>,
    #[serde(rename = "A")]
    pub conic_a: JsonPoly,
    #[serde(rename = "B")]
    pub conic_b: JsonPoly,
    #[serde(rename = "C")]
    pub conic_c: JsonPoly,
    pub delta_conic_unit: [String; 2],
    pub delta_conic_factors: Vec<JsonFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonConicFiber {
    pub location: String,
    pub factor: Option<JsonPoly>,
    pub kind: ConicKind,
    pub n: u32,
    pub degree: u32,
    pub a_residue: Option<JsonPoly>,
    pub c_residue: Option<JsonPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonKodairaFiber {
    pub place: String,
    pub factor: Option<JsonPoly>,
    pub degree: u32,
    #[serde(rename = "type")]
    pub kind: String,
    pub components: u32,
    pub euler: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonShared {
    pub place: String,
    #[serde(rename = "type")]
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonDefect {
    pub direct: u32,
    pub table: Option<u32>,
    pub consistent: bool,
    pub g_infinity: String,
    pub shared: Vec<JsonShared>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonCertificate {
    pub prime: u64,
    pub root: u64,
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonOrbit {
    pub factor: JsonPoly,
    pub text: String,
    pub kind: ConicKind,
    pub status: String,
    pub counted: bool,
    pub witness: Option<JsonPoly>,
    pub certificate: Option<JsonCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonFamily {
    #[serde(flatten)]
    pub tag: FamilyTag,
    pub shapes: Vec<String>,
}

/// The machine-readable report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub curve: JsonCurve,
    pub conic_fibers: Vec<JsonConicFiber>,
    pub kodaira_fibers: Vec<JsonKodairaFiber>,
    pub delta: u32,
    pub epsilon: u32,
    pub rank_geometric: u32,
    pub defect: JsonDefect,
    pub delta_k: u32,
    pub orbits: Vec<JsonOrbit>,
    pub bounds: [u32; 2],
    pub family: JsonFamily,
    pub rank_exact: Option<u32>,
    pub notes: Vec<String>,
    pub verifications: Vec<Verification>,
}

fn place_factor(p: &Place) -> Option<JsonPoly> {
    match p {
        Place::Finite(q) => Some(json_poly(q)),
        Place::Infinity => None,
    }
}

impl Report {
    pub fn from_analysis(a: &Analysis) -> Report {
        let c = &a.curve;
        let cf = c.conic();
        let curve = JsonCurve {
            expression: c.to_expression(),
            a: c.a_coeffs().iter().map(json_poly).collect(),
            conic_a: json_poly(&cf.a),
            conic_b: json_poly(&cf.b),
            conic_c: json_poly(&cf.c),
            delta_conic_unit: json_rational(&a.delta_conic.unit),
            delta_conic_factors: a
                .delta_conic
                .factors
                .iter()
                .map(|(f, m)| JsonFactor { factor: json_poly(f), text: f.to_string(), multiplicity: *m })
                .collect(),
        };
        let conic_fibers = a
            .conic_fibers
            .iter()
            .map(|f| JsonConicFiber {
                location: f.location.to_string(),
                factor: place_factor(&f.location),
                kind: f.kind,
                n: f.n,
                degree: f.degree,
                a_residue: f.a_residue.as_ref().map(json_element),
                c_residue: f.c_residue.as_ref().map(json_element),
            })
            .collect();
        let kodaira_fibers = a
            .kodaira_fibers
            .iter()
            .map(|f| JsonKodairaFiber {
                place: f.place.to_string(),
                factor: place_factor(&f.place),
                degree: f.place.degree(),
                kind: f.kind.to_string(),
                components: f.components,
                euler: f.euler,
            })
            .collect();
        let r = &a.rank;
        let defect = JsonDefect {
            direct: r.defect.df_direct,
            table: r.defect.df_table,
            consistent: r.defect.consistent,
            g_infinity: a.g_infinity().label(),
            shared: r
                .defect
                .shared_places
                .iter()
                .map(|(p, f)| JsonShared { place: p.to_string(), kind: f.kind.to_string() })
                .collect(),
        };
        let orbits = r
            .orbits
            .iter()
            .map(|o| JsonOrbit {
                factor: json_poly(&o.factor),
                text: o.factor.to_string(),
                kind: o.fiber_kind,
                status: o.square_status.name().into(),
                counted: o.counted,
                witness: o.square_status.witness().map(json_element),
                certificate: o.square_status.certificate().map(|c| JsonCertificate {
                    prime: c.prime,
                    root: c.root,
                    residue: c.residue,
                }),
            })
            .collect();
        Report {
            curve,
            conic_fibers,
            kodaira_fibers,
            delta: r.delta,
            epsilon: r.epsilon,
            rank_geometric: r.rank_geometric,
            defect,
            delta_k: r.delta_k,
            orbits,
            bounds: [r.bounds.0, r.bounds.1],
            family: JsonFamily {
                tag: r.family.tag.clone(),
                shapes: r.family.shapes.iter().map(|s| s.to_string()).collect(),
            },
            rank_exact: r.family.rank_exact,
            notes: r.notes.clone(),
            verifications: a.verifications.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Human-readable rendering of the same content as the JSON report.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.curve;
        let _ = writeln!(s, "curve: y^2 = {}", c.expression);
        let factors: Vec<String> = c
            .delta_conic_factors
            .iter()
            .map(|f| if f.multiplicity == 1 { format!("({})", f.text) } else { format!("({})^{}", f.text, f.multiplicity) })
            .collect();
        let _ = writeln!(s, "delta_conic = {} * {}", rational_text(&c.delta_conic_unit), factors.join(" * "));
        let w = self
            .conic_fibers
            .iter()
            .map(|f| f.location.len())
            .chain(self.kodaira_fibers.iter().map(|f| f.place.len()))
            .chain(self.orbits.iter().map(|o| o.text.len()))
            .max()
            .unwrap_or(0)
            .max(8);
        let _ = writeln!(s, "\nconic fibers:");
        let _ = writeln!(s, "  {:<w$}  {:>4} {:>3} {:>6}", "location", "kind", "n", "degree");
        for f in &self.conic_fibers {
            let _ = writeln!(s, "  {:<w$}  {:>4} {:>3} {:>6}", f.location, f.kind, f.n, f.degree);
        }
        let _ = writeln!(s, "\nkodaira fibers:");
        let _ = writeln!(s, "  {:<w$}  {:>5} {:>3} {:>5} {:>6}", "place", "type", "m", "euler", "degree");
        for f in &self.kodaira_fibers {
            let _ = writeln!(s, "  {:<w$}  {:>5} {:>3} {:>5} {:>6}", f.place, f.kind, f.components, f.euler, f.degree);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "delta = {}", self.delta);
        let _ = writeln!(s, "epsilon = {}", self.epsilon);
        let _ = writeln!(s, "rank over Qbar(T) = {}", self.rank_geometric);
        let d = &self.defect;
        let table = d.table.map_or("n/a".to_string(), |t| t.to_string());
        let _ = writeln!(s, "defect = {} (delta - r), {} (fiber table)", d.direct, table);
        let shared: Vec<String> = d.shared.iter().map(|x| format!("{} at {}", x.kind, x.place)).collect();
        let _ = writeln!(s, "G_inf = {}; shared fibers: {}", d.g_infinity, shared.join(", "));
        let _ = writeln!(s, "delta_k = {}", self.delta_k);
        for o in &self.orbits {
            let mark = if o.counted { "counted" } else { "not counted" };
            let _ = writeln!(s, "  {:<w$}  {} {:<20} {}", o.text, o.kind, o.status, mark);
        }
        let _ = writeln!(s, "bounds: {} <= r_k <= {}", self.bounds[0], self.bounds[1]);
        let mut fam = family_text(&self.family.tag);
        if !self.family.shapes.is_empty() {
            fam.push_str(&format!(" [shapes: {}]", self.family.shapes.join(", ")));
        }
        let _ = writeln!(s, "family: {fam}");
        match self.rank_exact {
            Some(r) => {
                let _ = writeln!(s, "r_k = {r}");
            }
            None => {
                let _ = writeln!(s, "r_k undetermined");
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        if !self.verifications.is_empty() {
            let _ = writeln!(s, "\nverifications:");
            for v in &self.verifications {
                let st = match v.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::NotApplicable => "n/a",
                };
                let _ = writeln!(s, "  [{st}] {} {}: {}", v.check, v.subject, v.detail);
            }
        }
        s
    }
}

fn rational_text(r: &[String; 2]) -> String {
    if r[1] == "1" {
        r[0].clone()
    } else {
        format!("{}/{}", r[0], r[1])
    }
}

fn family_text(tag: &FamilyTag) -> String {
    tag.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_pipeline() {
        let c = CurveInput::parse("(x^2-1)*T + x^3 - x + 4").unwrap();
        let a = analyze(&c, true).unwrap();
        assert_eq!((a.delta(), a.rank.rank_geometric, a.defect(), a.rank.delta_k), (2, 2, 0, 2));
        assert_eq!(a.rank_exact(), Some(2));
        assert_eq!(a.failed_verifications().count(), 0, "{:?}", a.verifications);
    }

    #[test]
    fn json_round_trip() {
        for src in ["T^2 + x^3 + 1", "(x^3-x)T + 4", "2T^2 + x^3 + 1"] {
            let c = CurveInput::parse(src).unwrap();
            let r = Report::from_analysis(&analyze(&c, true).unwrap());
            let j = r.to_json();
            let back = Report::from_json(&j).unwrap();
            assert_eq!(back, r);
            assert_eq!(back.to_json(), j);
        }
    }

    #[test]
    fn text_mentions_numbers() {
        let c = CurveInput::parse("T^2 + x^3 + 1").unwrap();
        let t = Report::from_analysis(&analyze(&c, false).unwrap()).to_text();
        assert!(t.contains("delta = 3"));
        assert!(t.contains("defect = 1 (delta - r), 1 (fiber table)"));
        assert!(t.contains("r_k = 1"));
    }

    #[test]
    fn error_codes() {
        let e = PipelineError::Validation(CurveError::DeltaEllZero);
        assert_eq!(e.exit_code(), 2);
        assert_eq!(PipelineError::Consistency("x".into()).exit_code(), 3);
    }
}
