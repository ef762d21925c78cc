//! Seeded random curves and the invariant sweep run by `--self-test`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::batch::analyze_all;
use crate::conic::component_sum;
use crate::curve::{CurveError, CurveInput};
use crate::kodaira::euler_sum;
use crate::qpoly::{UniPoly, Var};
use crate::report::{Analysis, PipelineError};

pub const HEIGHT: i64 = 3;

/// Draws `aᵢ` coefficients uniformly from `{−3..3}` and keeps valid curves.
pub struct CurveGenerator {
    rng: ChaCha8Rng,
    rejected: BTreeMap<&'static str, u64>,
}

impl CurveGenerator {
    pub fn new(seed: u64) -> Self {
        CurveGenerator { rng: ChaCha8Rng::seed_from_u64(seed), rejected: BTreeMap::new() }
    }

    fn draw(&mut self) -> [UniPoly; 4] {
        std::array::from_fn(|_| {
            let c: Vec<i64> = (0..3).map(|_| self.rng.gen_range(-HEIGHT..=HEIGHT)).collect();
            UniPoly::from_ints(Var::T, &c)
        })
    }

    pub fn next_curve(&mut self) -> CurveInput {
        loop {
            match CurveInput::from_a_form(self.draw()) {
                Ok(c) => return c,
                Err(e) => *self.rejected.entry(rejection_reason(&e)).or_default() += 1,
            }
        }
    }

    pub fn curves(&mut self, n: usize) -> Vec<CurveInput> {
        (0..n).map(|_| self.next_curve()).collect()
    }

    pub fn rejected(&self) -> &BTreeMap<&'static str, u64> {
        &self.rejected
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

fn rejection_reason(e: &CurveError) -> &'static str {
    match e {
        CurveError::DeltaEllZero => "delta_ell = 0",
        CurveError::DeltaConicZero => "delta_conic = 0",
        CurveError::CommonSquareFactor(_) => "common square factor",
        CurveError::ConstantDiscriminant => "constant discriminant",
        _ => "other",
    }
}

/// Invariants asserted on every analyzed curve; returns the first violation.
pub fn check_invariants(a: &Analysis) -> Result<(), String> {
    let cs = component_sum(&a.conic_fibers);
    if cs != 8 {
        return Err(format!("conic component sum {cs} != 8"));
    }
    let es = euler_sum(&a.kodaira_fibers);
    if es != 12 {
        return Err(format!("Euler sum {es} != 12"));
    }
    let d = &a.rank.defect;
    if d.df_direct > 2 {
        return Err(format!("defect {} > 2", d.df_direct));
    }
    if a.rank.delta < a.rank.rank_geometric {
        return Err(format!("delta {} < r {}", a.rank.delta, a.rank.rank_geometric));
    }
    if let Some(t) = d.df_table {
        if t != d.df_direct {
            return Err(format!("table defect {t} != direct defect {}", d.df_direct));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SelfTestOutcome {
    pub output: String,
    pub passed: bool,
}

/// Runs the pipeline on `n` random valid curves from `seed`.
pub fn self_test(n: usize, seed: u64) -> SelfTestOutcome {
    let mut out = String::new();
    if n == 0 {
        return SelfTestOutcome { output: out, passed: true };
    }
    let mut gen = CurveGenerator::new(seed);
    let curves = gen.curves(n);
    let results = analyze_all(&curves, false);
    let mut df_hist: BTreeMap<u32, u32> = BTreeMap::new();
    let mut fam_hist: BTreeMap<String, u32> = BTreeMap::new();
    let mut first_failure: Option<(usize, String, String)> = None;
    for (i, (c, r)) in curves.iter().zip(&results).enumerate() {
        let checked: Result<&Analysis, String> = match r {
            Ok(a) => check_invariants(a).map(|_| a),
            Err(e @ PipelineError::Validation(_)) | Err(e @ PipelineError::Consistency(_)) => Err(e.to_string()),
        };
        match checked {
            Ok(a) => {
                let rk = a.rank_exact().map_or("?".to_string(), |r| r.to_string());
                let tag = a.rank.family.tag.to_string();
                let _ = writeln!(
                    out,
                    "{i:>5}  Df={} delta={} r={} delta_k={} r_k={} family={tag}  y^2 = {}",
                    a.defect(),
                    a.delta(),
                    a.rank.rank_geometric,
                    a.rank.delta_k,
                    rk,
                    c.to_expression()
                );
                *df_hist.entry(a.defect()).or_default() += 1;
                let key = tag.split(' ').next().unwrap_or("").to_string();
                *fam_hist.entry(key).or_default() += 1;
            }
            Err(msg) => {
                let _ = writeln!(out, "{i:>5}  FAIL {msg}  y^2 = {}", c.to_expression());
                if first_failure.is_none() {
                    first_failure = Some((i, c.to_expression(), msg));
                }
            }
        }
    }
    let rejected: u64 = gen.rejected().values().sum();
    let _ = writeln!(out, "\ncurves: {n} valid, {rejected} rejected");
    for (why, k) in gen.rejected() {
        let _ = writeln!(out, "  rejected ({why}): {k}");
    }
    let _ = writeln!(out, "defect histogram:");
    for (d, k) in &df_hist {
        let _ = writeln!(out, "  Df={d}: {k}");
    }
    let _ = writeln!(out, "family histogram:");
    for (f, k) in &fam_hist {
        let _ = writeln!(out, "  {f}: {k}");
    }
    let passed = first_failure.is_none();
    match first_failure {
        Some((i, expr, msg)) => {
            let _ = writeln!(out, "FAILED at curve {i}: {msg}");
            let _ = writeln!(out, "rerun: conicrank --expr \"{expr}\"");
        }
        None => {
            let _ = writeln!(out, "all invariants hold");
        }
    }
    SelfTestOutcome { output: out, passed }
}
