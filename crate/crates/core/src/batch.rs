//! Running the pipeline over many curves. Results keep input order.

use crate::curve::CurveInput;
use crate::report::{analyze, Analysis, PipelineError};

/// Data-parallel when the `parallel` feature is on, sequential otherwise.
pub fn analyze_all(curves: &[CurveInput], verify_points: bool) -> Vec<Result<Analysis, PipelineError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        curves.par_iter().map(|c| analyze(c, verify_points)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    analyze_all_sequential(curves, verify_points)
}

pub fn analyze_all_sequential(
    curves: &[CurveInput],
    verify_points: bool,
) -> Vec<Result<Analysis, PipelineError>> {
    curves.iter().map(|c| analyze(c, verify_points)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selftest::CurveGenerator;

    #[test]
    fn both_paths_agree_in_order() {
        let curves = CurveGenerator::new(5).curves(12);
        let summary = |rs: Vec<Result<Analysis, PipelineError>>| -> Vec<_> {
            rs.into_iter()
                .map(|r| r.map(|a| (a.curve.to_expression(), a.delta(), a.defect(), a.rank.delta_k)))
                .collect()
        };
        let par = summary(analyze_all(&curves, false));
        let seq = summary(analyze_all_sequential(&curves, false));
        assert_eq!(par, seq);
        let order: Vec<_> = curves.iter().map(|c| c.to_expression()).collect();
        let got: Vec<_> = par.iter().map(|r| r.as_ref().unwrap().0.clone()).collect();
        assert_eq!(got, order);
    }
}
