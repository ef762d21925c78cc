//! Command-line configuration and entry points.

use std::path::PathBuf;

use clap::{ArgGroup, Parser, ValueEnum};

use crate::curve::{CurveError, CurveInput};
use crate::report::{analyze, Report};
use crate::selftest::self_test;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Rank bounds for elliptic curves y^2 = a3 x^3 + a2 x^2 + a1 x + a0 over Q(T)
/// with deg ai <= 2, via the induced conic bundle.
#[derive(Debug, Clone, Parser)]
#[command(name = "conicrank", version)]
#[command(group(ArgGroup::new("source").args(["input", "expr", "self_test"]).required(true)))]
pub struct RunConfig {
    /// File holding one curve expression or a JSON object {"a": [...]} / {"A", "B", "C"}
    #[arg(long, conflicts_with = "expr")]
    pub input: Option<PathBuf>,
    /// Curve expression, e.g. "(x^2-1)*T + x^3 - x + 4"
    #[arg(long)]
    pub expr: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Construct the conic-bundle points and check their identities
    #[arg(long)]
    pub verify_points: bool,
    /// Run the invariant sweep on N random curves instead of a single curve
    #[arg(long, value_name = "N")]
    pub self_test: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Process outcome: exit code plus what to print.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn fail(code: i32, msg: String) -> RunOutput {
    RunOutput { code, stdout: String::new(), stderr: msg }
}

/// Reads a curve from a file: JSON when it starts with `{`, else an expression.
pub fn read_curve_file(path: &std::path::Path) -> Result<CurveInput, CurveError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| CurveError::Input(format!("{}: {e}", path.display())))?;
    let trimmed = src.trim();
    if trimmed.starts_with('{') {
        CurveInput::from_json(trimmed)
    } else {
        CurveInput::parse(trimmed)
    }
}

pub fn run(cfg: &RunConfig) -> RunOutput {
    if let Some(n) = cfg.self_test {
        let o = self_test(n, cfg.seed);
        return RunOutput { code: if o.passed { 0 } else { 1 }, stdout: o.output, stderr: String::new() };
    }
    let curve = match (&cfg.input, &cfg.expr) {
        (Some(p), _) => read_curve_file(p),
        (None, Some(e)) => CurveInput::parse(e),
        (None, None) => return fail(2, "error: no input given".into()),
    };
    let curve = match curve {
        Ok(c) => c,
        Err(e) => return fail(2, format!("error: {e}\n")),
    };
    let analysis = match analyze(&curve, cfg.verify_points) {
        Ok(a) => a,
        Err(e) => return fail(e.exit_code(), format!("error: {e}\n")),
    };
    let report = Report::from_analysis(&analysis);
    let stdout = match cfg.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    };
    let failed: Vec<String> = analysis
        .failed_verifications()
        .map(|v| format!("error: verification failed: {} {}: {}\n", v.check, v.subject, v.detail))
        .collect();
    if failed.is_empty() {
        RunOutput { code: 0, stdout, stderr: String::new() }
    } else {
        RunOutput { code: 3, stdout, stderr: failed.concat() }
    }
}
