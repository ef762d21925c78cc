//! The curve `y² = a₃(T)x³ + a₂(T)x² + a₁(T)x + a₀(T)`, its conic form
//! `y² = A(x)T² + B(x)T + C(x)`, validation, and Weierstrass invariants of
//! the scaled model `Y² = X³ + a₂X² + a₁a₃X + a₀a₃²` (`X = a₃x`, `Y = a₃y`).

pub mod parser;

use std::fmt;

use num_traits::{One, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::qpoly::{self, rat, Rational, UniPoly, Var};
pub use parser::{parse_expression, Bivariate, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("{0}")]
    Parse(ParseError),
    #[error("invalid curve: the discriminant Δ_ell(T) is identically zero")]
    DeltaEllZero,
    #[error("invalid curve: Δ_conic(x) = B² − 4AC is identically zero")]
    DeltaConicZero,
    #[error("invalid curve: all a_i(T) are divisible by the square of {0}")]
    CommonSquareFactor(String),
    #[error("invalid curve: degree bound exceeded ({0})")]
    DegreeBound(String),
    #[error("invalid curve: {0} must be a polynomial in {1} only")]
    WrongVariable(String, Var),
    #[error("invalid curve: Δ_ell(T) is a nonzero constant, the fibration has no singular fibers and is not a rational elliptic surface")]
    ConstantDiscriminant,
    #[error("invalid input: {0}")]
    Input(String),
}

impl From<ParseError> for CurveError {
    fn from(e: ParseError) -> Self {
        CurveError::Parse(e)
    }
}

/// Conic form coefficients, polynomials in `x` of degree at most 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConicForm {
    pub a: UniPoly,
    pub b: UniPoly,
    pub c: UniPoly,
}

impl ConicForm {
    /// `Δ_conic = B² − 4AC`.
    pub fn delta_conic(&self) -> Result<UniPoly, CurveError> {
        let d = &(&self.b * &self.b) - &(&self.a * &self.c).scale(&rat(4));
        if d.is_zero() {
            return Err(CurveError::DeltaConicZero);
        }
        Ok(d)
    }
}

/// A validated curve: `a[i]` is the coefficient of `xⁱ`, a polynomial in
/// `T` of degree at most 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveInput {
    a: [UniPoly; 4],
}

impl CurveInput {
    /// Validates an a-form curve.
    pub fn from_a_form(a: [UniPoly; 4]) -> Result<Self, CurveError> {
        for (i, ai) in a.iter().enumerate() {
            if !ai.is_constant() && ai.variable() != Var::T {
                return Err(CurveError::WrongVariable(format!("a{i}"), Var::T));
            }
            if ai.deg0() > 2 {
                return Err(CurveError::DegreeBound(format!("deg a{i} = {} > 2", ai.deg0())));
            }
        }
        let a = a.map(|p| p.with_var(Var::T));
        let curve = CurveInput { a };
        curve.validate()?;
        Ok(curve)
    }

    /// Validates a conic-form curve.
    pub fn from_conic(cf: &ConicForm) -> Result<Self, CurveError> {
        for (name, p) in [("A", &cf.a), ("B", &cf.b), ("C", &cf.c)] {
            if !p.is_constant() && p.variable() != Var::X {
                return Err(CurveError::WrongVariable(name.into(), Var::X));
            }
            if p.deg0() > 3 {
                return Err(CurveError::DegreeBound(format!("deg {name} = {} > 3", p.deg0())));
            }
        }
        // coefficient of xⁱTʲ: aᵢ[j] = (C, B, A)[j][i]
        let rows = [&cf.c, &cf.b, &cf.a];
        let a = std::array::from_fn(|i| {
            UniPoly::new(Var::T, rows.iter().map(|r| r.coeff(i)).collect())
        });
        Self::from_a_form(a)
    }

    /// Builds a curve from a parsed bivariate expression.
    pub fn from_bivariate(b: &Bivariate) -> Result<Self, CurveError> {
        if b.max_deg_x() > 3 {
            return Err(CurveError::DegreeBound(format!("deg_x = {} > 3", b.max_deg_x())));
        }
        if b.max_deg_t() > 2 {
            return Err(CurveError::DegreeBound(format!("deg_T = {} > 2", b.max_deg_t())));
        }
        let a = std::array::from_fn(|i| {
            let coeffs = (0..3)
                .map(|j| b.terms().get(&(i as u32, j)).cloned().unwrap_or_else(Rational::zero))
                .collect();
            UniPoly::new(Var::T, coeffs)
        });
        Self::from_a_form(a)
    }

    /// Parses an expression in the curve grammar.
    pub fn parse(src: &str) -> Result<Self, CurveError> {
        Self::from_bivariate(&parse_expression(src)?)
    }

    /// Parses a JSON object `{"a": [a0, a1, a2, a3]}` or
    /// `{"A": .., "B": .., "C": ..}` with expression strings.
    pub fn from_json(src: &str) -> Result<Self, CurveError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct AForm {
            a: [String; 4],
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct CForm {
            #[serde(rename = "A")]
            a: String,
            #[serde(rename = "B")]
            b: String,
            #[serde(rename = "C")]
            c: String,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Doc {
            A(AForm),
            C(CForm),
        }
        let doc: Doc = serde_json::from_str(src).map_err(|e| CurveError::Input(e.to_string()))?;
        match doc {
            Doc::A(f) => {
                let mut polys = Vec::with_capacity(4);
                for (i, s) in f.a.iter().enumerate() {
                    polys.push(single_var(&parse_expression(s)?, Var::T, &format!("a{i}"))?);
                }
                let a: [UniPoly; 4] = polys.try_into().expect("four entries");
                Self::from_a_form(a)
            }
            Doc::C(f) => Self::from_conic(&ConicForm {
                a: single_var(&parse_expression(&f.a)?, Var::X, "A")?,
                b: single_var(&parse_expression(&f.b)?, Var::X, "B")?,
                c: single_var(&parse_expression(&f.c)?, Var::X, "C")?,
            }),
        }
    }

    fn validate(&self) -> Result<(), CurveError> {
        let w = WeierstrassData::compute(self);
        if w.delta_ell.is_zero() {
            return Err(CurveError::DeltaEllZero);
        }
        let g = self.a.iter().fold(UniPoly::zero(Var::T), |g, ai| qpoly::gcd(&g, ai));
        if !qpoly::gcd(&g, &g.derivative()).is_constant() {
            let sq = qpoly::gcd(&g, &g.derivative());
            return Err(CurveError::CommonSquareFactor(sq.to_string()));
        }
        self.conic().delta_conic()?;
        if w.delta_ell.is_constant() {
            return Err(CurveError::ConstantDiscriminant);
        }
        Ok(())
    }

    pub fn a(&self, i: usize) -> &UniPoly {
        &self.a[i]
    }

    pub fn a_coeffs(&self) -> &[UniPoly; 4] {
        &self.a
    }

    pub fn conic(&self) -> ConicForm {
        let row = |j: usize| {
            UniPoly::new(Var::X, self.a.iter().map(|ai| ai.coeff(j)).collect())
        };
        ConicForm { a: row(2), b: row(1), c: row(0) }
    }

    pub fn weierstrass(&self) -> WeierstrassData {
        WeierstrassData::compute(self)
    }

    /// Re-parseable expression `(A)*T^2 + (B)*T + (C)`.
    pub fn to_expression(&self) -> String {
        let cf = self.conic();
        let mut parts = Vec::new();
        for (p, t) in [(&cf.a, "T^2"), (&cf.b, "T"), (&cf.c, "")] {
            if p.is_zero() {
                continue;
            }
            let one = p.is_constant() && p.coeff(0).is_one();
            parts.push(match (one, t) {
                (true, "") => "1".to_string(),
                (true, _) => t.to_string(),
                (false, "") => format!("({p})"),
                (false, _) => format!("({p})*{t}"),
            });
        }
        parts.join(" + ")
    }
}

impl fmt::Display for CurveInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = {}", self.to_expression())
    }
}

fn single_var(b: &Bivariate, var: Var, name: &str) -> Result<UniPoly, CurveError> {
    let other_present = b.terms().keys().any(|&(dx, dt)| match var {
        Var::T => dx > 0,
        Var::X => dt > 0,
    });
    if other_present {
        return Err(CurveError::WrongVariable(name.into(), var));
    }
    let deg = match var {
        Var::T => b.max_deg_t(),
        Var::X => b.max_deg_x(),
    } as usize;
    let coeffs = (0..=deg)
        .map(|k| {
            let key = match var {
                Var::T => (0, k as u32),
                Var::X => (k as u32, 0),
            };
            b.terms().get(&key).cloned().unwrap_or_else(Rational::zero)
        })
        .collect();
    Ok(UniPoly::new(var, coeffs))
}

/// Invariants of `Y² = X³ + pX² + qX + r` with `p = a₂`, `q = a₁a₃`,
/// `r = a₀a₃²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassData {
    pub p: UniPoly,
    pub q: UniPoly,
    pub r: UniPoly,
    pub c4: UniPoly,
    pub c6: UniPoly,
    pub delta_std: UniPoly,
    /// Discriminant of the monic cubic `X³ + pX² + qX + r`.
    pub delta_ell: UniPoly,
    /// `Δ_ell / a₃²`.
    pub gamma: UniPoly,
}

impl WeierstrassData {
    fn compute(c: &CurveInput) -> Self {
        let [a0, a1, a2, a3] = &c.a;
        let p = a2.clone();
        let q = a1 * a3;
        let r = &(a0 * a3) * a3;
        let k = |n: i64| rat(n);
        let b2 = p.scale(&k(4));
        let b4 = q.scale(&k(2));
        let b6 = r.scale(&k(4));
        let c4 = &(&b2 * &b2) - &b4.scale(&k(24));
        let c6 = &(&(-&(&(&b2 * &b2) * &b2)) + &(&b2 * &b4).scale(&k(36))) - &b6.scale(&k(216));
        let delta_std = (&(&(&c4 * &c4) * &c4) - &(&c6 * &c6)).scale(&qpoly::ratio(1, 1728));
        // p²q² − 4q³ − 4p³r − 27r² + 18pqr
        let pq = &p * &q;
        let delta_ell = &(&(&(&(&pq * &pq) - &(&(&q * &q) * &q).scale(&k(4)))
            - &(&(&(&p * &p) * &p) * &r).scale(&k(4)))
            - &(&r * &r).scale(&k(27)))
            + &(&pq * &r).scale(&k(18));
        let gamma = if a3.is_zero() {
            UniPoly::zero(Var::T)
        } else {
            delta_ell.div_exact(&(a3 * a3)).expect("a3² divides Δ_ell")
        };
        WeierstrassData { p, q, r, c4, c6, delta_std, delta_ell, gamma }
    }
}

/// `Δ_conic` of a conic form; errors when identically zero.
pub fn delta_conic(cf: &ConicForm) -> Result<UniPoly, CurveError> {
    cf.delta_conic()
}
