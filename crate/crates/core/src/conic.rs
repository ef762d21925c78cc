//! Singular fibers of the conic bundle obtained by projecting
//! `y² = A(x)T² + B(x)T + C(x)` to the `x`-line.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{ConicForm, CurveError};
use crate::kodaira::Place;
use crate::numfield::{reduce_mod, NFElement, NumberField};
use crate::qpoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConicError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("component sum Σ deg·(n − 1) = {0}, expected 8")]
    ComponentSumViolation(u32),
    #[error("D-kind fiber at {0} has B(θ) ≠ 0")]
    DKindB(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConicKind {
    A,
    D,
}

impl fmt::Display for ConicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConicKind::A => "A",
            ConicKind::D => "D",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConicFiber {
    /// Monic irreducible factor of `Δ_conic` in `x`, or infinity.
    pub location: Place,
    pub kind: ConicKind,
    pub n: u32,
    pub degree: u32,
    /// `A(θ)` and `C(θ)` in `ℚ(θ)`; absent at infinity.
    pub a_residue: Option<NFElement>,
    pub c_residue: Option<NFElement>,
}

impl ConicFiber {
    pub fn label(&self) -> String {
        format!("{}{}", self.kind, self.n)
    }

    /// The residue field `ℚ[x]/(factor)` of a finite fiber.
    pub fn field(&self) -> Option<&NumberField> {
        self.a_residue.as_ref().map(NFElement::field)
    }
}

/// One fiber per irreducible factor of `Δ_conic`, followed by the fiber at
/// infinity.
pub fn classify_conic_fibers(cf: &ConicForm) -> Result<Vec<ConicFiber>, ConicError> {
    let delta = cf.delta_conic()?;
    let factored = qpoly::factor(&delta).expect("Δ_conic is nonzero");
    let classify = |(f, mult): &(qpoly::UniPoly, u32)| -> Result<ConicFiber, ConicError> {
        let k = NumberField::from_irreducible(f);
        let a = reduce_mod(&cf.a, &k);
        let c = reduce_mod(&cf.c, &k);
        let kind = if a.is_zero() && c.is_zero() { ConicKind::D } else { ConicKind::A };
        if kind == ConicKind::D && !reduce_mod(&cf.b, &k).is_zero() {
            return Err(ConicError::DKindB(f.to_string()));
        }
        Ok(ConicFiber {
            location: Place::Finite(f.clone()),
            kind,
            n: mult + 1,
            degree: f.deg0() as u32,
            a_residue: Some(a),
            c_residue: Some(c),
        })
    };
    #[cfg(feature = "parallel")]
    let fibers: Result<Vec<_>, _> = {
        use rayon::prelude::*;
        factored.factors.par_iter().map(classify).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let fibers: Result<Vec<_>, _> = factored.factors.iter().map(classify).collect();
    let mut fibers = fibers?;
    fibers.push(ConicFiber {
        location: Place::Infinity,
        kind: ConicKind::D,
        n: 9 - delta.deg0() as u32,
        degree: 1,
        a_residue: None,
        c_residue: None,
    });
    Ok(fibers)
}

/// `(δ, ε)`: geometric counts of A-kind and D-kind fibers.
pub fn delta_epsilon(fibers: &[ConicFiber]) -> (u32, u32) {
    let count = |k| fibers.iter().filter(|f| f.kind == k).map(|f| f.degree).sum();
    (count(ConicKind::A), count(ConicKind::D))
}

pub fn component_sum(fibers: &[ConicFiber]) -> u32 {
    fibers.iter().map(|f| f.degree * (f.n - 1)).sum()
}

/// `Σ deg·(n − 1) = 8`.
pub fn component_sum_check(fibers: &[ConicFiber]) -> Result<(), ConicError> {
    match component_sum(fibers) {
        8 => Ok(()),
        s => Err(ConicError::ComponentSumViolation(s)),
    }
}
