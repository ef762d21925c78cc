//! Singular fibers of the elliptic fibration: bad places of ℙ¹, local
//! valuations of `c4`, `c6`, `Δ`, the characteristic-zero Kodaira table, and
//! the Shioda–Tate rank of a rational elliptic surface.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::WeierstrassData;
use crate::qpoly::{self, canonical_cmp, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KodairaError {
    #[error("unclassifiable valuation triple (v_c4, v_c6, v_Δ) = ({0}, {1}, {2}) at {3}")]
    UnclassifiableTriple(Valuation, Valuation, Valuation, String),
    #[error("Shioda–Tate gives negative rank: component sum {0} exceeds 8")]
    NegativeRank(u32),
    #[error("Euler number check failed: Σ deg·e(F_v) = {0}, expected 12")]
    RationalityViolation(u32),
    #[error("model at {0} did not become minimal after {1} steps")]
    Minimalization(String, u32),
}

/// A place of `ℚ(T)`: a monic irreducible polynomial in `T`, or infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Place {
    Finite(UniPoly),
    Infinity,
}

impl Place {
    /// Number of geometric points over the place.
    pub fn degree(&self) -> u32 {
        match self {
            Place::Finite(q) => q.deg0() as u32,
            Place::Infinity => 1,
        }
    }

    /// Order: finite places by [`canonical_cmp`], infinity last.
    pub fn cmp_order(&self, o: &Place) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, o) {
            (Place::Finite(a), Place::Finite(b)) => canonical_cmp(a, b),
            (Place::Finite(_), Place::Infinity) => Less,
            (Place::Infinity, Place::Finite(_)) => Greater,
            (Place::Infinity, Place::Infinity) => Equal,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(q) => write!(f, "{q}"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

/// A discrete valuation value; `Infinite` is the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    fn at_least(self, n: u32) -> bool {
        match self {
            Valuation::Finite(v) => v >= n,
            Valuation::Infinite => true,
        }
    }

    fn minus(self, n: u32) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v - n),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalData {
    pub place: Place,
    pub v_c4: Valuation,
    pub v_c6: Valuation,
    pub v_delta: Valuation,
    /// Number of `(4, 6, 12)` subtractions performed.
    pub minimalization_steps: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KodairaType {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaType {
    /// Number of geometric irreducible components `m_v`.
    pub fn components(self) -> u32 {
        match self {
            KodairaType::I(n) => n,
            KodairaType::II => 1,
            KodairaType::III => 2,
            KodairaType::IV => 3,
            KodairaType::IStar(n) => n + 5,
            KodairaType::IVStar => 7,
            KodairaType::IIIStar => 8,
            KodairaType::IIStar => 9,
        }
    }

    /// Euler number of the fiber.
    pub fn euler(self) -> u32 {
        match self {
            KodairaType::I(n) => n,
            KodairaType::II => 2,
            KodairaType::III => 3,
            KodairaType::IV => 4,
            KodairaType::IStar(n) => n + 6,
            KodairaType::IVStar => 8,
            KodairaType::IIIStar => 9,
            KodairaType::IIStar => 10,
        }
    }
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::II => f.write_str("II"),
            KodairaType::III => f.write_str("III"),
            KodairaType::IV => f.write_str("IV"),
            KodairaType::IStar(n) => write!(f, "I{n}*"),
            KodairaType::IVStar => f.write_str("IV*"),
            KodairaType::IIIStar => f.write_str("III*"),
            KodairaType::IIStar => f.write_str("II*"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KodairaFiber {
    pub place: Place,
    pub kind: KodairaType,
    pub components: u32,
    pub euler: u32,
}

/// Irreducible factors of `Δ_std`, then infinity when `deg Δ_std < 12`.
pub fn bad_places(w: &WeierstrassData) -> Vec<Place> {
    let mut out: Vec<Place> = qpoly::factor(&w.delta_std)
        .expect("Δ_std is nonzero for valid curves")
        .factors
        .into_iter()
        .map(|(f, _)| Place::Finite(f))
        .collect();
    if w.delta_std.deg0() < 12 {
        out.push(Place::Infinity);
    }
    out
}

fn valuation_at(f: &UniPoly, place: &Place, weight: u32) -> Valuation {
    if f.is_zero() {
        return Valuation::Infinite;
    }
    match place {
        Place::Finite(q) => Valuation::Finite(f.multiplicity(q).expect("nonzero")),
        Place::Infinity => {
            let d = f.deg0() as u32;
            assert!(d <= weight, "degree {d} exceeds weighted bound {weight}");
            Valuation::Finite(weight - d)
        }
    }
}

/// Valuations of `c4`, `c6`, `Δ` at `place`, minimalized.
pub fn local_valuations(w: &WeierstrassData, place: &Place) -> Result<LocalData, KodairaError> {
    let mut v_c4 = valuation_at(&w.c4, place, 4);
    let mut v_c6 = valuation_at(&w.c6, place, 6);
    let mut v_delta = valuation_at(&w.delta_std, place, 12);
    let mut steps = 0;
    while v_c4.at_least(4) && v_c6.at_least(6) && v_delta.at_least(12) {
        if steps >= 2 {
            return Err(KodairaError::Minimalization(place.to_string(), steps));
        }
        v_c4 = v_c4.minus(4);
        v_c6 = v_c6.minus(6);
        v_delta = v_delta.minus(12);
        steps += 1;
    }
    Ok(LocalData { place: place.clone(), v_c4, v_c6, v_delta, minimalization_steps: steps })
}

/// Characteristic-zero Kodaira type of a minimal valuation triple.
pub fn classify_kodaira(d: &LocalData) -> Result<KodairaFiber, KodairaError> {
    use Valuation::Finite as F;
    let unclassifiable =
        || KodairaError::UnclassifiableTriple(d.v_c4, d.v_c6, d.v_delta, d.place.to_string());
    let vd = d.v_delta.finite().filter(|&v| v >= 1).ok_or_else(unclassifiable)?;
    let kind = if d.v_c4 == F(0) {
        KodairaType::I(vd)
    } else if d.v_c6 == F(1) {
        KodairaType::II
    } else if d.v_c4 == F(1) {
        KodairaType::III
    } else if d.v_c6 == F(2) {
        KodairaType::IV
    } else if vd == 6 && d.v_c4.at_least(2) && d.v_c6.at_least(3) {
        KodairaType::IStar(0)
    } else if d.v_c4 == F(2) && d.v_c6 == F(3) && vd > 6 {
        KodairaType::IStar(vd - 6)
    } else if d.v_c6 == F(4) {
        KodairaType::IVStar
    } else if d.v_c4 == F(3) {
        KodairaType::IIIStar
    } else if d.v_c6 == F(5) {
        KodairaType::IIStar
    } else {
        return Err(unclassifiable());
    };
    if kind.euler() != vd {
        return Err(unclassifiable());
    }
    Ok(KodairaFiber {
        place: d.place.clone(),
        kind,
        components: kind.components(),
        euler: kind.euler(),
    })
}

/// All singular fibers, ordered by place.
pub fn kodaira_fibers(w: &WeierstrassData) -> Result<Vec<KodairaFiber>, KodairaError> {
    let places = bad_places(w);
    // a place whose minimal model has v_Δ = 0 has good reduction
    let classify = |p: &Place| -> Result<Option<KodairaFiber>, KodairaError> {
        let d = local_valuations(w, p)?;
        if d.v_delta == Valuation::Finite(0) {
            return Ok(None);
        }
        classify_kodaira(&d).map(Some)
    };
    #[cfg(feature = "parallel")]
    let fibers: Result<Vec<_>, _> = {
        use rayon::prelude::*;
        places.par_iter().map(classify).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let fibers: Result<Vec<_>, _> = places.iter().map(classify).collect();
    let mut fibers: Vec<KodairaFiber> = fibers?.into_iter().flatten().collect();
    fibers.sort_by(|a, b| a.place.cmp_order(&b.place));
    Ok(fibers)
}

/// `r = 8 − Σ deg(v)·(m_v − 1)`.
pub fn shioda_tate_rank(fibers: &[KodairaFiber]) -> Result<u32, KodairaError> {
    let sum: u32 = fibers.iter().map(|f| f.place.degree() * (f.components - 1)).sum();
    8u32.checked_sub(sum).ok_or(KodairaError::NegativeRank(sum))
}

/// `Σ deg(v)·e(F_v) = 12`.
pub fn euler_check(fibers: &[KodairaFiber]) -> Result<(), KodairaError> {
    let sum: u32 = fibers.iter().map(|f| f.place.degree() * f.euler).sum();
    if sum == 12 {
        Ok(())
    } else {
        Err(KodairaError::RationalityViolation(sum))
    }
}

pub fn euler_sum(fibers: &[KodairaFiber]) -> u32 {
    fibers.iter().map(|f| f.place.degree() * f.euler).sum()
}

/// The fiber at `place`, if singular.
pub fn fiber_at<'a>(fibers: &'a [KodairaFiber], place: &Place) -> Option<&'a KodairaFiber> {
    fibers.iter().find(|f| &f.place == place)
}
