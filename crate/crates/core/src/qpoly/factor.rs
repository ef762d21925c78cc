//! Factorization over ℚ: square-free decomposition, factorization modulo a
//! small prime, Hensel lifting and recombination of the lifted factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::modp::{self, PolyP};
use super::{canonical_cmp, squarefree_decomposition, PolyError, Rational, UniPoly, Var};

/// `unit · ∏ factorᵢ^multᵢ` with monic, irreducible, pairwise coprime
/// factors sorted by [`canonical_cmp`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredPoly {
    pub unit: Rational,
    pub factors: Vec<(UniPoly, u32)>,
}

impl FactoredPoly {
    /// Re-expands the factorization.
    pub fn expand(&self, var: Var) -> UniPoly {
        self.factors
            .iter()
            .fold(UniPoly::constant(var, self.unit.clone()), |acc, (f, m)| &acc * &f.pow(*m))
    }

    pub fn multiplicity_of(&self, f: &UniPoly) -> u32 {
        self.factors
            .iter()
            .find(|(g, _)| g == f)
            .map_or(0, |(_, m)| *m)
    }
}

/// Factors `p` into monic irreducibles over ℚ.
pub fn factor(p: &UniPoly) -> Result<FactoredPoly, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let var = p.variable();
    let unit = p.leading();
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(p)? {
        for f in factor_squarefree(&part) {
            factors.push((f.with_var(var), mult));
        }
    }
    factors.sort_by(|a, b| canonical_cmp(&a.0, &b.0));
    Ok(FactoredPoly { unit, factors })
}

/// Monic irreducible factors of a square-free rational polynomial.
fn factor_squarefree(f: &UniPoly) -> Vec<UniPoly> {
    let var = f.variable();
    match f.degree() {
        None | Some(0) => return Vec::new(),
        Some(1) => return vec![f.monic()],
        _ => {}
    }
    let (_, prim) = f.primitive_integer();
    zassenhaus(&prim)
        .into_iter()
        .map(|g| UniPoly::from_integers(var, &g).monic())
        .collect()
}

type ZPoly = Vec<BigInt>;

fn zdeg(f: &ZPoly) -> usize {
    f.len().saturating_sub(1)
}

fn ztrim(mut f: ZPoly) -> ZPoly {
    while f.last().is_some_and(Zero::is_zero) {
        f.pop();
    }
    f
}

fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    ztrim(c)
}

fn zsub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    ztrim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

fn zmod(a: &ZPoly, m: &BigInt) -> ZPoly {
    ztrim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn zsymmetric(a: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m / 2u32;
    ztrim(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn to_big(f: &PolyP) -> ZPoly {
    f.c.iter().map(|&c| BigInt::from(c)).collect()
}

fn primitive(f: &ZPoly) -> ZPoly {
    let g = f.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut out: ZPoly = f.iter().map(|c| c / &g).collect();
    if out.last().is_some_and(Signed::is_negative) {
        out.iter_mut().for_each(|c| *c = -c.clone());
    }
    out
}

/// Exact division in ℤ[x]; `None` if `d` does not divide `f`.
fn zdiv_exact(f: &ZPoly, d: &ZPoly) -> Option<ZPoly> {
    let dd = zdeg(d);
    if f.len() < d.len() {
        return if f.is_empty() { Some(Vec::new()) } else { None };
    }
    let lc = d.last().expect("nonzero divisor");
    let mut r = f.clone();
    let mut q = vec![BigInt::zero(); f.len() - dd];
    for i in (0..q.len()).rev() {
        let (c, rem) = r[i + dd].div_rem(lc);
        if !rem.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, b) in d.iter().enumerate() {
                r[i + j] -= &c * b;
            }
        }
        q[i] = c;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(ztrim(q))
}

/// Lifts `f ≡ g·h (mod p)` with `g` monic to `f ≡ G·H (mod p^k)`,
/// `G` monic with `G ≡ g`, by linear Hensel steps.
fn hensel_pair(f: &ZPoly, g: &PolyP, h: &PolyP, k: u32) -> (ZPoly, ZPoly) {
    let p = g.p;
    let pb = BigInt::from(p);
    let (one, s, t) = g.ext_gcd(h);
    debug_assert_eq!(one.c, vec![1]);
    let mut gz = to_big(g);
    let mut hz = to_big(h);
    let mut modulus = pb.clone();
    for _ in 1..k {
        let e = zsub(f, &zmul(&gz, &hz));
        let e: ZPoly = e.iter().map(|c| c / &modulus).collect();
        let ep = PolyP::from_big(p, &e);
        let te = t.mul(&ep);
        let (quo, dg) = te.divrem(g);
        let dh = s.mul(&ep).add(&quo.mul(h));
        let next = &modulus * &pb;
        gz = zmod(
            &ztrim(
                (0..gz.len().max(dg.c.len()))
                    .map(|i| {
                        gz.get(i).cloned().unwrap_or_default()
                            + &modulus * BigInt::from(*dg.c.get(i).unwrap_or(&0))
                    })
                    .collect(),
            ),
            &next,
        );
        hz = zmod(
            &ztrim(
                (0..hz.len().max(dh.c.len()))
                    .map(|i| {
                        hz.get(i).cloned().unwrap_or_default()
                            + &modulus * BigInt::from(*dh.c.get(i).unwrap_or(&0))
                    })
                    .collect(),
            ),
            &next,
        );
        modulus = next;
    }
    (gz, hz)
}

/// Lifts the modular factorization `f ≡ lc(f)·∏ gᵢ (mod p)` to monic
/// factors modulo `p^k`.
fn hensel_multi(f: &ZPoly, factors: &[PolyP], k: u32) -> Vec<ZPoly> {
    let p = factors[0].p;
    let pk = num_traits::pow(BigInt::from(p), k as usize);
    let mut out = Vec::with_capacity(factors.len());
    let mut rest = zmod(f, &pk);
    for (i, g) in factors.iter().enumerate() {
        if i + 1 == factors.len() {
            // rest ≡ lc·g; normalize to monic modulo p^k
            let lc = rest.last().cloned().expect("nonzero");
            let inv = lc.modinv(&pk).expect("lc invertible mod p^k");
            out.push(zmod(&rest.iter().map(|c| c * &inv).collect(), &pk));
            break;
        }
        // cofactor lc·∏_{j>i} g_j mod p
        let lc = PolyP::from_big(p, &rest).lead();
        let cof = factors[i + 1..]
            .iter()
            .fold(PolyP::new(p, vec![lc]), |acc, gj| acc.mul(gj));
        let (gz, hz) = hensel_pair(&rest, g, &cof, k);
        out.push(gz);
        rest = hz;
    }
    out
}

fn mignotte_bound(f: &ZPoly) -> BigInt {
    // Coefficients of any integer factor are bounded by 2^deg · ‖f‖₂ ≤ 2^deg · ‖f‖₁.
    let l1: BigInt = f.iter().map(|c| c.abs()).sum();
    l1 << zdeg(f)
}

/// Zassenhaus factorization of a primitive square-free integer polynomial
/// of degree ≥ 2. Returns primitive irreducible factors.
fn zassenhaus(f: &ZPoly) -> Vec<ZPoly> {
    let n = zdeg(f);
    let lc = f.last().cloned().expect("nonzero");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);

    // Pick the prime with the fewest modular factors among a few candidates.
    let mut best: Option<Vec<PolyP>> = None;
    let mut tried = 0;
    for p in modp::odd_primes() {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = PolyP::from_big(p, f);
        if fp.degree() != n || fp.gcd(&fp.derivative()).degree() > 0 {
            continue;
        }
        let fs = modp::factor_squarefree(&fp, &mut rng);
        if fs.len() == 1 {
            return vec![primitive(f)];
        }
        if best.as_ref().is_none_or(|b| fs.len() < b.len()) {
            best = Some(fs);
        }
        tried += 1;
        if tried >= 5 {
            break;
        }
    }
    let modular = best.expect("a suitable prime exists for square-free input");
    let p = modular[0].p;

    let bound = mignotte_bound(f) * lc.abs() * 2u32;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = pb.clone();
    while pk <= bound {
        pk *= &pb;
        k += 1;
    }
    let mut lifted = hensel_multi(f, &modular, k);

    let mut remaining = f.clone();
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut progressed = false;
        for subset in subsets(lifted.len(), size) {
            let lc_rem = remaining.last().cloned().expect("nonzero");
            let cand = subset
                .iter()
                .fold(vec![lc_rem.clone()], |acc, &i| zmod(&zmul(&acc, &lifted[i]), &pk));
            let cand = primitive(&zsymmetric(&cand, &pk));
            if let Some(q) = zdiv_exact(&remaining, &cand) {
                found.push(cand);
                remaining = q;
                lifted = lifted
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, g)| g)
                    .collect();
                progressed = true;
                break;
            }
        }
        if !progressed {
            size += 1;
        }
    }
    if zdeg(&remaining) > 0 {
        found.push(primitive(&remaining));
    }
    found
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
