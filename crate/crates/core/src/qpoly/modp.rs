//! Dense polynomials over a small prime field `F_p` (`p < 2^31`), used by the
//! factorization routine for modular factorization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PolyP {
    pub p: u64,
    /// Lowest degree first, trimmed.
    pub c: Vec<u64>,
}

pub(crate) fn mod_big(a: &BigInt, p: u64) -> u64 {
    a.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

impl PolyP {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for v in c.iter_mut() {
            *v %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        PolyP { p, c }
    }

    pub fn from_big(p: u64, coeffs: &[BigInt]) -> Self {
        Self::new(p, coeffs.iter().map(|a| mod_big(a, p)).collect())
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p);
        Self::new(self.p, self.c.iter().map(|a| a * inv % self.p).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| self.c.get(i).unwrap_or(&0) + o.c.get(i).unwrap_or(&0))
            .collect();
        Self::new(self.p, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p;
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| self.c.get(i).unwrap_or(&0) + p - o.c.get(i).unwrap_or(&0))
            .collect();
        Self::new(p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(self.p, vec![]);
        }
        let p = self.p;
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % p;
            }
        }
        Self::new(p, c)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial mod p");
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (Self::new(p, vec![]), self.clone());
        }
        let dd = d.degree();
        let inv = inv_mod(d.lead(), p);
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = r[i + dd] * inv % p;
            q[i] = coef;
            if coef != 0 {
                for (j, b) in d.c.iter().enumerate() {
                    r[i + j] = (r[i + j] + p - coef * b % p) % p;
                }
            }
        }
        r.truncate(dd);
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| a * (i as u64 % p) % p)
            .collect();
        Self::new(p, c)
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s·self + t·o = g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::new(p, vec![]));
        let (mut t0, mut t1) = (Self::new(p, vec![]), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        let inv = inv_mod(r0.lead(), p);
        let sc = |x: &Self| Self::new(p, x.c.iter().map(|a| a * inv % p).collect());
        (sc(&r0), sc(&s0), sc(&t0))
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }
}

/// Distinct-degree factorization of a monic square-free polynomial:
/// pairs `(product of all degree-d irreducible factors, d)`.
fn distinct_degree(f: &PolyP) -> Vec<(PolyP, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = PolyP::x(p);
    let mut h = x.clone();
    let mut d = 0;
    while rest.degree() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.degree() > 0 {
            out.push((g.clone(), d));
            rest = rest.divrem(&g).0;
            h = h.rem(&rest);
        }
    }
    if rest.degree() > 0 {
        let deg = rest.degree();
        out.push((rest.monic(), deg));
    }
    out
}

/// Cantor–Zassenhaus equal-degree splitting (odd `p`).
fn equal_degree<R: Rng>(f: &PolyP, d: usize, rng: &mut R) -> Vec<PolyP> {
    let n = f.degree();
    if n == d {
        return vec![f.clone()];
    }
    let p = f.p;
    let e = (num_traits::pow(BigInt::from(p), d) - 1u32) / 2u32;
    loop {
        let a = PolyP::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.degree() == 0 {
            continue;
        }
        let b = pow_mod_big(&a, &e, f).sub(&PolyP::one(p));
        let g = b.gcd(f);
        if g.degree() > 0 && g.degree() < n {
            let other = f.divrem(&g).0.monic();
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

fn pow_mod_big(a: &PolyP, e: &BigInt, m: &PolyP) -> PolyP {
    let mut acc = PolyP::one(a.p).rem(m);
    let base = a.rem(m);
    for bit in e.to_str_radix(2).chars() {
        acc = acc.mul(&acc).rem(m);
        if bit == '1' {
            acc = acc.mul(&base).rem(m);
        }
    }
    acc
}

/// Monic irreducible factors of a square-free polynomial over `F_p`, odd `p`.
pub(crate) fn factor_squarefree<R: Rng>(f: &PolyP, rng: &mut R) -> Vec<PolyP> {
    let f = f.monic();
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&f) {
        out.extend(equal_degree(&g, d, rng));
    }
    out.sort_by(|a, b| a.c.len().cmp(&b.c.len()).then_with(|| a.c.cmp(&b.c)));
    out
}

/// Odd primes in increasing order, by trial division.
pub(crate) fn odd_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&n| {
        let mut d = 3;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 2;
        }
        true
    })
}
