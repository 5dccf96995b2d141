//! Squarefree, distinct-degree and equal-degree factorization.

use rand::Rng;
use serde::Serialize;

use super::FpPoly;
use crate::error::{Error, Result};
use crate::rng::{hash_words, SampleRng};
use rand::SeedableRng;

/// Seed used by [`factor`] for equal-degree splitting.
pub const DEFAULT_FACTOR_SEED: u64 = 0x5eed_f00d;

/// A monic polynomial as a sorted list of (irreducible, multiplicity).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    p: u64,
    factors: Vec<(FpPoly, u32)>,
}

impl Factorization {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn factors(&self) -> &[(FpPoly, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors
            .iter()
            .map(|(f, e)| f.deg() * *e as usize)
            .sum()
    }

    /// Number of distinct irreducible factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Number of irreducible factors counted with multiplicity.
    pub fn big_omega(&self) -> usize {
        self.factors.iter().map(|(_, e)| *e as usize).sum()
    }

    /// Number of monic divisors, Π(e + 1).
    pub fn tau(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |t, (_, e)| t.saturating_mul(*e as u128 + 1))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    pub fn product(&self) -> FpPoly {
        self.factors
            .iter()
            .fold(FpPoly::one(self.p), |acc, (f, e)| acc.mul(&f.pow(*e as u64)))
    }

    /// Irreducible-factor degrees with multiplicity, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self
            .factors
            .iter()
            .flat_map(|(f, e)| std::iter::repeat_n(f.deg() as u32, *e as usize))
            .collect();
        d.sort_unstable();
        d
    }
}

#[derive(Serialize)]
struct FactorJson {
    poly: String,
    multiplicity: u32,
}

impl Serialize for Factorization {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<FactorJson> = self
            .factors
            .iter()
            .map(|(f, e)| FactorJson {
                poly: f.to_string(),
                multiplicity: *e,
            })
            .collect();
        v.serialize(s)
    }
}

fn check_input(a: &FpPoly) -> Result<()> {
    if a.is_zero() {
        return Err(Error::invalid("cannot factor the zero polynomial"));
    }
    if !a.is_monic() {
        return Err(Error::invalid(format!("{a} is not monic")));
    }
    Ok(())
}

/// Complete factorization of a monic polynomial.
pub fn factor(a: &FpPoly) -> Result<Factorization> {
    factor_seeded(a, DEFAULT_FACTOR_SEED)
}

/// As [`factor`], with an explicit seed for the equal-degree splitting. The
/// result is the same for every seed; only the work done may differ.
pub fn factor_seeded(a: &FpPoly, seed: u64) -> Result<Factorization> {
    check_input(a)?;
    let p = a.p();
    let key = hash_words([p, seed].into_iter().chain(a.coeffs().iter().copied()));
    let mut rng = SampleRng::seed_from_u64(key);
    let mut factors = Vec::new();
    for (sqf, mult) in squarefree_decomposition(a) {
        for (g, d) in distinct_degree(&sqf) {
            let mut out = Vec::new();
            equal_degree(&g, d, &mut rng, &mut out);
            factors.extend(out.into_iter().map(|f| (f, mult)));
        }
    }
    factors.sort();
    Ok(Factorization { p, factors })
}

/// Returns pairwise coprime squarefree monic `(f_i, i)` with `a = Π f_i^i`.
pub fn squarefree_decomposition(a: &FpPoly) -> Vec<(FpPoly, u32)> {
    let mut out = Vec::new();
    sff(a, 1, &mut out);
    out.sort_by_key(|(_, e)| *e);
    out
}

fn sff(f: &FpPoly, scale: u32, out: &mut Vec<(FpPoly, u32)>) {
    if f.deg() == 0 {
        return;
    }
    let p = f.p();
    let df = f.derivative();
    if df.is_zero() {
        sff(&f.pth_root(), scale * p as u32, out);
        return;
    }
    let mut c = f.gcd(&df);
    let mut w = f.exact_div(&c).unwrap();
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.exact_div(&y).unwrap();
        if !fac.is_one() {
            out.push((fac, i * scale));
        }
        i += 1;
        c = c.exact_div(&y).unwrap();
        w = y;
    }
    if !c.is_one() {
        sff(&c.pth_root(), scale * p as u32, out);
    }
}

/// Splits a squarefree monic `f` into `(g_d, d)`, g_d the product of its
/// irreducible factors of degree d.
pub fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p();
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::t(p);
    let mut h = x.rem(&rest);
    let mut d = 1;
    while rest.deg() >= 2 * d {
        h = h.pow_mod(p, &rest);
        let g = rest.gcd(&h.sub(&x));
        if !g.is_one() {
            rest = rest.exact_div(&g).unwrap();
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

fn random_below(f: &FpPoly, rng: &mut SampleRng) -> FpPoly {
    let p = f.p();
    let c = (0..f.deg()).map(|_| rng.random_range(0..p)).collect();
    FpPoly::from_reduced(p, c)
}

/// a^{(p^d − 1)/2} mod g for odd p, via a^{1+p+…+p^{d−1}} then ^((p−1)/2).
fn half_norm_power(a: &FpPoly, d: usize, g: &FpPoly) -> FpPoly {
    let p = g.p();
    let mut t = a.clone();
    let mut acc = a.clone();
    for _ in 1..d {
        t = t.pow_mod(p, g);
        acc = acc.mul_mod(&t, g);
    }
    acc.pow_mod((p - 1) / 2, g)
}

/// a + a^2 + a^4 + … + a^{2^{e−1}} mod g with e = k·d, the absolute trace
/// from F_{2^e} used to split over characteristic 2.
fn trace_map(a: &FpPoly, d: usize, g: &FpPoly) -> FpPoly {
    let mut t = a.clone();
    let mut acc = a.clone();
    for _ in 1..d {
        t = t.mul_mod(&t, g);
        acc = acc.add(&t);
    }
    acc
}

/// Cantor–Zassenhaus splitting of `g`, a product of irreducibles of degree `d`.
fn equal_degree(g: &FpPoly, d: usize, rng: &mut SampleRng, out: &mut Vec<FpPoly>) {
    if g.deg() == d {
        out.push(g.clone());
        return;
    }
    let p = g.p();
    loop {
        let a = random_below(g, rng);
        if a.deg() == 0 {
            continue;
        }
        let b = if p == 2 {
            trace_map(&a, d, g)
        } else {
            half_norm_power(&a, d, g).sub(&FpPoly::one(p))
        };
        let h = g.gcd(&b);
        if h.deg() > 0 && h.deg() < g.deg() {
            let other = g.exact_div(&h).unwrap();
            equal_degree(&h, d, rng, out);
            equal_degree(&other, d, rng, out);
            return;
        }
    }
}

/// Rabin's irreducibility test.
pub fn is_irreducible(a: &FpPoly) -> Result<bool> {
    check_input(a)?;
    let n = a.deg();
    if n == 0 {
        return Err(Error::invalid("irreducibility of a constant is undefined"));
    }
    if n == 1 {
        return Ok(true);
    }
    let p = a.p();
    let x = FpPoly::t(p);
    // Frobenius powers T^{p^k} mod a for k = 1..n.
    let mut frob = Vec::with_capacity(n + 1);
    frob.push(x.rem(a));
    for k in 1..=n {
        let prev: &FpPoly = &frob[k - 1];
        frob.push(prev.pow_mod(p, a));
    }
    if frob[n] != x.rem(a) {
        return Ok(false);
    }
    for (q, _) in crate::arith::factorize(n as u64) {
        let k = n / q as usize;
        if !a.gcd(&frob[k].sub(&x)).is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec()).unwrap()
    }

    /// Irreducibility by trial division over all monic divisors of degree ≤ n/2.
    fn trial_irreducible(a: &FpPoly) -> bool {
        let p = a.p();
        for d in 1..=a.deg() / 2 {
            for i in 0..p.pow(d as u32) {
                if FpPoly::monic_from_index(p, d, i).divides(a) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn spec_examples() {
        let f = factor(&fp(2, &[0, 1, 1])).unwrap();
        assert_eq!(
            f.factors(),
            &[(fp(2, &[0, 1]), 1), (fp(2, &[1, 1]), 1)]
        );
        let f = factor(&fp(2, &[1, 1, 0, 0, 1])).unwrap();
        assert!(f.is_irreducible());
        assert!(trial_irreducible(&fp(2, &[1, 1, 0, 0, 1])));
        let f = factor(&fp(3, &[0, 2, 0, 1])).unwrap();
        let lin: Vec<_> = (0..3).map(|a| (fp(3, &[a, 1]), 1)).collect();
        assert_eq!(f.factors(), &lin[..]);
        assert!(factor(&FpPoly::zero(2)).is_err());
        assert!(factor(&fp(3, &[1, 2])).is_err());
    }

    #[test]
    fn is_irreducible_examples() {
        assert!(is_irreducible(&fp(2, &[1, 1, 1])).unwrap());
        assert!(!is_irreducible(&fp(2, &[1, 0, 1])).unwrap());
        let a = fp(5, &[2, 0, 0, 0, 1]);
        assert_eq!(is_irreducible(&a).unwrap(), trial_irreducible(&a));
        assert!(is_irreducible(&FpPoly::one(5)).is_err());
    }

    #[test]
    fn exhaustive_small_fields() {
        for (p, n) in [(2u64, 8usize), (3, 5), (5, 4), (7, 3)] {
            for i in 0..p.pow(n as u32) {
                let a = FpPoly::monic_from_index(p, n, i);
                let f = factor(&a).unwrap();
                assert_eq!(f.product(), a);
                for (g, _) in f.factors() {
                    assert!(trial_irreducible(g), "{g}");
                }
                assert_eq!(is_irreducible(&a).unwrap(), trial_irreducible(&a));
                assert_eq!(f.is_irreducible(), is_irreducible(&a).unwrap());
            }
        }
    }

    #[test]
    fn prime_power_multiplicities() {
        // (T+1)^4 (T^2+T+1)^2 T^3 over F_2 exercises the p-th root branch.
        let a = fp(2, &[1, 1])
            .pow(4)
            .mul(&fp(2, &[1, 1, 1]).pow(2))
            .mul(&FpPoly::monomial(2, 3));
        let f = factor(&a).unwrap();
        assert_eq!(
            f.factors(),
            &[
                (fp(2, &[0, 1]), 3),
                (fp(2, &[1, 1]), 4),
                (fp(2, &[1, 1, 1]), 2)
            ]
        );
        let b = fp(3, &[1, 0, 1]).pow(9).mul(&fp(3, &[1, 1]).pow(3));
        let f = factor(&b).unwrap();
        assert_eq!(f.factors(), &[(fp(3, &[1, 1]), 3), (fp(3, &[1, 0, 1]), 9)]);
    }

    #[test]
    fn seed_does_not_change_result() {
        let a = fp(7, &[3, 0, 5, 1, 0, 0, 2, 1, 4, 1]);
        let f = factor(&a).unwrap();
        for s in 0..5 {
            assert_eq!(factor_seeded(&a, s).unwrap(), f);
        }
    }
}
