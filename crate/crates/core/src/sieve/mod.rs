//! Brun's pure sieve over F_p[T], the Euler product over small irreducibles,
//! and exact counting of rough polynomials.

mod brun;

pub use brun::{
    brun_check, brun_upper_bound, BrunCheck, BrunOptions, BrunReport, ProbabilitySource,
};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpoly::{count_irreducibles, is_irreducible, monic_irreducibles, FpPoly};
use crate::interval::CertifiedInterval as CI;

/// A finite set of monic irreducibles over F_p, none equal to T.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrreducibleFamily {
    p: u64,
    #[serde(serialize_with = "ser_polys")]
    members: Vec<FpPoly>,
}

fn ser_polys<S: serde::Serializer>(v: &[FpPoly], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|f| f.to_string()))
}

impl IrreducibleFamily {
    pub fn new(p: u64, mut members: Vec<FpPoly>) -> Result<Self> {
        for f in &members {
            if f.p() != p {
                return Err(Error::invalid(format!("{f} is not over F_{p}")));
            }
            if f.is_t() {
                return Err(Error::invalid("the family may not contain T"));
            }
            if !f.is_monic() || !is_irreducible(f)? {
                return Err(Error::invalid(format!("{f} is not a monic irreducible")));
            }
        }
        members.sort();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("repeated family member"));
        }
        Ok(IrreducibleFamily { p, members })
    }

    /// Every monic irreducible of degree ≤ m other than T.
    pub fn up_to(p: u64, m: usize) -> Result<Self> {
        let mut members = Vec::new();
        for k in 1..=m {
            members.extend(monic_irreducibles(p, k)?.into_iter().filter(|f| !f.is_t()));
        }
        Ok(IrreducibleFamily { p, members })
    }

    pub fn empty(p: u64) -> Self {
        IrreducibleFamily { p, members: vec![] }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn members(&self) -> &[FpPoly] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// ℓ, the largest member degree (0 for the empty family).
    pub fn degree_bound(&self) -> usize {
        self.members.iter().map(|f| f.deg()).max().unwrap_or(0)
    }

    /// Member counts by degree, index d = 0..=ℓ.
    fn degree_counts(&self) -> Vec<u64> {
        let mut c = vec![0u64; self.degree_bound() + 1];
        for f in &self.members {
            c[f.deg()] += 1;
        }
        c
    }

    /// e_k = Σ_{G | Π I, ω(G) = k} 1/‖G‖ for k = 0..=kmax, exactly.
    pub fn elementary_sums(&self, kmax: usize) -> Vec<BigRational> {
        let mut e = vec![BigRational::zero(); kmax + 1];
        e[0] = BigRational::one();
        let p = BigInt::from(self.p);
        for (d, &c) in self.degree_counts().iter().enumerate() {
            if c == 0 {
                continue;
            }
            let x = BigRational::new(BigInt::one(), p.pow(d as u32));
            // Multiply by (1 + x t)^c, truncated at t^kmax.
            let mut factor = vec![BigRational::zero(); kmax + 1];
            let mut binom = BigInt::one();
            let mut xp = BigRational::one();
            for (j, fj) in factor.iter_mut().enumerate() {
                if j as u64 > c {
                    break;
                }
                *fj = BigRational::from_integer(binom.clone()) * &xp;
                binom = binom * BigInt::from(c - j as u64) / BigInt::from(j as u64 + 1);
                xp *= &x;
            }
            let mut next = vec![BigRational::zero(); kmax + 1];
            for (i, a) in e.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in factor.iter().enumerate().take(kmax + 1 - i) {
                    if !b.is_zero() {
                        next[i + j] += a * b;
                    }
                }
            }
            e = next;
        }
        e
    }

    /// Π_{I}(1 − 1/‖I‖), exactly.
    pub fn euler_product(&self) -> BigRational {
        let p = BigInt::from(self.p);
        let mut out = BigRational::one();
        for (d, &c) in self.degree_counts().iter().enumerate().skip(1) {
            let pd = p.pow(d as u32);
            let f = BigRational::new(&pd - 1, pd);
            out *= pow_rational(&f, c);
        }
        out
    }

    /// Σ_I 1/‖I‖, exactly.
    pub fn reciprocal_sum(&self) -> BigRational {
        let p = BigInt::from(self.p);
        self.degree_counts()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(d, &c)| BigRational::new(BigInt::from(c), p.pow(d as u32)))
            .sum()
    }

    #[cfg(test)]
    /// Bitmask of the members dividing `a` (family size ≤ 64).
    pub(crate) fn divisor_mask(&self, a: &FpPoly) -> u64 {
        let mut mask = 0u64;
        for (i, f) in self.members.iter().enumerate() {
            if a.rem(f).is_zero() {
                mask |= 1 << i;
            }
        }
        mask
    }
}

fn pow_rational(x: &BigRational, e: u64) -> BigRational {
    let mut base = x.clone();
    let mut out = BigRational::one();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            out *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    out
}

/// The truncation v = ⌈3/2 + 2 log ℓ⌉ used in the proof of the sieve bound.
pub fn default_truncation(ell: usize) -> u32 {
    (1.5 + 2.0 * (ell.max(1) as f64).ln()).ceil() as u32
}

/// Truncated inclusion–exclusion Σ_{G | Π I, ω(G) ≤ k} (−1)^{ω(G)}/‖G‖ for
/// k = 2v−1 (lower), the full product, and k = 2v (upper).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BonferroniSums {
    pub v: u32,
    #[serde(serialize_with = "crate::equidist::ser_rational")]
    pub lower: BigRational,
    #[serde(serialize_with = "crate::equidist::ser_rational")]
    pub full: BigRational,
    #[serde(serialize_with = "crate::equidist::ser_rational")]
    pub upper: BigRational,
}

impl BonferroniSums {
    pub fn sandwiched(&self) -> bool {
        self.lower <= self.full && self.full <= self.upper
    }
}

pub fn bonferroni_sums(family: &IrreducibleFamily, v: u32) -> Result<BonferroniSums> {
    if v == 0 {
        return Err(Error::invalid("truncation v must be at least 1"));
    }
    let k = 2 * v as usize;
    let e = family.elementary_sums(k);
    let alt = |kk: usize| -> BigRational {
        e.iter()
            .take(kk + 1)
            .enumerate()
            .map(|(i, x)| if i % 2 == 0 { x.clone() } else { -x.clone() })
            .sum()
    };
    Ok(BonferroniSums {
        v,
        lower: alt(k - 1),
        full: family.euler_product(),
        upper: alt(k),
    })
}

/// Exact fraction of A ∈ M_p(n) all of whose irreducible factors are T or
/// have degree above m: the coefficient of u^n in (1 − pu)^{−1} Π_{k ≤ m}
/// (1 − u^k)^{π_p(k) − [k = 1]}, divided by p^n.
pub fn rough_fraction_exact(p: u64, n: usize, m: usize) -> Result<BigRational> {
    if !crate::arith::is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let pb = BigInt::from(p);
    let mut series: Vec<BigInt> = (0..=n).map(|i| pb.pow(i as u32)).collect();
    for k in 1..=m.min(n) {
        let mut e = BigInt::from(count_irreducibles(p, k as u32));
        if k == 1 {
            e -= 1;
        }
        // (1 − u^k)^e = Σ_j (−1)^j C(e, j) u^{kj}.
        let mut coeffs = Vec::new();
        let mut binom = BigInt::one();
        for j in 0..=n / k {
            if BigInt::from(j) > e {
                break;
            }
            coeffs.push(if j % 2 == 0 { binom.clone() } else { -binom.clone() });
            binom = binom * (&e - j) / (j + 1);
        }
        let mut next = vec![BigInt::zero(); n + 1];
        for (i, a) in series.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, c) in coeffs.iter().enumerate() {
                let t = i + k * j;
                if t > n {
                    break;
                }
                next[t] += a * c;
            }
        }
        series = next;
    }
    Ok(BigRational::new(series[n].clone(), pb.pow(n as u32)))
}

/// Π_{I ≠ T, deg I ≤ m}(1 − 1/‖I‖): exactly when small enough, otherwise as
/// a certified enclosure of its logarithm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EulerProduct {
    pub p: u64,
    pub m: usize,
    #[serde(serialize_with = "ser_opt_rational")]
    pub value: Option<BigRational>,
    pub log_value: CI,
    pub bound: f64,
    /// value ≤ 2/(m+1), certified.
    pub bound_ok: bool,
}

fn ser_opt_rational<S: serde::Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&q.to_string()),
        None => s.serialize_none(),
    }
}

/// Largest total exponent Σ_k k·π_p(k) for which the product is kept exact.
const EXACT_EULER_LIMIT: u128 = 20_000;

pub fn euler_product(p: u64, m: usize) -> Result<EulerProduct> {
    if !crate::arith::is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let counts: Vec<BigUint> = (1..=m)
        .map(|k| {
            let c = count_irreducibles(p, k as u32);
            if k == 1 {
                c - 1u32
            } else {
                c
            }
        })
        .collect();
    let weight: Option<u128> = counts
        .iter()
        .enumerate()
        .try_fold(0u128, |a, (i, c)| a.checked_add(c.to_u128()?.checked_mul(i as u128 + 1)?));
    let bound_q = BigRational::new(BigInt::from(2), BigInt::from(m + 1));
    let mut log_value = CI::point(0.0);
    for (i, c) in counts.iter().enumerate() {
        let x = CI::from_u128(p as u128).powi(i as u32 + 1).recip();
        let ln_factor = (-x).ln_1p();
        let cnt = CI::from_bigint(&BigInt::from(c.clone()));
        log_value = log_value + ln_factor * cnt;
    }
    let bound = 2.0 / (m as f64 + 1.0);
    let (value, bound_ok) = match weight {
        Some(w) if w <= EXACT_EULER_LIMIT => {
            let fam_p = BigInt::from(p);
            let mut v = BigRational::one();
            for (i, c) in counts.iter().enumerate() {
                let pd = fam_p.pow(i as u32 + 1);
                v *= pow_rational(&BigRational::new(&pd - 1, pd), c.to_u64().unwrap());
            }
            let ok = v <= bound_q;
            (Some(v), ok)
        }
        _ => {
            let ln_bound = CI::from_rational(&bound_q).ln();
            (None, log_value.upper() < ln_bound.lower())
        }
    };
    Ok(EulerProduct {
        p,
        m,
        value,
        log_value,
        bound,
        bound_ok,
    })
}

impl EulerProduct {
    pub fn to_f64(&self) -> f64 {
        match &self.value {
            Some(v) => v.to_f64().unwrap(),
            None => self.log_value.mid().exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpoly::{factor, monic_polys};

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn rough_by_enumeration(p: u64, n: usize, m: usize) -> BigRational {
        let good = monic_polys(p, n)
            .filter(|a| {
                factor(a)
                    .unwrap()
                    .factors()
                    .iter()
                    .all(|(f, _)| f.is_t() || f.deg() > m)
            })
            .count();
        BigRational::new(BigInt::from(good), BigInt::from(p).pow(n as u32))
    }

    #[test]
    fn rough_fraction_examples() {
        assert_eq!(rough_fraction_exact(2, 3, 1).unwrap(), q(1, 2));
        for n in 0..6 {
            assert!(rough_fraction_exact(3, n, 0).unwrap().is_one());
        }
        for (p, n) in [(2u64, 3usize), (3, 4), (5, 2)] {
            for m in n..n + 3 {
                assert_eq!(
                    rough_fraction_exact(p, n, m).unwrap(),
                    BigRational::new(1.into(), BigInt::from(p).pow(n as u32))
                );
            }
        }
    }

    #[test]
    fn rough_fraction_matches_enumeration() {
        for p in [2u64, 3] {
            let nmax = if p == 2 { 12 } else { 8 };
            for n in 0..=nmax {
                for m in 0..=4 {
                    assert_eq!(
                        rough_fraction_exact(p, n, m).unwrap(),
                        rough_by_enumeration(p, n, m),
                        "p={p} n={n} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn euler_product_examples() {
        let e = euler_product(2, 2).unwrap();
        assert_eq!(e.value, Some(q(3, 8)));
        assert!(e.bound_ok);
        let e = euler_product(5, 0).unwrap();
        assert_eq!(e.value, Some(q(1, 1)));
        assert!(e.bound_ok);
        let e = euler_product(7, 10).unwrap();
        assert!(e.bound_ok);
        assert!(e.to_f64() <= 2.0 / 11.0);
    }

    #[test]
    fn euler_product_decreasing_and_bounded() {
        for p in crate::arith::primes_up_to(13) {
            let mut prev: Option<EulerProduct> = None;
            for m in 0..=20 {
                let e = euler_product(p, m).unwrap();
                assert!(e.bound_ok, "p={p} m={m}");
                assert!(e.log_value.contains(e.to_f64().ln()) || e.value.is_none());
                if let Some(pr) = prev {
                    assert!(e.log_value.upper() < pr.log_value.lower() || {
                        match (&e.value, &pr.value) {
                            (Some(a), Some(b)) => a < b,
                            _ => false,
                        }
                    });
                }
                prev = Some(e);
            }
        }
    }

    #[test]
    fn family_euler_product_matches() {
        for (p, m) in [(2u64, 4usize), (3, 3), (5, 2)] {
            let f = IrreducibleFamily::up_to(p, m).unwrap();
            assert_eq!(Some(f.euler_product()), euler_product(p, m).unwrap().value);
        }
    }

    #[test]
    fn bonferroni_sandwich() {
        for (p, m) in [(2u64, 5usize), (3, 3), (5, 2), (2, 8)] {
            let f = IrreducibleFamily::up_to(p, m).unwrap();
            for v in 1..=4 {
                let b = bonferroni_sums(&f, v).unwrap();
                assert!(b.sandwiched(), "p={p} m={m} v={v}");
            }
            // Untruncated alternating sum equals the product.
            let e = f.elementary_sums(f.len());
            let s: BigRational = e
                .iter()
                .enumerate()
                .map(|(i, x)| if i % 2 == 0 { x.clone() } else { -x.clone() })
                .sum();
            assert_eq!(s, f.euler_product());
        }
    }

    #[test]
    fn family_validation() {
        let t = FpPoly::t(3);
        assert!(IrreducibleFamily::new(3, vec![t]).is_err());
        let red = FpPoly::new(3, vec![1, 2, 1]).unwrap();
        assert!(IrreducibleFamily::new(3, vec![red]).is_err());
        let i = FpPoly::new(3, vec![1, 1]).unwrap();
        assert!(IrreducibleFamily::new(3, vec![i.clone(), i.clone()]).is_err());
        assert_eq!(IrreducibleFamily::new(3, vec![i]).unwrap().degree_bound(), 1);
        assert_eq!(IrreducibleFamily::up_to(2, 3).unwrap().len(), 4);
    }

    #[test]
    fn default_truncation_values() {
        assert_eq!(default_truncation(11), 7);
        assert_eq!(default_truncation(3), 4);
    }
}
