//! Divisor statistics of polynomials over F_p.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::Serialize;

use super::{factor, Factorization, FpPoly, Partition};
use crate::arith::{divisors, mobius};
use crate::error::{Error, Result};

/// π_p(k), the number of monic irreducibles of degree k, by the necklace
/// formula (1/k) Σ_{d|k} μ(d) p^{k/d}.
pub fn count_irreducibles(p: u64, k: u32) -> BigUint {
    assert!(k >= 1, "degree must be positive");
    let pb = BigInt::from(p);
    let mut s = BigInt::zero();
    for d in divisors(k as u64) {
        let mu = mobius(d);
        if mu != 0 {
            s += BigInt::from(mu) * pb.pow(k / d as u32);
        }
    }
    let (q, r) = (s.clone() / k, s % k);
    debug_assert!(r.is_zero());
    q.to_biguint().expect("count is positive")
}

/// π_p(k) as u128 when it fits.
pub fn count_irreducibles_u128(p: u64, k: u32) -> Option<u128> {
    let c = count_irreducibles(p, k);
    u128::try_from(c).ok()
}

/// Checks p^k/k − 2p^{k/2}/k ≤ π_p(k) ≤ p^k/k exactly in integers.
pub fn ppt_bracket_holds(p: u64, k: u32) -> bool {
    let pi = BigInt::from(count_irreducibles(p, k));
    let pk = BigInt::from(p).pow(k);
    let kpi = pi * k;
    if kpi > pk {
        return false;
    }
    // p^k − kπ ≤ 2 p^{k/2}  ⇔  (p^k − kπ)^2 ≤ 4 p^k.
    let gap = &pk - kpi;
    &gap * &gap <= pk * 4
}

/// Splits A = S·R where S collects the irreducible factors of degree ≤ m other
/// than T, and R the rest (T always goes to R).
pub fn smooth_rough_split(a: &FpPoly, m: usize) -> Result<(FpPoly, FpPoly)> {
    Ok(split_factorization(&factor(a)?, m))
}

pub fn split_factorization(f: &Factorization, m: usize) -> (FpPoly, FpPoly) {
    let p = f.p();
    let mut s = FpPoly::one(p);
    let mut r = FpPoly::one(p);
    for (g, e) in f.factors() {
        let ge = g.pow(*e as u64);
        if g.deg() <= m && !g.is_t() {
            s = s.mul(&ge);
        } else {
            r = r.mul(&ge);
        }
    }
    (s, r)
}

/// Set of integers in `0..=n` stored as a bit vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeSet {
    n: usize,
    words: Vec<u64>,
}

impl DegreeSet {
    pub fn empty(n: usize) -> Self {
        DegreeSet {
            n,
            words: vec![0; n / 64 + 1],
        }
    }

    /// Every degree 0..=n.
    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for k in 0..=n {
            s.insert(k);
        }
        s
    }

    pub fn insert(&mut self, k: usize) {
        assert!(k <= self.n);
        self.words[k / 64] |= 1 << (k % 64);
    }

    pub fn contains(&self, k: usize) -> bool {
        k <= self.n && self.words[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn max_degree(&self) -> usize {
        self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.n).filter(|&k| self.contains(k))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn intersect(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        DegreeSet {
            n: self.n,
            words: self.words.iter().zip(&o.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// self ∪ (self + k), truncated at n.
    fn or_shifted(&mut self, k: usize) {
        let (ws, bs) = (k / 64, k % 64);
        for i in (0..self.words.len()).rev() {
            let mut v = 0;
            if i >= ws {
                v = self.words[i - ws] << bs;
                if bs > 0 && i > ws {
                    v |= self.words[i - ws - 1] >> (64 - bs);
                }
            }
            self.words[i] |= v;
        }
        let last = self.n % 64;
        if let Some(w) = self.words.last_mut() {
            if last < 63 {
                *w &= (1u64 << (last + 1)) - 1;
            }
        }
    }

    /// True if the only elements are 0 and n.
    pub fn is_trivial(&self) -> bool {
        self.iter().all(|k| k == 0 || k == self.n)
    }
}

impl Serialize for DegreeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.iter().collect::<Vec<_>>().serialize(s)
    }
}

/// {deg D : D monic, D | A} via subset sums of factor degrees.
pub fn divisor_degree_set(a: &FpPoly) -> Result<DegreeSet> {
    Ok(degree_set_of(&factor(a)?))
}

pub fn degree_set_of(f: &Factorization) -> DegreeSet {
    degree_set_from_parts(f.degree(), &f.degrees())
}

/// Subset sums of `parts` (a multiset summing to `n`).
pub fn degree_set_from_parts(n: usize, parts: &[u32]) -> DegreeSet {
    let mut s = DegreeSet::empty(n);
    s.insert(0);
    for &d in parts {
        s.or_shifted(d as usize);
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationType {
    pub partition: Partition,
    pub tau: u128,
    pub omega: usize,
}

/// The degree partition of A with τ(A) and ω(A).
pub fn factorization_type(a: &FpPoly) -> Result<FactorizationType> {
    if a.deg() == 0 {
        return Err(Error::invalid("factorization type of a constant"));
    }
    Ok(type_of(&factor(a)?))
}

pub fn type_of(f: &Factorization) -> FactorizationType {
    FactorizationType {
        partition: Partition::from_sorted(f.degrees()),
        tau: f.tau(),
        omega: f.omega(),
    }
}

/// Σ_{deg I = k} 1/‖I‖ = π_p(k)/p^k as an exact rational.
pub fn irreducible_density(p: u64, k: u32) -> num_rational::BigRational {
    num_rational::BigRational::new(
        BigInt::from(count_irreducibles(p, k)),
        BigInt::from(p).pow(k),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpoly::is_irreducible;

    fn fp(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec()).unwrap()
    }

    #[test]
    fn irreducible_counts() {
        assert_eq!(count_irreducibles(2, 1), BigUint::from(2u32));
        assert_eq!(count_irreducibles(2, 4), BigUint::from(3u32));
        assert_eq!(count_irreducibles(3, 2), BigUint::from(3u32));
        for (p, k) in [(2u64, 1u32), (2, 6), (3, 4), (5, 3), (7, 2)] {
            let brute = (0..p.pow(k))
                .filter(|&i| is_irreducible(&FpPoly::monic_from_index(p, k as usize, i)).unwrap())
                .count();
            assert_eq!(count_irreducibles(p, k), BigUint::from(brute));
        }
    }

    #[test]
    fn split_examples() {
        let a = fp(2, &[0, 1]).mul(&fp(2, &[1, 1])).mul(&fp(2, &[1, 1, 1]));
        let (s, r) = smooth_rough_split(&a, 1).unwrap();
        assert_eq!(s, fp(2, &[1, 1]));
        assert_eq!(r, fp(2, &[0, 1]).mul(&fp(2, &[1, 1, 1])));
        let b = fp(2, &[1, 1]).pow(2);
        assert_eq!(smooth_rough_split(&b, 2).unwrap(), (b.clone(), FpPoly::one(2)));
        let c = FpPoly::monomial(3, 5);
        assert_eq!(smooth_rough_split(&c, 5).unwrap(), (FpPoly::one(3), c.clone()));
    }

    #[test]
    fn degree_set_examples() {
        let a = fp(2, &[0, 1]).mul(&fp(2, &[1, 1])).mul(&fp(2, &[1, 1, 1]));
        let s = divisor_degree_set(&a).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
        let irr = fp(2, &[1, 1, 0, 0, 1]);
        assert!(divisor_degree_set(&irr).unwrap().is_trivial());
        let sq = fp(2, &[1, 1, 1]).pow(2);
        assert_eq!(divisor_degree_set(&sq).unwrap().iter().collect::<Vec<_>>(), vec![0, 2, 4]);
    }

    #[test]
    fn wide_degree_sets() {
        let parts = [1u32, 70, 7, 64];
        let s = degree_set_from_parts(142, &parts);
        let mut brute = std::collections::BTreeSet::new();
        for mask in 0..16u32 {
            brute.insert(
                (0..4)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| parts[i] as usize)
                    .sum::<usize>(),
            );
        }
        assert_eq!(s.iter().collect::<std::collections::BTreeSet<_>>(), brute);
    }

    #[test]
    fn type_examples() {
        let a = fp(2, &[0, 1]).mul(&fp(2, &[1, 1])).mul(&fp(2, &[1, 1, 1]));
        let t = factorization_type(&a).unwrap();
        assert_eq!(t.partition.parts(), &[1, 1, 2]);
        assert_eq!((t.tau, t.omega), (8, 3));
        let t = factorization_type(&fp(2, &[1, 1]).pow(3)).unwrap();
        assert_eq!(t.partition.parts(), &[1, 1, 1]);
        assert_eq!((t.tau, t.omega), (4, 1));
    }
}
