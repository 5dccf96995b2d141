//! A sound over-approximation of membership in T_n, the union of the
//! transitive subgroups of S_n other than A_n and S_n.
//!
//! A cycle type lies in some imprimitive transitive group iff it lies in a
//! wreath product S_s ≀ S_r, which the block search decides exactly. For the
//! primitive groups we only have an exclusion criterion: such a group has
//! minimal degree at least (√n − 1)/2, so an element with a non-trivial power
//! of smaller support cannot belong to one.

use std::collections::HashSet;

use num_bigint::BigUint;
use serde::Serialize;

use super::merge::power_support;
use super::CycleType;
use crate::arith::{divisors, factorize};

/// Cycles of g that together cover `blocks` blocks, each cycle meeting every
/// one of those blocks in len/blocks points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockGroup {
    pub blocks: u32,
    pub cycles: Vec<u32>,
}

/// A block system with r blocks of size s compatible with the cycle type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockWitness {
    pub r: u32,
    pub s: u32,
    pub groups: Vec<BlockGroup>,
}

/// The best non-trivial power g^m: m = lcm/q for the prime q minimizing the
/// support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerWitness {
    pub prime: u64,
    #[serde(serialize_with = "ser_big")]
    pub exponent: BigUint,
    pub support: u64,
}

fn ser_big<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    DefinitelyNotInTn,
    PossiblyInTn,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitivityReport {
    pub n: u64,
    pub cycle_type: CycleType,
    pub verdict: Membership,
    /// Some block system the element can preserve, if any.
    pub imprimitive: Option<BlockWitness>,
    /// (√n − 1)/2.
    pub min_degree_bound: f64,
    /// Smallest support of a non-identity power (None for the identity).
    pub best_power: Option<PowerWitness>,
    pub primitive_excluded: bool,
}

pub fn transitive_overapprox(sigma: &CycleType) -> TransitivityReport {
    let n = sigma.n();
    let imprimitive = block_system(sigma);
    let bound = ((n as f64).sqrt() - 1.0) / 2.0;
    let best_power = best_power(sigma);
    // support ≤ (√n − 1)/2  ⇔  (2·support + 1)² ≤ n, decided in integers.
    // The comparison is non-strict, so σ = (2,23) at n = 25 is excluded.
    let primitive_excluded = best_power
        .as_ref()
        .is_some_and(|w| (2 * w.support as u128 + 1).pow(2) <= n as u128);
    let verdict = if imprimitive.is_none() && primitive_excluded {
        Membership::DefinitelyNotInTn
    } else {
        Membership::PossiblyInTn
    };
    TransitivityReport {
        n,
        cycle_type: sigma.clone(),
        verdict,
        imprimitive,
        min_degree_bound: bound,
        best_power,
        primitive_excluded,
    }
}

/// Minimizes the support of g^m over m with g^m ≠ 1. If some ℓ ∤ m, pick a
/// prime q with v_q(m) < v_q(ℓ); every cycle of maximal q-valuation then
/// survives in g^m, and m = lcm/q keeps exactly those.
fn best_power(sigma: &CycleType) -> Option<PowerWitness> {
    let lens: Vec<u64> = sigma.parts().iter().map(|&l| l as u64).collect();
    let mut primes: Vec<u64> = lens
        .iter()
        .flat_map(|&l| factorize(l).into_iter().map(|(q, _)| q))
        .collect();
    primes.sort_unstable();
    primes.dedup();
    let lcm = lens.iter().fold(BigUint::from(1u32), |acc, &l| {
        let g = num_integer::gcd(acc.clone(), BigUint::from(l));
        acc * l / g
    });
    let val = |mut x: u64, q: u64| {
        let mut v = 0;
        while x % q == 0 {
            x /= q;
            v += 1;
        }
        v
    };
    primes
        .into_iter()
        .map(|q| {
            let top = lens.iter().map(|&l| val(l, q)).max().unwrap();
            let support = lens.iter().filter(|&&l| val(l, q) == top).sum();
            PowerWitness {
                prime: q,
                exponent: &lcm / q,
                support,
            }
        })
        .min_by_key(|w| (w.support, w.prime))
}

/// Support of g^m for a u64 exponent; handy for checking witnesses.
pub fn support_of_power(sigma: &CycleType, m: u64) -> u64 {
    power_support(sigma, m)
}

/// Searches r | n, 1 < r < n, for a grouping of the cycles compatible with
/// r blocks of size s = n/r.
pub fn block_system(sigma: &CycleType) -> Option<BlockWitness> {
    let n = sigma.n();
    if n < 4 {
        return None;
    }
    for r in divisors(n) {
        if r == 1 || r == n {
            continue;
        }
        let s = n / r;
        if let Some(groups) = group_cycles(sigma.parts(), s as u32) {
            return Some(BlockWitness {
                r: r as u32,
                s: s as u32,
                groups,
            });
        }
    }
    None
}

struct Search {
    vals: Vec<u32>,
    s: u32,
    failed: HashSet<Vec<usize>>,
}

/// Partitions the cycles into groups with total r'·s, r' dividing every
/// member length.
fn group_cycles(parts: &[u32], s: u32) -> Option<Vec<BlockGroup>> {
    let ms = super::merge::multiset(parts);
    // Distinct lengths, largest first.
    let vals: Vec<u32> = ms.keys().rev().copied().collect();
    let counts: Vec<usize> = vals.iter().map(|v| ms[v]).collect();
    let mut st = Search {
        vals,
        s,
        failed: HashSet::new(),
    };
    let mut out = Vec::new();
    st.solve(&mut counts.clone(), &mut out).then_some(out)
}

impl Search {
    fn solve(&mut self, counts: &mut Vec<usize>, out: &mut Vec<BlockGroup>) -> bool {
        let Some(first) = counts.iter().position(|&c| c > 0) else {
            return true;
        };
        if self.failed.contains(counts) {
            return false;
        }
        let l = self.vals[first];
        let remaining: u64 = counts
            .iter()
            .zip(&self.vals)
            .map(|(&c, &v)| c as u64 * v as u64)
            .sum();
        counts[first] -= 1;
        for rp in divisors(l as u64) {
            let rp = rp as u32;
            if l / rp > self.s || rp as u64 * self.s as u64 > remaining {
                continue;
            }
            let need = rp * self.s - l;
            let mut chosen = vec![l];
            if self.fill(counts, first, rp, need, &mut chosen, out) {
                counts[first] += 1;
                return true;
            }
        }
        counts[first] += 1;
        self.failed.insert(counts.clone());
        false
    }

    /// Picks further members (lengths divisible by rp, from index i on)
    /// summing to `need`, then recurses on the rest.
    fn fill(
        &mut self,
        counts: &mut Vec<usize>,
        i: usize,
        rp: u32,
        need: u32,
        chosen: &mut Vec<u32>,
        out: &mut Vec<BlockGroup>,
    ) -> bool {
        if need == 0 {
            out.push(BlockGroup {
                blocks: rp,
                cycles: chosen.clone(),
            });
            if self.solve(counts, out) {
                return true;
            }
            out.pop();
            return false;
        }
        if i >= self.vals.len() {
            return false;
        }
        let v = self.vals[i];
        if v % rp == 0 && v <= need {
            let max = counts[i].min((need / v) as usize);
            for take in (1..=max).rev() {
                counts[i] -= take;
                chosen.extend(std::iter::repeat_n(v, take));
                let ok = self.fill(counts, i + 1, rp, need - take as u32 * v, chosen, out);
                chosen.truncate(chosen.len() - take);
                counts[i] += take;
                if ok {
                    return true;
                }
            }
        }
        self.fill(counts, i + 1, rp, need, chosen, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpoly::Partition;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn ct(s: &str) -> CycleType {
        s.parse().unwrap()
    }

    fn check_witness(sigma: &CycleType, w: &BlockWitness) {
        assert_eq!(w.r as u64 * w.s as u64, sigma.n());
        assert_eq!(w.groups.iter().map(|g| g.blocks).sum::<u32>(), w.r);
        let mut all: Vec<u32> = w.groups.iter().flat_map(|g| g.cycles.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, sigma.parts());
        for g in &w.groups {
            assert!(g.cycles.iter().all(|&l| l % g.blocks == 0));
            assert_eq!(g.cycles.iter().map(|&l| l / g.blocks).sum::<u32>(), w.s);
        }
    }

    #[test]
    fn spec_examples() {
        let r = transitive_overapprox(&ct("(9)"));
        assert_eq!(r.verdict, Membership::PossiblyInTn);
        let w = r.imprimitive.unwrap();
        assert_eq!((w.r, w.s), (3, 3));
        assert_eq!(w.groups, vec![BlockGroup { blocks: 3, cycles: vec![9] }]);

        let r = transitive_overapprox(&ct("(2,23)"));
        assert!(r.imprimitive.is_none());
        let p = r.best_power.clone().unwrap();
        assert_eq!((p.prime, p.support), (2, 2));
        assert_eq!(p.exponent, BigUint::from(23u32));
        assert_eq!(r.verdict, Membership::DefinitelyNotInTn);

        let r = transitive_overapprox(&ct("(2,7)"));
        assert!(r.imprimitive.is_none());
        assert!(!r.primitive_excluded);
        assert_eq!(r.verdict, Membership::PossiblyInTn);

        assert_eq!(transitive_overapprox(&ct("(6)")).verdict, Membership::PossiblyInTn);
        assert!(transitive_overapprox(&ct("(1,1,1,1)")).best_power.is_none());
    }

    #[test]
    fn witnesses_are_consistent() {
        for n in 4..=12u32 {
            for rho in Partition::all(n) {
                let sigma = CycleType::from_partition(rho, n as u64);
                if let Some(w) = block_system(&sigma) {
                    check_witness(&sigma, &w);
                }
            }
        }
    }

    /// Elements of S_n as image vectors.
    fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
        b.iter().map(|&i| a[i]).collect()
    }

    fn cycle_type_of(g: &[usize]) -> CycleType {
        let n = g.len();
        let mut seen = vec![false; n];
        let mut parts = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut j = i;
            let mut len = 0;
            while !seen[j] {
                seen[j] = true;
                j = g[j];
                len += 1;
            }
            parts.push(len);
        }
        CycleType::from_partition(Partition::new(parts).unwrap(), n as u64)
    }

    fn generate(gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let n = gens[0].len();
        let id: Vec<usize> = (0..n).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = compose(g, &x);
                if seen.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    fn transitive(group: &[Vec<usize>]) -> bool {
        let n = group[0].len();
        let orbit: HashSet<usize> = group.iter().map(|g| g[0]).collect();
        orbit.len() == n
    }

    #[test]
    fn sound_on_random_small_groups() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for n in 2..=7usize {
            let order: usize = (1..=n).product();
            for _ in 0..150 {
                let gens: Vec<Vec<usize>> = (0..2)
                    .map(|_| {
                        let mut v: Vec<usize> = (0..n).collect();
                        v.shuffle(&mut rng);
                        v
                    })
                    .collect();
                let g = generate(&gens);
                if !transitive(&g) || 2 * g.len() >= order {
                    continue;
                }
                for x in &g {
                    let r = transitive_overapprox(&cycle_type_of(x));
                    assert_eq!(r.verdict, Membership::PossiblyInTn, "{:?}", r.cycle_type);
                }
            }
        }
        // Every 6-cycle lies in the imprimitive group C_6.
        assert_eq!(transitive_overapprox(&ct("(6)")).verdict, Membership::PossiblyInTn);
    }

    #[test]
    fn power_support_matches_witness() {
        for n in 2..=14u32 {
            for rho in Partition::all(n) {
                let sigma = CycleType::from_partition(rho, n as u64);
                let Some(w) = best_power(&sigma) else {
                    assert!(sigma.parts().iter().all(|&l| l == 1));
                    continue;
                };
                let m: u64 = w.exponent.to_string().parse().unwrap();
                assert_eq!(support_of_power(&sigma, m), w.support);
                // No exponent up to the lcm does better.
                let lcm = sigma.parts().iter().fold(1u64, |a, &l| crate::arith::lcm(a, l as u64));
                for k in 1..lcm {
                    let s = support_of_power(&sigma, k);
                    assert!(s == 0 || s >= w.support);
                }
            }
        }
    }
}
