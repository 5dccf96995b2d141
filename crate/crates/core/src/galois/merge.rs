//! y-mergings of partitions and powers of cycle types.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::CycleType;
use crate::error::{Error, Result};
use crate::fpoly::Partition;

/// Largest number of parts accepted by [`enumerate_mergings`].
pub const MERGE_PART_CAP: usize = 20;

/// Whether σ is a y-merging of ρ: σ arises by summing blocks of at most y
/// equal parts of ρ.
pub fn is_y_merging(sigma: &Partition, rho: &Partition, y: u32) -> Result<bool> {
    if sigma.n() != rho.n() {
        return Err(Error::invalid(format!(
            "{sigma} and {rho} partition different integers"
        )));
    }
    if y == 0 {
        return Err(Error::invalid("y must be at least 1"));
    }
    let counts: Vec<(u32, usize)> = rho.counts().into_iter().collect();
    let mut rem: Vec<usize> = counts.iter().map(|&(_, c)| c).collect();
    // Largest parts first: they have the fewest ways to be formed.
    let mut parts: Vec<u32> = sigma.parts().to_vec();
    parts.reverse();
    let mut failed = HashMap::new();
    Ok(assign(&parts, 0, &counts, &mut rem, y, &mut failed))
}

/// Each σ part s is k copies of some value v of ρ with k ≤ y; memoized on
/// the remaining multiplicities.
fn assign(
    parts: &[u32],
    i: usize,
    counts: &[(u32, usize)],
    rem: &mut Vec<usize>,
    y: u32,
    failed: &mut HashMap<(usize, Vec<usize>), ()>,
) -> bool {
    if i == parts.len() {
        return rem.iter().all(|&c| c == 0);
    }
    if failed.contains_key(&(i, rem.clone())) {
        return false;
    }
    let s = parts[i];
    for (vi, &(v, _)) in counts.iter().enumerate() {
        if v > s || s % v != 0 {
            continue;
        }
        let k = (s / v) as usize;
        if k > y as usize || rem[vi] < k {
            continue;
        }
        rem[vi] -= k;
        let ok = assign(parts, i + 1, counts, rem, y, failed);
        rem[vi] += k;
        if ok {
            return true;
        }
    }
    failed.insert((i, rem.clone()), ());
    false
}

/// Partitions of c into parts ≤ y, as descending lists.
fn bounded_partitions(c: usize, y: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=max.min(rest)).rev() {
            cur.push(k);
            rec(rest - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(c, y, &mut Vec::new(), &mut out);
    out
}

/// All distinct y-mergings of ρ.
pub fn enumerate_mergings(rho: &Partition, y: u32) -> Result<BTreeSet<CycleType>> {
    if y == 0 {
        return Err(Error::invalid("y must be at least 1"));
    }
    if rho.len() > MERGE_PART_CAP {
        return Err(Error::CapExceeded {
            what: "parts in merging enumeration",
            needed: rho.len() as u128,
            cap: MERGE_PART_CAP as u128,
        });
    }
    // Blocks only merge equal parts, so each value is coarsened independently.
    let mut acc: Vec<Vec<u32>> = vec![Vec::new()];
    for (v, c) in rho.counts() {
        let opts = bounded_partitions(c, y as usize);
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for base in &acc {
            for o in &opts {
                let mut parts = base.clone();
                parts.extend(o.iter().map(|&k| k as u32 * v));
                next.push(parts);
            }
        }
        acc = next;
    }
    let n = rho.n();
    Ok(acc
        .into_iter()
        .map(|parts| CycleType::from_partition(Partition::new(parts).unwrap(), n))
        .collect())
}

/// Cycle type of g^m: an ℓ-cycle splits into gcd(ℓ, m) cycles of length
/// ℓ / gcd(ℓ, m).
pub fn cycle_power(sigma: &CycleType, m: u64) -> Result<CycleType> {
    if m == 0 {
        return Err(Error::invalid("power must be at least 1"));
    }
    let mut parts = Vec::new();
    for &l in sigma.parts() {
        let g = crate::arith::gcd(l as u64, m) as u32;
        parts.extend(std::iter::repeat_n(l / g, g as usize));
    }
    Ok(CycleType::from_partition(Partition::new(parts)?, sigma.n()))
}

/// Support size of g^m: the cycles whose length does not divide m.
pub fn power_support(sigma: &CycleType, m: u64) -> u64 {
    sigma
        .parts()
        .iter()
        .filter(|&&l| m % l as u64 != 0)
        .map(|&l| l as u64)
        .sum()
}

/// part ↦ multiplicity, as a sorted map keyed by part.
pub(crate) fn multiset(parts: &[u32]) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for &x in parts {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn ct(s: &str) -> CycleType {
        s.parse().unwrap()
    }

    /// Direct search over set partitions of the part indices of ρ.
    fn brute_mergings(rho: &Partition, y: usize) -> BTreeSet<Partition> {
        fn rec(
            i: usize,
            parts: &[u32],
            blocks: &mut Vec<Vec<u32>>,
            y: usize,
            out: &mut BTreeSet<Partition>,
        ) {
            if i == parts.len() {
                out.insert(Partition::new(blocks.iter().map(|b| b.iter().sum()).collect()).unwrap());
                return;
            }
            for b in 0..blocks.len() {
                if blocks[b].len() < y && blocks[b][0] == parts[i] {
                    blocks[b].push(parts[i]);
                    rec(i + 1, parts, blocks, y, out);
                    blocks[b].pop();
                }
            }
            blocks.push(vec![parts[i]]);
            rec(i + 1, parts, blocks, y, out);
            blocks.pop();
        }
        let mut out = BTreeSet::new();
        rec(0, rho.parts(), &mut Vec::new(), y, &mut out);
        out
    }

    #[test]
    fn worked_example() {
        let rho = pt("(1,1,2,2,2,3)");
        assert!(is_y_merging(&pt("(1,1,2,3,4)"), &rho, 2).unwrap());
        assert!(is_y_merging(&pt("(2,2,3,4)"), &rho, 2).unwrap());
        assert!(!is_y_merging(&pt("(2,3,6)"), &rho, 2).unwrap());
        assert!(is_y_merging(&rho, &rho, 1).unwrap());
        assert!(is_y_merging(&pt("(1,1,2,3,4)"), &pt("(4,3,2,1,1)"), 1).unwrap());
        assert!(is_y_merging(&pt("(1,2)"), &pt("(2)"), 2).is_err());
        assert!(is_y_merging(&pt("(2)"), &pt("(1,1)"), 2).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let names = |s: BTreeSet<CycleType>| s.into_iter().map(|c| c.to_string()).collect::<Vec<_>>();
        assert_eq!(names(enumerate_mergings(&pt("(1,1)"), 2).unwrap()), ["(1,1)", "(2)"]);
        assert_eq!(names(enumerate_mergings(&pt("(1,1,2)"), 2).unwrap()), ["(1,1,2)", "(2,2)"]);
        assert_eq!(
            names(enumerate_mergings(&pt("(1,1,1)"), 3).unwrap()),
            ["(1,1,1)", "(1,2)", "(3)"]
        );
        let many = Partition::new(vec![1; 21]).unwrap();
        assert!(enumerate_mergings(&many, 2).unwrap_err().is_cap());
    }

    #[test]
    fn matches_brute_force_up_to_eight() {
        for n in 1..=8u32 {
            let all = Partition::all(n);
            for rho in &all {
                for y in 1..=4u32 {
                    let brute = brute_mergings(rho, y as usize);
                    let fast: BTreeSet<Partition> = enumerate_mergings(rho, y)
                        .unwrap()
                        .into_iter()
                        .map(|c| c.partition().clone())
                        .collect();
                    assert_eq!(fast, brute, "rho = {rho}, y = {y}");
                    for sigma in &all {
                        assert_eq!(
                            is_y_merging(sigma, rho, y).unwrap(),
                            brute.contains(sigma),
                            "sigma = {sigma}, rho = {rho}, y = {y}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn powers() {
        assert_eq!(cycle_power(&ct("(6)"), 2).unwrap(), ct("(3,3)"));
        assert_eq!(cycle_power(&ct("(4,6)"), 2).unwrap(), ct("(2,2,3,3)"));
        assert_eq!(cycle_power(&ct("(5)"), 5).unwrap(), ct("(1,1,1,1,1)"));
        assert_eq!(power_support(&ct("(2,23)"), 23), 2);
        assert!(cycle_power(&ct("(3)"), 0).is_err());
    }
}
