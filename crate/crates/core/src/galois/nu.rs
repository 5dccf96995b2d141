//! The law ν of the factorization type τ_{A_p}, exhaustively or by sampling.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::events::subset_sums;
use crate::error::{check_cap, Error, Result};
use crate::fpoly::{factor, monic_count, FpPoly, Partition, ENUMERATION_CAP};
use crate::measures::MeasureSequence;
use crate::rng::sample_stream;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NuMode {
    Exhaustive,
    MonteCarlo { samples: u64, seed: u64 },
}

/// A probability under ν: exact when enumerated, with a standard error when
/// sampled.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuValue {
    pub value: f64,
    #[serde(serialize_with = "ser_opt_q")]
    pub exact: Option<BigRational>,
    pub stderr: Option<f64>,
}

fn ser_opt_q<S: serde::Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_some(&q.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub k: u32,
    pub l: u32,
    pub nu: NuValue,
    /// 2/(kℓ).
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailCheck {
    pub m: u32,
    /// L = Σ_{k ≤ m} 1/k.
    pub l: f64,
    pub t: f64,
    /// ν(#{parts ≤ m} ≤ tL).
    pub nu: NuValue,
    /// exp(−(t log t − t + 1) L).
    pub reference: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NuReport {
    pub n: usize,
    pub p: u64,
    pub exhaustive: bool,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// ν of all partitions of n; 1 up to rounding.
    pub total: NuValue,
    pub residue_uniform: bool,
    /// Pairs 2 ≤ k ≤ ℓ ≤ n/4.
    pub pairs: Vec<PairCheck>,
    /// The pair bound is asserted only for exhaustive, residue-uniform runs,
    /// where the discrepancy hypothesis holds exactly.
    pub pair_bound_asserted: bool,
    pub pair_bound_ok: bool,
    /// ν(some sub-multiset of parts sums to k), k = 0..=n.
    pub subset_sum: Vec<NuValue>,
    pub tails: Vec<TailCheck>,
    /// The law of τ itself, by partition.
    pub distribution: Vec<(Partition, NuValue)>,
}

/// Lower-tail parameter used in the tail checks.
pub const TAIL_T: f64 = 0.5;

/// Exact type law: partition ↦ weight over a common denominator.
fn exhaustive_law(measures: &MeasureSequence, n: usize, p: u64) -> Result<(BTreeMap<Partition, u128>, u128)> {
    let total = monic_count(p, n).map_or(u128::MAX, |c| c as u128);
    check_cap("monic polynomials to enumerate", total, ENUMERATION_CAP)?;
    let mut counts = Vec::with_capacity(n);
    let mut den: u128 = 1;
    for j in 0..n {
        let (c, t) = measures.get(j).residue_counts(p)?;
        let too_big = || Error::CapExceeded {
            what: "common denominator of the residue law",
            needed: u128::MAX,
            cap: u128::MAX >> 1,
        };
        let c: Vec<u128> = c.iter().map(|x| x.to_u128().ok_or_else(too_big)).collect::<Result<_>>()?;
        den = den
            .checked_mul(t.to_u128().ok_or_else(too_big)?)
            .filter(|&d| d <= u128::MAX >> 1)
            .ok_or_else(too_big)?;
        counts.push(c);
    }
    let count = total as u64;
    let law = (0..count)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<Partition, u128>, idx| {
            let a = FpPoly::monic_from_index(p, n, idx);
            let w = (0..n).fold(1u128, |w, j| w * counts[j][a.coeff(j) as usize]);
            if w > 0 {
                let mut d = factor(&a).expect("monic").degrees();
                d.sort_unstable();
                *acc.entry(Partition::new(d).unwrap()).or_insert(0) += w;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok((law, den))
}

fn sampled_law(measures: &MeasureSequence, n: usize, p: u64, samples: u64, seed: u64) -> Result<BTreeMap<Partition, u128>> {
    let types: Vec<Partition> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Partition> {
            let mut rng = sample_stream(seed, i);
            let mut c = measures.sample_coeffs(n, &mut rng);
            c.push(1);
            let mut d = factor(&FpPoly::from_i64(p, &c)?)?.degrees();
            d.sort_unstable();
            Ok(Partition::new(d).unwrap())
        })
        .collect::<Result<_>>()?;
    let mut law = BTreeMap::new();
    for t in types {
        *law.entry(t).or_insert(0u128) += 1;
    }
    Ok(law)
}

/// Probability of an event from the law.
fn measure_event(
    law: &BTreeMap<Partition, u128>,
    den: u128,
    exact: bool,
    event: impl Fn(&Partition) -> bool,
) -> NuValue {
    let hits: u128 = law.iter().filter(|(k, _)| event(k)).map(|(_, &v)| v).sum();
    let value = hits as f64 / den as f64;
    if exact {
        NuValue {
            value,
            exact: Some(BigRational::new(BigInt::from(hits), BigInt::from(den))),
            stderr: None,
        }
    } else {
        NuValue {
            value,
            exact: None,
            stderr: Some((value * (1.0 - value) / den as f64).sqrt()),
        }
    }
}

fn contains_pair(rho: &Partition, k: u32, l: u32) -> bool {
    if k == l {
        rho.multiplicity(k) >= 2
    } else {
        rho.contains(k) && rho.contains(l)
    }
}

pub fn nu_checks(measures: &MeasureSequence, n: usize, p: u64, mode: NuMode) -> Result<NuReport> {
    if n == 0 {
        return Err(Error::invalid("degree must be positive"));
    }
    let (law, den, exact, samples, seed) = match mode {
        NuMode::Exhaustive => {
            let (law, den) = exhaustive_law(measures, n, p)?;
            (law, den, true, None, None)
        }
        NuMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::invalid("sample count must be positive"));
            }
            (sampled_law(measures, n, p, samples, seed)?, samples as u128, false, Some(samples), Some(seed))
        }
    };
    let residue_uniform = (0..n).all(|j| measures.get(j).is_residue_uniform(p));
    let total = measure_event(&law, den, exact, |_| true);

    let quarter = (n / 4) as u32;
    let mut pairs = Vec::new();
    for k in 2..=quarter {
        for l in k..=quarter {
            let nu = measure_event(&law, den, exact, |r| contains_pair(r, k, l));
            let bound = 2.0 / (k as f64 * l as f64);
            let holds = match &nu.exact {
                Some(q) => q * BigRational::from_integer(BigInt::from(k * l)) <= BigRational::from_integer(2.into()),
                None => nu.value <= bound,
            };
            pairs.push(PairCheck { k, l, nu, bound, holds });
        }
    }
    let pair_bound_asserted = exact && residue_uniform;
    let pair_bound_ok = pairs.iter().all(|c| c.holds);

    let sums: BTreeMap<&Partition, Vec<bool>> = law.keys().map(|k| (k, subset_sums(k.parts()))).collect();
    let subset_sum = (0..=n)
        .map(|s| measure_event(&law, den, exact, |r| sums[r][s]))
        .collect();

    let mmax = ((n as f64) / (n as f64).ln()).floor().max(1.0) as u32;
    let tails = (1..=mmax)
        .map(|m| {
            let l: f64 = (1..=m).map(|k| 1.0 / k as f64).sum();
            let t = TAIL_T;
            let nu = measure_event(&law, den, exact, |r| {
                (r.parts().iter().filter(|&&k| k <= m).count() as f64) <= t * l
            });
            TailCheck {
                m,
                l,
                t,
                nu,
                reference: (-(t * t.ln() - t + 1.0) * l).exp(),
            }
        })
        .collect();

    let distribution = law
        .keys()
        .map(|k| (k.clone(), measure_event(&law, den, exact, |r| r == k)))
        .collect();

    Ok(NuReport {
        n,
        p,
        exhaustive: exact,
        samples,
        seed,
        total,
        residue_uniform,
        pairs,
        pair_bound_asserted,
        pair_bound_ok,
        subset_sum,
        tails,
        distribution,
    })
}
