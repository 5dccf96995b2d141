//! Convolution of the coefficient laws through the residue ring.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::layout::Layout;
use crate::error::Result;
use crate::fpoly::FpPoly;
use crate::measures::{CoefficientMeasure, MeasureSequence};

pub(crate) trait Weight: Clone + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    /// `acc += a * w`; `None` on overflow.
    fn mul_add(acc: &mut Self, a: &Self, w: &Self) -> Option<()>;
}

impl Weight for u128 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul_add(acc: &mut Self, a: &Self, w: &Self) -> Option<()> {
        *acc = acc.checked_add(a.checked_mul(*w)?)?;
        Some(())
    }
}

impl Weight for BigUint {
    fn zero() -> Self {
        BigUint::default()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul_add(acc: &mut Self, a: &Self, w: &Self) -> Option<()> {
        *acc += a * w;
        Some(())
    }
}

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn mul_add(acc: &mut Self, a: &Self, w: &Self) -> Option<()> {
        *acc += a * w;
        Some(())
    }
}

/// Per-prime coefficient vectors of T^j mod D_p for j = 0..=n.
pub(crate) fn powers_of_t(moduli: &[FpPoly], n: usize) -> Vec<Vec<Vec<u64>>> {
    (0..=n)
        .map(|j| {
            moduli
                .iter()
                .map(|d| {
                    let r = FpPoly::monomial(d.p(), j).rem(d);
                    let mut c = r.coeffs().to_vec();
                    c.resize(d.deg(), 0);
                    c
                })
                .collect()
        })
        .collect()
}

/// Residue numerators mod P for each distinct measure used at indices < n,
/// with the index → slot map.
pub(crate) struct CoefficientLaws {
    pub slot: Vec<usize>,
    pub counts: Vec<(Vec<BigUint>, BigUint)>,
}

impl CoefficientLaws {
    pub fn new(measures: &MeasureSequence, n: usize, modulus: u64) -> Result<Self> {
        let mut distinct: Vec<&CoefficientMeasure> = Vec::new();
        let mut slot = Vec::with_capacity(n);
        for j in 0..n {
            let m = measures.get(j);
            let s = match distinct.iter().position(|x| *x == m) {
                Some(s) => s,
                None => {
                    distinct.push(m);
                    distinct.len() - 1
                }
            };
            slot.push(s);
        }
        let counts = distinct
            .iter()
            .map(|m| m.residue_counts(modulus))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoefficientLaws { slot, counts })
    }
}

/// Distinct digit shifts contributed by coefficient j, with their summed
/// residue numerators (keys are digit vectors; sorted for determinism).
fn shifts_for(
    layout: &Layout,
    tpow: &[Vec<u64>],
    counts: &[BigUint],
) -> BTreeMap<Vec<u64>, BigUint> {
    let mut out: BTreeMap<Vec<u64>, BigUint> = BTreeMap::new();
    for (r, c) in counts.iter().enumerate() {
        if Zero::is_zero(c) {
            continue;
        }
        let mut digits = Vec::with_capacity(layout.digits());
        for (i, &p) in layout.primes.iter().enumerate() {
            let a = r as u64 % p;
            digits.extend(tpow[i].iter().map(|&u| a * u % p));
        }
        *out.entry(digits).or_default() += c;
    }
    out
}

pub(crate) struct DpInput {
    pub start: usize,
    /// Per step: (shift digits, numerator).
    pub steps: Vec<Vec<(Vec<u64>, BigUint)>>,
    /// Per step: common denominator.
    pub dens: Vec<BigUint>,
}

pub(crate) fn prepare(
    layout: &Layout,
    moduli: &[FpPoly],
    laws: &CoefficientLaws,
    n: usize,
) -> DpInput {
    let tp = powers_of_t(moduli, n);
    let start_digits: Vec<u64> = tp[n].iter().flatten().copied().collect();
    let start = layout.index_of_digits(&start_digits);
    let mut steps = Vec::with_capacity(n);
    let mut dens = Vec::with_capacity(n);
    for j in 0..n {
        let (counts, den) = &laws.counts[laws.slot[j]];
        steps.push(shifts_for(layout, &tp[j], counts).into_iter().collect());
        dens.push(den.clone());
    }
    DpInput { start, steps, dens }
}

pub(crate) fn run<W: Weight>(
    layout: &Layout,
    start: usize,
    steps: &[Vec<(Vec<u64>, W)>],
    one: W,
) -> Option<Vec<W>> {
    let mut cur = vec![W::zero(); layout.size];
    cur[start] = one;
    for step in steps {
        if step.len() == 1 && step[0].0.iter().all(|&d| d == 0) {
            // Pure scaling: the shift is trivial.
            let w = &step[0].1;
            for x in cur.iter_mut() {
                let mut acc = W::zero();
                W::mul_add(&mut acc, x, w)?;
                *x = acc;
            }
            continue;
        }
        let mut next = vec![W::zero(); layout.size];
        let mut overflow = false;
        for (shift, w) in step {
            layout.for_each_shifted(shift, |s, t| {
                if !overflow && !cur[s].is_zero() && W::mul_add(&mut next[t], &cur[s], w).is_none() {
                    overflow = true;
                }
            });
            if overflow {
                return None;
            }
        }
        cur = next;
    }
    Some(cur)
}

/// Exact numerators over a common denominator.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum ExactTable {
    Small { num: Vec<u128>, den: u128 },
    Big { num: Vec<BigUint>, den: BigUint },
}

impl ExactTable {
    pub fn into_big(self) -> (Vec<BigUint>, BigUint) {
        match self {
            ExactTable::Small { num, den } => {
                (num.into_iter().map(BigUint::from).collect(), BigUint::from(den))
            }
            ExactTable::Big { num, den } => (num, den),
        }
    }

    /// max_C |num_C/den − 1/size| as (numerator, denominator) = (max|size·num − den|, size·den).
    pub fn max_deviation(&self) -> (BigUint, BigUint) {
        match self {
            ExactTable::Small { num, den } => {
                let size = num.len() as u128;
                let mut best: Option<u128> = Some(0);
                for &x in num {
                    let v = match x.checked_mul(size) {
                        Some(sx) => Some(sx.abs_diff(*den)),
                        None => None,
                    };
                    best = match (best, v) {
                        (Some(b), Some(v)) => Some(b.max(v)),
                        _ => None,
                    };
                }
                if let (Some(b), Some(d)) = (best, den.checked_mul(size)) {
                    return (BigUint::from(b), BigUint::from(d));
                }
                self.clone().to_big().max_deviation()
            }
            ExactTable::Big { num, den } => {
                let size = BigUint::from(num.len());
                let mut best = BigUint::default();
                for x in num {
                    let sx = x * &size;
                    let v = if &sx >= den { sx - den } else { den - sx };
                    if v > best {
                        best = v;
                    }
                }
                (best, den * size)
            }
        }
    }

    fn to_big(self) -> ExactTable {
        let (num, den) = self.into_big();
        ExactTable::Big { num, den }
    }
}

/// Exact DP: u128 arithmetic first, BigUint on overflow.
pub(crate) fn exact(layout: &Layout, input: &DpInput) -> ExactTable {
    let small_den = input
        .dens
        .iter()
        .try_fold(1u128, |acc, d| acc.checked_mul(d.to_u128()?));
    if let Some(den) = small_den {
        let steps: Option<Vec<Vec<(Vec<u64>, u128)>>> = input
            .steps
            .iter()
            .map(|s| {
                s.iter()
                    .map(|(k, w)| Some((k.clone(), w.to_u128()?)))
                    .collect()
            })
            .collect();
        if let Some(steps) = steps {
            if let Some(num) = run(layout, input.start, &steps, 1u128) {
                return ExactTable::Small { num, den };
            }
        }
    }
    let den = input.dens.iter().fold(BigUint::from(1u32), |a, d| a * d);
    let num = run(layout, input.start, &input.steps, BigUint::from(1u32))
        .expect("BigUint arithmetic does not overflow");
    ExactTable::Big { num, den }
}

/// Floating-point DP with an L¹ error bound on the result.
pub(crate) fn float(layout: &Layout, input: &DpInput) -> (Vec<f64>, f64) {
    let u = f64::EPSILON / 2.0;
    let mut err = 0.0f64;
    let steps: Vec<Vec<(Vec<u64>, f64)>> = input
        .steps
        .iter()
        .zip(&input.dens)
        .map(|(s, den)| {
            let k = s.len() as f64;
            // Weight conversion (≤ 2u relative each) and k-term accumulation.
            err += (1.0 + err) * (2.0 * u + k * u / (1.0 - k * u)) * 1.01;
            s.iter()
                .map(|(key, w)| {
                    let v = num_rational::BigRational::new(w.clone().into(), den.clone().into())
                        .to_f64()
                        .unwrap();
                    (key.clone(), v)
                })
                .collect()
        })
        .collect();
    let table = run(layout, input.start, &steps, 1.0f64).expect("f64 does not overflow");
    (table, err)
}
