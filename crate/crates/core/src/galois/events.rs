//! The partition events E1–E5 behind the generalized Łuczak–Pyber argument.

use serde::Serialize;

use super::ThmLPParams;
use crate::arith::{divisors, factorize, gcd};
use crate::error::{Error, Result};
use crate::fpoly::{degree_set_from_parts, Partition};

/// The numeric thresholds of E1–E5 at a given n.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventThresholds {
    pub n: u64,
    pub alpha: f64,
    /// E1: forbidden gcd size n^{κα} among parts ≤ n/4.
    pub e1_gcd_min: f64,
    /// E2: block counts r | n with 2 ≤ r ≤ n^{δ/2}.
    pub e2_r_max: f64,
    pub e2_moduli: Vec<u64>,
    /// E3: at least αt/2·log n parts in [n^{1−α}, n/log n].
    pub e3_window: (f64, f64),
    pub e3_count: f64,
    /// E4: at least t/4·log n parts k ≤ √n/3 with P⁺(k) > n^{1/8}.
    pub e4_part_max: f64,
    pub e4_prime_min: f64,
    pub e4_count: f64,
    /// E5: parts in [n^{1−2α}, n/log n] with no common divisor r ≥ 2.
    pub e5_window: (f64, f64),
}

impl EventThresholds {
    pub fn new(n: u64, params: &ThmLPParams) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("events need n ≥ 2"));
        }
        let nf = n as f64;
        let ln = nf.ln();
        let alpha = params.alpha();
        let e2_r_max = nf.powf(params.delta / 2.0);
        let e2_moduli = divisors(n)
            .into_iter()
            .filter(|&r| r >= 2 && (r as f64) <= e2_r_max)
            .collect();
        Ok(EventThresholds {
            n,
            alpha,
            e1_gcd_min: nf.powf(params.kappa * alpha),
            e2_r_max,
            e2_moduli,
            e3_window: (nf.powf(1.0 - alpha), nf / ln),
            e3_count: alpha * params.t / 2.0 * ln,
            e4_part_max: nf.sqrt() / 3.0,
            e4_prime_min: nf.powf(0.125),
            e4_count: params.t / 4.0 * ln,
            e5_window: (nf.powf(1.0 - 2.0 * alpha), nf / ln),
        })
    }
}

fn in_window(k: u32, w: (f64, f64)) -> bool {
    (k as f64) >= w.0 && (k as f64) <= w.1
}

fn window_empty(w: (f64, f64)) -> bool {
    w.0.ceil() > w.1.floor()
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionEvents {
    pub rho: Partition,
    pub e1: bool,
    pub e2: bool,
    pub e3: bool,
    pub e4: bool,
    pub e5: bool,
    /// No admissible r, so E2 holds vacuously.
    pub e2_vacuous: bool,
    /// No integer lies in the E3 (resp. E5) window.
    pub e3_window_empty: bool,
    pub e5_window_empty: bool,
    pub thresholds: EventThresholds,
}

impl PartitionEvents {
    pub fn all(&self) -> bool {
        self.e1 && self.e2 && self.e3 && self.e4 && self.e5
    }
}

/// s ↦ whether some sub-multiset of `parts` sums to s, for s = 0..=Σparts.
pub fn subset_sums(parts: &[u32]) -> Vec<bool> {
    let n: usize = parts.iter().map(|&x| x as usize).sum();
    let set = degree_set_from_parts(n, parts);
    (0..=n).map(|s| set.contains(s)).collect()
}

fn largest_prime_factor(k: u64) -> u64 {
    factorize(k).last().map_or(1, |&(q, _)| q)
}

pub fn partition_events(rho: &Partition, n: u64, params: &ThmLPParams) -> Result<PartitionEvents> {
    if rho.n() != n {
        return Err(Error::invalid(format!("{rho} is not a partition of {n}")));
    }
    let th = EventThresholds::new(n, params)?;
    let parts = rho.parts();

    // E1: no two parts (distinct positions) ≤ n/4 with a large gcd.
    let small: Vec<u32> = parts.iter().copied().filter(|&k| 4 * k as u64 <= n).collect();
    let mut e1 = true;
    'outer: for i in 0..small.len() {
        for j in i + 1..small.len() {
            if gcd(small[i] as u64, small[j] as u64) as f64 >= th.e1_gcd_min {
                e1 = false;
                break 'outer;
            }
        }
    }

    // E2: no subset sum equals nj/r.
    let sums = subset_sums(parts);
    let e2 = th.e2_moduli.iter().all(|&r| {
        (1..r).all(|j| !sums[(n * j / r) as usize])
    });

    let e3_hits = parts.iter().filter(|&&k| in_window(k, th.e3_window)).count();
    let e3 = e3_hits as f64 >= th.e3_count;

    let e4_hits = parts
        .iter()
        .filter(|&&k| {
            k as f64 <= th.e4_part_max && largest_prime_factor(k as u64) as f64 > th.e4_prime_min
        })
        .count();
    let e4 = e4_hits as f64 >= th.e4_count;

    // E5: every r ≥ 2 misses some window part ⇔ the window parts exist and
    // have gcd 1.
    let g = parts
        .iter()
        .filter(|&&k| in_window(k, th.e5_window))
        .fold(0u64, |g, &k| gcd(g, k as u64));
    let e5 = g == 1;

    Ok(PartitionEvents {
        rho: rho.clone(),
        e1,
        e2,
        e3,
        e4,
        e5,
        e2_vacuous: th.e2_moduli.is_empty(),
        e3_window_empty: window_empty(th.e3_window),
        e5_window_empty: window_empty(th.e5_window),
        thresholds: th,
    })
}
