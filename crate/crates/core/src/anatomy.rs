//! Smooth parts, additive functions and divisor degrees of random polynomials
//! mod p: Monte Carlo estimates next to exact references.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::equidist::PrimeModulusSet;
use crate::error::{check_cap, Error, Result};
use crate::fpoly::{
    count_irreducibles, degree_set_of, factor, monic_count, monic_polys, Factorization, FpPoly,
    ENUMERATION_CAP,
};
use crate::measures::MeasureSequence;
use crate::rng::sample_stream;

/// η = 1 − (1 + log log 2)/log 2, the exponent in the divisor-degree density.
pub const ETA: f64 = 0.086_071_332_055_934_3;

/// π_p(k) with T removed from degree one.
fn irreducibles_without_t(p: u64, k: usize) -> BigInt {
    let c = BigInt::from(count_irreducibles(p, k as u32));
    if k == 1 {
        c - 1
    } else {
        c
    }
}

fn q_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn ser_q<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// Factorizations of A_p for samples 0..count, in sample order.
fn sample_factorizations(
    measures: &MeasureSequence,
    n: usize,
    p: u64,
    samples: u64,
    seed: u64,
) -> Result<Vec<Factorization>> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_stream(seed, i);
            let mut c = measures.sample_coeffs(n, &mut rng);
            c.push(1);
            factor(&FpPoly::from_i64(p, &c)?)
        })
        .collect()
}

/// deg(A^{S(m)}) and τ(A^{S(m)}) from a factorization.
fn smooth_stats(f: &Factorization, m: usize) -> (usize, f64) {
    let mut deg = 0;
    let mut tau = 1.0f64;
    for (g, e) in f.factors() {
        if g.deg() <= m && !g.is_t() {
            deg += g.deg() * *e as usize;
            tau *= (*e + 1) as f64;
        }
    }
    (deg, tau)
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        Err(Error::invalid("sample count must be positive"))
    } else {
        Ok(())
    }
}

fn residue_uniform(measures: &MeasureSequence, n: usize, p: u64) -> bool {
    measures.distinct(Some(0..n)).iter().all(|m| m.is_residue_uniform(p))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnatomyReport {
    pub n: usize,
    pub p: u64,
    pub m: usize,
    pub samples: u64,
    pub seed: u64,
    /// Sample counts of deg(A^{S(m)}) = 0..=n.
    pub histogram: Vec<u64>,
    pub mean: f64,
    pub stderr: f64,
    /// Exact E[deg A^{S(m)}] under the residue-uniform law on M_p(n).
    #[serde(serialize_with = "ser_q")]
    pub exact_mean: BigRational,
    /// Whether every μ_j is residue-uniform mod p, so the exact mean applies.
    pub reference_applies: bool,
    /// (u, empirical P(deg A^{S(m)} > u·m)) for u = 2..=8.
    pub tail: Vec<(u32, f64)>,
}

impl AnatomyReport {
    /// |mean − exact| in standard errors.
    pub fn z_score(&self) -> f64 {
        let d = (self.mean - q_to_f64(&self.exact_mean)).abs();
        if self.stderr == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / self.stderr
        }
    }
}

/// Σ_{I ≠ T, deg I ≤ m} deg I · Σ_{j ≥ 1, j·deg I ≤ n} p^{−j·deg I}.
pub fn smooth_degree_expectation(p: u64, n: usize, m: usize) -> BigRational {
    let pb = BigInt::from(p);
    let mut s = BigRational::zero();
    for k in 1..=m.min(n) {
        let count = irreducibles_without_t(p, k);
        let mut inner = BigRational::zero();
        for j in 1..=n / k {
            inner += BigRational::new(BigInt::from(1), pb.pow((j * k) as u32));
        }
        s += BigRational::from_integer(count * k) * inner;
    }
    s
}

pub fn smooth_degree_stats(
    measures: &MeasureSequence,
    n: usize,
    p: u64,
    m: usize,
    samples: u64,
    seed: u64,
) -> Result<AnatomyReport> {
    check_samples(samples)?;
    if m > n {
        return Err(Error::invalid("m must not exceed n"));
    }
    let facts = sample_factorizations(measures, n, p, samples, seed)?;
    let degs: Vec<usize> = facts.iter().map(|f| smooth_stats(f, m).0).collect();
    let mut histogram = vec![0u64; n + 1];
    for &d in &degs {
        histogram[d] += 1;
    }
    let xs: Vec<f64> = degs.iter().map(|&d| d as f64).collect();
    let (mean, stderr) = mean_stderr(&xs);
    let tail = (2..=8u32)
        .map(|u| {
            let c = degs.iter().filter(|&&d| d > u as usize * m).count();
            (u, c as f64 / samples as f64)
        })
        .collect();
    Ok(AnatomyReport {
        n,
        p,
        m,
        samples,
        seed,
        histogram,
        mean,
        stderr,
        exact_mean: smooth_degree_expectation(p, n, m),
        reference_applies: residue_uniform(measures, n, p),
        tail,
    })
}

/// An additive function with f(I) ∈ {0, 1} determined by deg I, counting
/// each irreducible once (ω-type) or with multiplicity (Ω-type).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeIndicator {
    /// Degrees d with f(I) = 1 for deg I = d.
    pub degrees: Vec<usize>,
    pub with_multiplicity: bool,
}

impl DegreeIndicator {
    /// ω restricted to degrees ≤ m.
    pub fn omega(m: usize) -> Self {
        DegreeIndicator {
            degrees: (1..=m).collect(),
            with_multiplicity: false,
        }
    }

    /// Ω restricted to degrees ≤ m.
    pub fn big_omega(m: usize) -> Self {
        DegreeIndicator {
            degrees: (1..=m).collect(),
            with_multiplicity: true,
        }
    }

    pub fn zero() -> Self {
        DegreeIndicator {
            degrees: vec![],
            with_multiplicity: false,
        }
    }

    fn contains(&self, d: usize) -> bool {
        self.degrees.contains(&d)
    }

    /// f(A^{S(m)}).
    pub fn eval_smooth(&self, f: &Factorization, m: usize) -> u64 {
        f.factors()
            .iter()
            .filter(|(g, _)| g.deg() <= m && !g.is_t() && self.contains(g.deg()))
            .map(|(_, e)| if self.with_multiplicity { *e as u64 } else { 1 })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdditiveTailReport {
    pub n: usize,
    pub p: u64,
    pub m: usize,
    pub t: f64,
    pub samples: u64,
    pub seed: u64,
    pub function: DegreeIndicator,
    /// L_f(m) = Σ_{deg I ≤ m, f(I) = 1} 1/‖I‖.
    #[serde(serialize_with = "ser_q")]
    pub l: BigRational,
    /// Empirical P(f(A^{S(m)}) ≤ tL) and P(f(A^{S(m)}) ≥ tL).
    pub lower_tail: f64,
    pub upper_tail: f64,
    /// e^{−(t log t − t + 1)L}, reported without a constant.
    pub envelope: f64,
    pub mean: f64,
    pub stderr: f64,
    /// Exact E[f(A^{S(m)})] under the residue-uniform law.
    #[serde(serialize_with = "ser_q")]
    pub exact_mean: BigRational,
    pub reference_applies: bool,
    /// m ≤ n / log n.
    pub hypothesis_ok: bool,
}

/// L_f(m), summing over every irreducible (T included) of an admissible degree.
pub fn l_value(p: u64, m: usize, f: &DegreeIndicator) -> BigRational {
    let pb = BigInt::from(p);
    (1..=m)
        .filter(|&k| f.contains(k))
        .map(|k| BigRational::new(BigInt::from(count_irreducibles(p, k as u32)), pb.pow(k as u32)))
        .sum()
}

/// Exact E[f(A^{S(m)})] for A uniform on M_p(n).
pub fn additive_expectation(p: u64, n: usize, m: usize, f: &DegreeIndicator) -> BigRational {
    let pb = BigInt::from(p);
    let mut s = BigRational::zero();
    for k in (1..=m.min(n)).filter(|&k| f.contains(k)) {
        let jmax = if f.with_multiplicity { n / k } else { 1 };
        let mut inner = BigRational::zero();
        for j in 1..=jmax {
            inner += BigRational::new(BigInt::from(1), pb.pow((j * k) as u32));
        }
        s += BigRational::from_integer(irreducibles_without_t(p, k)) * inner;
    }
    s
}

#[allow(clippy::too_many_arguments)]
pub fn additive_tail(
    measures: &MeasureSequence,
    n: usize,
    p: u64,
    f: &DegreeIndicator,
    m: usize,
    t: f64,
    samples: u64,
    seed: u64,
) -> Result<AdditiveTailReport> {
    check_samples(samples)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid("t must be positive"));
    }
    let facts = sample_factorizations(measures, n, p, samples, seed)?;
    let vals: Vec<u64> = facts.iter().map(|fa| f.eval_smooth(fa, m)).collect();
    let l = l_value(p, m, f);
    let tl = t * q_to_f64(&l);
    let lower = vals.iter().filter(|&&v| v as f64 <= tl).count() as f64 / samples as f64;
    let upper = vals.iter().filter(|&&v| v as f64 >= tl).count() as f64 / samples as f64;
    let xs: Vec<f64> = vals.iter().map(|&v| v as f64).collect();
    let (mean, stderr) = mean_stderr(&xs);
    let envelope = (-(t * t.ln() - t + 1.0) * q_to_f64(&l)).exp();
    Ok(AdditiveTailReport {
        n,
        p,
        m,
        t,
        samples,
        seed,
        function: f.clone(),
        l,
        lower_tail: lower,
        upper_tail: upper,
        envelope,
        mean,
        stderr,
        exact_mean: additive_expectation(p, n, m, f),
        reference_applies: residue_uniform(measures, n, p),
        hypothesis_ok: n >= 3 && (m as f64) <= n as f64 / (n as f64).ln(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorDensity {
    pub p: u64,
    pub n: usize,
    pub k: usize,
    pub value: f64,
    /// Exact fraction in exact mode.
    #[serde(serialize_with = "ser_opt_q")]
    pub exact: Option<BigRational>,
    /// Binomial standard error in Monte Carlo mode.
    pub stderr: Option<f64>,
    /// k^{−η}(log k)^{−3/2}, a label only (k ≥ 2).
    pub reference: Option<f64>,
}

fn ser_opt_q<S: serde::Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&q.to_string()),
        None => s.serialize_none(),
    }
}

fn density_reference(k: usize) -> Option<f64> {
    (k >= 2).then(|| (k as f64).powf(-ETA) * (k as f64).ln().powf(-1.5))
}

/// Exact counts, for every k = 0..=n, of A ∈ M_p(n) with a divisor of degree k.
pub fn divisor_degree_counts(p: u64, n: usize) -> Result<Vec<u64>> {
    let total = monic_count(p, n).map_or(u128::MAX, |c| c as u128);
    check_cap("divisor-degree enumeration", total, ENUMERATION_CAP)?;
    let sets: Vec<Vec<usize>> = monic_polys(p, n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| Ok(degree_set_of(&factor(&a)?).iter().collect()))
        .collect::<Result<_>>()?;
    let mut counts = vec![0u64; n + 1];
    for s in sets {
        for k in s {
            counts[k] += 1;
        }
    }
    Ok(counts)
}

pub fn divisor_degree_density(p: u64, n: usize, k: usize, mode: DensityMode) -> Result<DivisorDensity> {
    let reference = density_reference(k);
    if k > n {
        return Ok(DivisorDensity {
            p,
            n,
            k,
            value: 0.0,
            exact: Some(BigRational::zero()),
            stderr: matches!(mode, DensityMode::MonteCarlo { .. }).then_some(0.0),
            reference,
        });
    }
    match mode {
        DensityMode::Exact => {
            let counts = divisor_degree_counts(p, n)?;
            let q = BigRational::new(
                BigInt::from(counts[k]),
                BigInt::from(p).pow(n as u32),
            );
            Ok(DivisorDensity {
                p,
                n,
                k,
                value: q_to_f64(&q),
                exact: Some(q),
                stderr: None,
                reference,
            })
        }
        DensityMode::MonteCarlo { samples, seed } => {
            check_samples(samples)?;
            let measure = crate::measures::CoefficientMeasure::uniform_box(0, p as i64 - 1)?;
            let facts = sample_factorizations(&MeasureSequence::iid(measure), n, p, samples, seed)?;
            let hits = facts.iter().filter(|f| degree_set_of(f).contains(k)).count();
            let v = hits as f64 / samples as f64;
            Ok(DivisorDensity {
                p,
                n,
                k,
                value: v,
                exact: None,
                stderr: Some((v * (1.0 - v) / samples as f64).sqrt()),
                reference,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalEventReport {
    pub n: usize,
    pub primes: Vec<u64>,
    pub epsilon: f64,
    pub m0: usize,
    pub checkpoints: Vec<usize>,
    pub samples: u64,
    pub seed: u64,
    /// Fraction of samples in the event.
    pub rate: f64,
    /// Per checkpoint: samples failing the degree or the divisor-count condition.
    pub failures: Vec<u64>,
}

/// m_j = ⌊min(2^j m0, n / log n)⌋ until the cap is reached.
pub fn checkpoints(n: usize, m0: usize) -> Result<Vec<usize>> {
    if n < 3 {
        return Err(Error::invalid("n must be at least 3"));
    }
    let top = n as f64 / (n as f64).ln();
    if m0 == 0 || m0 as f64 > top {
        return Err(Error::invalid(format!("m0 must lie in [1, n/log n] = [1, {top:.3}]")));
    }
    let cap = top.floor() as usize;
    let mut out = Vec::new();
    let mut m = m0;
    loop {
        let mj = m.min(cap);
        out.push(mj);
        if mj == cap {
            break;
        }
        m *= 2;
    }
    Ok(out)
}

/// P(deg A_p^{S(m)} ≤ εm log m and τ(A_p^{S(m)}) ≤ m^{(1+ε) log 2} at every
/// checkpoint m and every p), estimated by sampling.
pub fn normal_event_rate(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    epsilon: f64,
    m0: usize,
    samples: u64,
    seed: u64,
) -> Result<NormalEventReport> {
    check_samples(samples)?;
    if !(epsilon > 0.0) {
        return Err(Error::invalid("ε must be positive"));
    }
    let cps = checkpoints(n, m0)?;
    let per_sample: Vec<Vec<bool>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_stream(seed, i);
            let mut c = measures.sample_coeffs(n, &mut rng);
            c.push(1);
            let facts: Vec<Factorization> = primes
                .primes()
                .iter()
                .map(|&p| factor(&FpPoly::from_i64(p, &c)?))
                .collect::<Result<_>>()?;
            Ok(cps
                .iter()
                .map(|&m| {
                    let mf = m as f64;
                    facts.iter().all(|f| {
                        let (deg, tau) = smooth_stats(f, m);
                        deg as f64 <= epsilon * mf * mf.ln()
                            && tau <= mf.powf((1.0 + epsilon) * std::f64::consts::LN_2)
                    })
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut failures = vec![0u64; cps.len()];
    let mut good = 0u64;
    for s in &per_sample {
        for (f, ok) in failures.iter_mut().zip(s) {
            if !ok {
                *f += 1;
            }
        }
        if s.iter().all(|&b| b) {
            good += 1;
        }
    }
    Ok(NormalEventReport {
        n,
        primes: primes.primes().to_vec(),
        epsilon,
        m0,
        checkpoints: cps,
        samples,
        seed,
        rate: good as f64 / samples as f64,
        failures,
    })
}
