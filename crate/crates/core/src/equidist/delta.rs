//! Δ_P(n; m) exactly, δ_P(n; ℓ) as a certified interval, and the two bounds
//! on δ (discrete L¹ and pointwise L^∞) for comparison.

use num_bigint::BigInt;
#[cfg(test)]
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::dp;
use super::laurent::{laurent_coeffs, MagnitudeCache};
use super::layout::Layout;
use super::{ser_rational, PrimeModulusSet};
use crate::error::{check_cap, Error, Result};
use crate::fpoly::FpPoly;
use crate::interval::CertifiedInterval as CI;
use crate::measures::{alpha_beta, MeasureSequence};

/// Default cap on the summed residue-table sizes of one Δ computation.
pub const DEFAULT_DELTA_CAP: u128 = 100_000_000;

/// Default cap on the number of (G, H) tuples of one δ computation.
pub const DEFAULT_DELTA_ELL_CAP: u128 = 20_000_000;

/// Monic D of degree exactly `d` over F_p with T ∤ D (D = 1 when d = 0).
fn coprime_to_t(p: u64, d: usize) -> Vec<FpPoly> {
    if d == 0 {
        return vec![FpPoly::one(p)];
    }
    let count = p.pow(d as u32);
    (0..count)
        .map(|i| FpPoly::monic_from_index(p, d, i))
        .filter(|f| f.coeff(0) != 0)
        .collect()
}

fn count_coprime_to_t(p: u64, d: usize) -> u128 {
    if d == 0 {
        1
    } else {
        (p as u128 - 1).saturating_mul((p as u128).saturating_pow(d as u32 - 1))
    }
}

/// All degree tuples with 0 ≤ ℓ_p ≤ m, ordered by total degree then
/// lexicographically.
fn degree_tuples(r: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..=m).map(move |d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out.sort_by_key(|t| (t.iter().sum::<usize>(), t.clone()));
    out
}

/// Every modulus tuple (D_p) with D_p monic, deg D_p ≤ m and T ∤ D_p, in
/// order of total degree.
pub fn moduli_tuples(primes: &PrimeModulusSet, m: usize) -> Vec<Vec<FpPoly>> {
    let mut out = Vec::new();
    for degs in degree_tuples(primes.len(), m) {
        let lists: Vec<Vec<FpPoly>> = primes
            .primes()
            .iter()
            .zip(&degs)
            .map(|(&p, &d)| coprime_to_t(p, d))
            .collect();
        let mut acc: Vec<Vec<FpPoly>> = vec![vec![]];
        for l in &lists {
            acc = acc
                .into_iter()
                .flat_map(|t| {
                    l.iter().map(move |f| {
                        let mut t = t.clone();
                        t.push(f.clone());
                        t
                    })
                })
                .collect();
        }
        out.extend(acc);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaRow {
    pub moduli: Vec<String>,
    pub degrees: Vec<usize>,
    /// max_C |P(A ≡ C mod D) − 1/‖D‖|.
    #[serde(serialize_with = "ser_rational")]
    pub max_deviation: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaReport {
    pub n: usize,
    pub primes: Vec<u64>,
    pub m: usize,
    pub rows: Vec<DeltaRow>,
    #[serde(serialize_with = "ser_rational")]
    pub delta: BigRational,
    pub delta_f64: f64,
    /// (m+1)^r Σ_ℓ P^{max(0, L−n/2)} α^{min(2L, n)}.
    pub bound_discrete_l1: CI,
    /// (m+1)^r Σ_ℓ (Π p^{ℓ_p}) β^{⌊n/min ℓ⌋}.
    pub bound_linfty: CI,
}

pub fn delta(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    m: usize,
) -> Result<DeltaReport> {
    delta_with_cap(measures, n, primes, m, DEFAULT_DELTA_CAP)
}

pub fn delta_with_cap(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    m: usize,
    cap: u128,
) -> Result<DeltaReport> {
    if n == 0 {
        return Err(Error::invalid("degree n must be at least 1"));
    }
    // Work estimate: summed table sizes.
    let mut work = 1u128;
    for &p in primes.primes() {
        let per: u128 = (0..=m)
            .map(|d| count_coprime_to_t(p, d).saturating_mul((p as u128).saturating_pow(d as u32)))
            .fold(0u128, |a, b| a.saturating_add(b));
        work = work.saturating_mul(per);
    }
    check_cap("delta work (summed table sizes)", work, cap)?;

    let laws = dp::CoefficientLaws::new(measures, n, primes.product())?;
    let tuples = moduli_tuples(primes, m);
    let rows: Vec<DeltaRow> = tuples
        .par_iter()
        .map(|d| {
            let degrees: Vec<usize> = d.iter().map(|f| f.deg()).collect();
            let max_deviation = if degrees.iter().all(|&x| x == 0) {
                BigRational::zero()
            } else {
                let layout = Layout::new(primes.primes(), &degrees).expect("size capped");
                let input = dp::prepare(&layout, d, &laws, n);
                let (a, b) = dp::exact(&layout, &input).max_deviation();
                BigRational::new(BigInt::from(a), BigInt::from(b))
            };
            DeltaRow {
                moduli: d.iter().map(|f| f.to_string()).collect(),
                degrees,
                max_deviation,
            }
        })
        .collect();
    let delta: BigRational = rows
        .iter()
        .fold(BigRational::zero(), |a, r| a + &r.max_deviation);

    let (l1, linf) = delta_bounds(measures, n, primes, m)?;
    Ok(DeltaReport {
        n,
        primes: primes.primes().to_vec(),
        m,
        delta_f64: delta.to_f64().unwrap_or(f64::NAN),
        delta,
        rows,
        bound_discrete_l1: l1,
        bound_linfty: linf,
    })
}

fn delta_bounds(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    m: usize,
) -> Result<(CI, CI)> {
    let ab = alpha_beta(measures, primes.product(), Some(0..n))?;
    let mut l1 = CI::point(0.0);
    let mut linf = CI::point(0.0);
    for ell in degree_tuples(primes.len(), m) {
        if ell.iter().all(|&l| l == 0) {
            continue;
        }
        l1 = l1 + discrete_l1_bound(ab.alpha, n, primes, &ell);
        linf = linf + linf_delta_bound(ab.beta, n, primes, &ell);
    }
    let k = CI::from_u128(m as u128 + 1).powi(primes.len() as u32);
    Ok((k * l1, k * linf))
}

/// P^{max(0, L−n/2)} α^{min(2L, n)}.
fn discrete_l1_bound(alpha: CI, n: usize, primes: &PrimeModulusSet, ell: &[usize]) -> CI {
    let l = ell.iter().copied().max().unwrap_or(0);
    let root_p = CI::from_u128(primes.product() as u128).sqrt();
    root_p.powi((2 * l).saturating_sub(n) as u32) * alpha.powi((2 * l).min(n) as u32)
}

/// β^{⌊n/ℓ_q⌋} for the smallest ℓ_q ≥ 1.
fn linf_pointwise(beta: CI, n: usize, ell: &[usize]) -> CI {
    let lq = ell.iter().copied().filter(|&l| l >= 1).min().unwrap_or(1);
    beta.powi((n / lq) as u32)
}

/// (Π p^{ℓ_p}) β^{⌊n/ℓ_q⌋}: the pointwise bound times the number of terms
/// over the normalisation.
fn linf_delta_bound(beta: CI, n: usize, primes: &PrimeModulusSet, ell: &[usize]) -> CI {
    let mut w = CI::point(1.0);
    for (&p, &l) in primes.primes().iter().zip(ell) {
        w = w * CI::from_u128(p as u128).powi(l as u32);
    }
    w * linf_pointwise(beta, n, ell)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaEllReport {
    pub n: usize,
    pub primes: Vec<u64>,
    pub ell: Vec<usize>,
    /// δ_P(n; ℓ).
    pub value: CI,
    /// Number of (G, H) tuples summed.
    pub terms: u128,
    /// Largest S_P(n; G/H) over the tuples.
    pub max_s: CI,
    pub alpha: CI,
    pub beta: CI,
    pub bound_discrete_l1: CI,
    /// β^{⌊n/ℓ_q⌋}, bounding every S term.
    pub linf_pointwise: CI,
    /// (Π p^{ℓ_p}) β^{⌊n/ℓ_q⌋}, bounding δ.
    pub bound_linfty: CI,
}

impl DeltaEllReport {
    /// Neither bound is certainly violated.
    pub fn bounds_hold(&self) -> bool {
        !self.value.certainly_above(self.bound_discrete_l1.upper())
            && !self.value.certainly_above(self.bound_linfty.upper())
            && !self.max_s.certainly_above(self.linf_pointwise.upper())
    }
}

/// Per prime: the ψ_P-numerator contributions (j < n) of every G/H with
/// H monic of degree ℓ, T ∤ H, and G mod H coprime to H.
fn phase_contributions(p: u64, big_p: u64, ell: usize, n: usize) -> Vec<Vec<u64>> {
    if ell == 0 {
        return vec![vec![0; n]];
    }
    let cof = big_p / p;
    let mut out = Vec::new();
    for h in coprime_to_t(p, ell) {
        for gi in 1..p.pow(ell as u32) {
            let mut c = Vec::with_capacity(ell);
            let mut x = gi;
            for _ in 0..ell {
                c.push(x % p);
                x /= p;
            }
            let g = FpPoly::new(p, c).expect("reduced");
            if !g.gcd(&h).is_one() {
                continue;
            }
            out.push(
                laurent_coeffs(&g, &h, n)
                    .into_iter()
                    .map(|x| x * cof % big_p)
                    .collect(),
            );
        }
    }
    out
}

pub fn delta_ell(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    ell: &[usize],
) -> Result<DeltaEllReport> {
    delta_ell_with_cap(measures, n, primes, ell, DEFAULT_DELTA_ELL_CAP)
}

pub fn delta_ell_with_cap(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    ell: &[usize],
    cap: u128,
) -> Result<DeltaEllReport> {
    if ell.len() != primes.len() {
        return Err(Error::invalid("one ℓ per prime required"));
    }
    if ell.iter().all(|&l| l == 0) {
        return Err(Error::invalid("max ℓ_p must be at least 1"));
    }
    if n == 0 {
        return Err(Error::invalid("degree n must be at least 1"));
    }
    let upper: u128 = primes
        .primes()
        .iter()
        .zip(ell)
        .fold(1u128, |a, (&p, &l)| {
            a.saturating_mul((p as u128).saturating_pow(2 * l as u32))
        });
    check_cap("delta_ell (G, H) tuples", upper, cap)?;

    let big_p = primes.product();
    let cache = MagnitudeCache::new(measures, n, big_p)?;
    let lists: Vec<Vec<Vec<u64>>> = primes
        .primes()
        .iter()
        .zip(ell)
        .map(|(&p, &l)| phase_contributions(p, big_p, l, n))
        .collect();

    // Fold the first list in parallel; each chunk walks the remaining lists.
    let rest = &lists[1..];
    let partials: Vec<(CI, CI, u128)> = lists[0]
        .par_iter()
        .map(|k0| {
            let mut sum = CI::point(0.0);
            let mut max = CI::point(0.0);
            let mut terms = 0u128;
            let mut idx = vec![0usize; rest.len()];
            let mut ks = vec![0u64; n];
            loop {
                for j in 0..n {
                    let mut k = k0[j];
                    for (l, &i) in rest.iter().zip(&idx) {
                        k = (k + l[i][j]) % big_p;
                    }
                    ks[j] = k;
                }
                let s = cache.product(&ks);
                sum = sum + s;
                max = max.max(&s);
                terms += 1;
                let mut t = 0;
                while t < rest.len() {
                    idx[t] += 1;
                    if idx[t] < rest[t].len() {
                        break;
                    }
                    idx[t] = 0;
                    t += 1;
                }
                if t == rest.len() {
                    break;
                }
            }
            (sum, max, terms)
        })
        .collect();
    let mut value = CI::point(0.0);
    let mut max_s = CI::point(0.0);
    let mut terms = 0u128;
    for (s, m, t) in partials {
        value = value + s;
        max_s = max_s.max(&m);
        terms += t;
    }
    let mut norm = CI::point(1.0);
    for (&p, &l) in primes.primes().iter().zip(ell) {
        norm = norm * CI::from_u128(p as u128).powi(l as u32);
    }
    let value = value.div(&norm).clamp(0.0, f64::INFINITY);

    let ab = alpha_beta(measures, big_p, Some(0..n))?;
    Ok(DeltaEllReport {
        n,
        primes: primes.primes().to_vec(),
        ell: ell.to_vec(),
        value,
        terms,
        max_s,
        alpha: ab.alpha,
        beta: ab.beta,
        bound_discrete_l1: discrete_l1_bound(ab.alpha, n, primes, ell),
        linf_pointwise: linf_pointwise(ab.beta, n, ell),
        bound_linfty: linf_delta_bound(ab.beta, n, primes, ell),
    })
}

/// Exact total mass Σ_C P(A ≡ C mod D) of one tuple, as a sanity hook for tests.
#[cfg(test)]
pub(crate) fn tuple_total(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    d: &[FpPoly],
) -> BigRational {
    let laws = dp::CoefficientLaws::new(measures, n, primes.product()).unwrap();
    let degs: Vec<usize> = d.iter().map(|f| f.deg()).collect();
    let layout = Layout::new(primes.primes(), &degs).unwrap();
    let (num, den) = dp::exact(&layout, &dp::prepare(&layout, d, &laws, n)).into_big();
    let s: BigUint = num.iter().sum();
    BigRational::new(s.into(), den.into())
}
