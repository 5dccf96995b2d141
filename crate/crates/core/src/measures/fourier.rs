use std::ops::Range;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::{CoefficientMeasure, MeasureSequence};
use crate::arith::{divisors, gcd, is_squarefree};
use crate::error::{Error, Result};
use crate::interval::CertifiedInterval as CI;

const U: f64 = f64::EPSILON / 2.0;

/// A point k/Q of ℝ/ℤ, kept reduced with 0 ≤ k < Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RationalPhase {
    k: u64,
    q: u64,
}

impl RationalPhase {
    pub fn new(k: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("phase with zero denominator"));
        }
        let k = (k as i128).rem_euclid(q as i128) as u64;
        let g = gcd(k, q);
        Ok(RationalPhase { k: k / g, q: q / g })
    }

    pub fn zero() -> Self {
        RationalPhase { k: 0, q: 1 }
    }

    pub fn numerator(&self) -> u64 {
        self.k
    }

    pub fn denominator(&self) -> u64 {
        self.q
    }
}

/// Enclosure of (Re, Im) of μ̂(k/Q) = Σ_a μ(a) e(a k/Q).
pub fn fourier(measure: &CoefficientMeasure, phase: RationalPhase) -> Result<(CI, CI)> {
    let (k, q) = (phase.k as i128, phase.q);
    if k == 0 {
        return Ok((CI::point(1.0), CI::point(0.0)));
    }
    if let Some((lo, hi)) = measure.as_box() {
        // e((lo + (N−1)/2)θ) · sin(πNθ) / (N sin(πθ)).
        let n = (hi - lo) as i128 + 1;
        let amp = CI::sin_pi_frac(n * k % (2 * q as i128), q)
            .div(&(CI::sin_pi_frac(k, q) * CI::from_u128(n as u128)));
        let c2 = ((2 * lo as i128 + n - 1).rem_euclid(2 * q as i128) * k) % (2 * q as i128);
        let re = amp * CI::cos_pi_frac(c2, q);
        let im = amp * CI::sin_pi_frac(c2, q);
        return Ok((re.clamp(-1.0, 1.0), im.clamp(-1.0, 1.0)));
    }
    let masses = measure.residue_masses(q)?;
    let mut re = CI::point(0.0);
    let mut im = CI::point(0.0);
    for (r, w) in masses.iter().enumerate() {
        if w == &BigRational::from_integer(0.into()) {
            continue;
        }
        let w = CI::from_rational(w);
        let t = 2 * (r as i128) * k % (2 * q as i128);
        re = re + w * CI::cos_pi_frac(t, q);
        im = im + w * CI::sin_pi_frac(t, q);
    }
    Ok((re.clamp(-1.0, 1.0), im.clamp(-1.0, 1.0)))
}

/// |μ̂(j/N·)| for the uniform box of length `len`, j = 0..P, by the closed form
/// |sin(π·len·j/P)| / (len·|sin(πj/P)|).
pub fn box_magnitudes(len: u64, p: u64) -> Vec<CI> {
    let lenci = CI::from_u128(len as u128);
    let mut out = Vec::with_capacity(p as usize);
    out.push(CI::point(1.0));
    let (len_i, p_i) = (len as i128, p as i128);
    for j in 1..p_i {
        let num = CI::sin_pi_frac(len_i % p_i * j % p_i, p).abs();
        let den = CI::sin_pi_frac(j, p).abs() * lenci;
        out.push(num.div(&den).clamp(0.0, 1.0));
    }
    out
}

/// Enclosures of |μ̂(j/P)| for j = 0..P.
///
/// Boxes use the closed form. Other measures bucket their mass mod P once and
/// sum over nonzero buckets in floating point with a running error bound.
pub fn magnitude_table(measure: &CoefficientMeasure, p: u64) -> Result<Vec<CI>> {
    if p == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if let Some((lo, hi)) = measure.as_box() {
        return Ok(box_magnitudes((hi - lo) as u64 + 1, p));
    }
    let (w, w_err) = measure.residue_masses_f64(p)?;
    let buckets: Vec<(usize, f64)> = w
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0.0)
        .map(|(r, &x)| (r, x))
        .collect();
    let mut cos_t = Vec::with_capacity(p as usize);
    let mut sin_t = Vec::with_capacity(p as usize);
    let mut tab_err = 0.0f64;
    for t in 0..p as i128 {
        let c = CI::cos_pi_frac(2 * t, p);
        let s = CI::sin_pi_frac(2 * t, p);
        tab_err = tab_err.max(c.upper() - c.mid()).max(c.mid() - c.lower());
        tab_err = tab_err.max(s.upper() - s.mid()).max(s.mid() - s.lower());
        cos_t.push(c.mid());
        sin_t.push(s.mid());
    }
    let mass: f64 = buckets.iter().map(|b| b.1).sum::<f64>() * (1.0 + 2.0 * U * buckets.len() as f64);
    let k = buckets.len() as f64 + 1.0;
    let gamma = k * U / (1.0 - k * U);
    // Per component: table error, weight conversion error, and recursive
    // summation error γ_k Σ|w_r|·|trig| (including the product rounding).
    let comp_err = (tab_err * mass + w_err + gamma * mass * (1.0 + tab_err)) * (1.0 + 4.0 * U);
    let err = std::f64::consts::SQRT_2 * comp_err * (1.0 + 4.0 * U) + 4.0 * U;
    let mut out = Vec::with_capacity(p as usize);
    out.push(CI::point(1.0));
    for j in 1..p as usize {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for &(r, wr) in &buckets {
            let t = r * j % p as usize;
            re += wr * cos_t[t];
            im += wr * sin_t[t];
        }
        let h = re.hypot(im);
        out.push(CI::around(h, err + h * 4.0 * U).clamp(0.0, 1.0));
    }
    Ok(out)
}

/// α(P) from the table of |μ̂(j/P)|: the maximum over QR = P, Q > 1, and
/// cosets c mod R of (1/√Q) Σ_{j ≡ c mod R} |μ̂(j/P)|.
///
/// Since k/Q + ℓ/R = (kR + ℓQ)/P and kR + ℓQ runs over one class mod R,
/// each coset sum is exactly one of the inner sums of the definition.
pub fn alpha_from_magnitudes(table: &[CI], p: u64) -> CI {
    assert_eq!(table.len() as u64, p);
    let mut best: Option<CI> = None;
    for q in divisors(p).into_iter().filter(|&q| q > 1) {
        let r = (p / q) as usize;
        let mut sums = vec![CI::point(0.0); r];
        for (j, m) in table.iter().enumerate() {
            sums[j % r] = sums[j % r] + *m;
        }
        let inv_sqrt_q = CI::from_u128(q as u128).sqrt().recip();
        for s in sums {
            let v = s * inv_sqrt_q;
            best = Some(match best {
                None => v,
                Some(b) => b.max(&v),
            });
        }
    }
    best.expect("P > 1 has a divisor above 1")
}

fn beta_from_magnitudes(table: &[CI]) -> CI {
    table[1..]
        .iter()
        .copied()
        .reduce(|a, b| a.max(&b))
        .unwrap_or(CI::point(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaBeta {
    pub alpha: CI,
    pub beta: CI,
}

impl AlphaBeta {
    /// Certified α(P) < 1.
    pub fn certified(&self) -> bool {
        self.alpha.certainly_below(1.0)
    }
}

fn check_modulus(p: u64) -> Result<()> {
    if p <= 1 {
        return Err(Error::invalid(format!("modulus {p} must exceed 1")));
    }
    if !is_squarefree(p) {
        return Err(Error::invalid(format!("modulus {p} is not squarefree")));
    }
    Ok(())
}

/// α_n(P) and β_n(P) maximized over the measures at indices in `range`
/// (every explicit entry plus the default when `None`).
pub fn alpha_beta(
    measures: &MeasureSequence,
    p: u64,
    range: Option<Range<usize>>,
) -> Result<AlphaBeta> {
    check_modulus(p)?;
    let mut out: Option<AlphaBeta> = None;
    for m in measures.distinct(range) {
        let table = magnitude_table(m, p)?;
        let ab = AlphaBeta {
            alpha: alpha_from_magnitudes(&table, p),
            beta: beta_from_magnitudes(&table),
        };
        out = Some(match out {
            None => ab,
            Some(o) => AlphaBeta {
                alpha: o.alpha.max(&ab.alpha),
                beta: o.beta.max(&ab.beta),
            },
        });
    }
    out.ok_or_else(|| Error::invalid("empty index range"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoxBound {
    pub value: CI,
    pub below_one: bool,
}

/// Enclosure of (1/√2)(1 + (P−1)/(H sin(π/P))), the analytic upper bound on
/// α(P) for the uniform measure on [1, H].
pub fn uniform_box_bound(h: u64, p: u64) -> BoxBound {
    assert!(h >= 1 && p >= 3);
    let s = CI::sin_pi_frac(1, p) * CI::from_u128(h as u128);
    let t = CI::from_u128(p as u128 - 1).div(&s) + CI::point(1.0);
    let value = t * CI::point(2.0).sqrt().recip();
    BoxBound {
        value,
        below_one: value.certainly_below(1.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaSweepReport {
    pub modulus: u64,
    pub h_lo: u64,
    pub h_hi: u64,
    pub certified: u64,
    pub certified_by_bound: u64,
    /// Values of H for which α(P) < 1 could not be certified.
    pub failures: Vec<u64>,
    /// Largest certified upper bound on α among certified H, with its H.
    pub worst_certified: Option<(u64, f64)>,
}

impl AlphaSweepReport {
    pub fn all_certified(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Certifies α(P) < 1 for the uniform measure on [1, H], for each H in
/// `[h_lo, h_hi]`. Runs in the current rayon pool; the report does not depend
/// on the number of workers.
pub fn certify_alpha_range(h_lo: u64, h_hi: u64, p: u64) -> Result<AlphaSweepReport> {
    check_modulus(p)?;
    if h_lo == 0 || h_lo > h_hi {
        return Err(Error::invalid(format!("bad H range {h_lo}..{h_hi}")));
    }
    // Verdict per H: (certified, by_bound, alpha upper).
    let verdicts: Vec<(bool, bool, f64)> = (h_lo as usize..h_hi as usize + 1)
        .into_par_iter()
        .with_min_len(64)
        .map(|h| {
            let h = h as u64;
            if p >= 3 {
                let b = uniform_box_bound(h, p);
                if b.below_one {
                    return (true, true, b.value.upper());
                }
            }
            let a = alpha_from_magnitudes(&box_magnitudes(h, p), p);
            (a.certainly_below(1.0), false, a.upper())
        })
        .collect();
    let mut report = AlphaSweepReport {
        modulus: p,
        h_lo,
        h_hi,
        certified: 0,
        certified_by_bound: 0,
        failures: Vec::new(),
        worst_certified: None,
    };
    for (h, (ok, by_bound, upper)) in (h_lo..=h_hi).zip(verdicts) {
        if ok {
            report.certified += 1;
            report.certified_by_bound += by_bound as u64;
            if report.worst_certified.is_none_or(|(_, w)| upper > w) {
                report.worst_certified = Some((h, upper));
            }
        } else {
            report.failures.push(h);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ph(k: i64, q: u64) -> RationalPhase {
        RationalPhase::new(k, q).unwrap()
    }

    /// Direct summation over atoms in plain f64; independent of both code paths.
    fn naive(m: &CoefficientMeasure, k: i64, q: u64) -> (f64, f64) {
        use num_traits::ToPrimitive;
        m.atoms().iter().fold((0.0, 0.0), |(re, im), (a, w)| {
            let x = 2.0 * std::f64::consts::PI * ((*a as i128 * k as i128).rem_euclid(q as i128)) as f64
                / q as f64;
            let w = w.to_f64().unwrap();
            (re + w * x.cos(), im + w * x.sin())
        })
    }

    #[test]
    fn spec_examples() {
        let u4 = CoefficientMeasure::uniform_box(1, 4).unwrap();
        let (re, im) = fourier(&u4, ph(1, 2)).unwrap();
        assert!(re.contains(0.0) && im.contains(0.0) && re.width() < 1e-14);
        let anything = CoefficientMeasure::uniform_set(vec![1, 5, 9]).unwrap();
        assert_eq!(
            fourier(&anything, RationalPhase::zero()).unwrap(),
            (CI::point(1.0), CI::point(0.0))
        );
        let d3 = CoefficientMeasure::point(3);
        let (re, im) = fourier(&d3, ph(1, 4)).unwrap();
        assert!(re.contains(0.0) && im.contains(-1.0));
    }

    #[test]
    fn phase_reduction() {
        assert_eq!(ph(6, 8), ph(3, 4));
        assert_eq!(ph(-1, 4), ph(3, 4));
        assert_eq!(ph(8, 4), RationalPhase::zero());
        assert!(RationalPhase::new(1, 0).is_err());
    }

    #[test]
    fn box_closed_form_matches_naive() {
        for (lo, hi) in [(1, 35), (-7, 12), (0, 0), (5, 6), (-30, -3)] {
            let m = CoefficientMeasure::uniform_box(lo, hi).unwrap();
            for q in 2..40u64 {
                for k in 1..q as i64 {
                    let (re, im) = fourier(&m, ph(k, q)).unwrap();
                    let (nr, ni) = naive(&m, k, q);
                    assert!((re.mid() - nr).abs() < 1e-12, "{lo}..{hi} {k}/{q}");
                    assert!((im.mid() - ni).abs() < 1e-12);
                    assert!(re.width() < 1e-12 && im.width() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn weighted_matches_naive() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let m = CoefficientMeasure::weighted(vec![(-3, q(1, 6)), (2, q(1, 2)), (11, q(1, 3))]).unwrap();
        for qq in 2..30u64 {
            let table = magnitude_table(&m, qq).unwrap();
            for k in 0..qq as i64 {
                let (re, im) = fourier(&m, ph(k, qq)).unwrap();
                let (nr, ni) = naive(&m, k, qq);
                assert!(re.contains(nr) || (re.mid() - nr).abs() < 1e-14);
                assert!(im.contains(ni) || (im.mid() - ni).abs() < 1e-14);
                let mag = nr.hypot(ni);
                assert!(table[k as usize].lower() <= mag + 1e-14);
                assert!(mag - 1e-14 <= table[k as usize].upper());
            }
        }
    }

    #[test]
    fn alpha_exact_values() {
        let u210 = MeasureSequence::iid(CoefficientMeasure::uniform_box(1, 210).unwrap());
        let ab = alpha_beta(&u210, 210, None).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(ab.alpha.lower() > r - 1e-10 && ab.alpha.upper() < r + 1e-10);
        assert!(ab.beta.upper() < 1e-12);

        let d5 = MeasureSequence::iid(CoefficientMeasure::point(5));
        let ab = alpha_beta(&d5, 6, None).unwrap();
        let s6 = 6f64.sqrt();
        assert!(ab.alpha.lower() > s6 - 1e-12 && ab.alpha.upper() < s6 + 1e-12);
        assert!(ab.beta.contains(1.0));
    }

    #[test]
    fn alpha_rejects_bad_modulus() {
        let m = MeasureSequence::iid(CoefficientMeasure::point(0));
        assert!(alpha_beta(&m, 12, None).is_err());
        assert!(alpha_beta(&m, 1, None).is_err());
    }

    #[test]
    fn box_bound_examples() {
        assert!(uniform_box_bound(33730, 210).below_one);
        assert!(!uniform_box_bound(33729, 210).below_one);
        let b = uniform_box_bound(1000, 210);
        assert!(!b.below_one && b.value.lower() > 1.0);
        let u = MeasureSequence::iid(CoefficientMeasure::uniform_box(1, 1000).unwrap());
        assert!(alpha_beta(&u, 210, None).unwrap().certified());
        let far = uniform_box_bound(1 << 40, 210);
        assert!(far.value.lower() > std::f64::consts::FRAC_1_SQRT_2);
        assert!(far.value.upper() < uniform_box_bound(1 << 30, 210).value.lower());
    }

    #[test]
    fn sweep_small_ranges() {
        let r = certify_alpha_range(33730, 33740, 210).unwrap();
        assert!(r.all_certified());
        assert_eq!(r.certified_by_bound, 11);
        let r = certify_alpha_range(1, 1, 210).unwrap();
        assert_eq!(r.failures, vec![1]);
        let u35 = MeasureSequence::iid(CoefficientMeasure::uniform_box(1, 35).unwrap());
        assert!(alpha_beta(&u35, 210, None).unwrap().alpha.upper() < 1.0);
    }
}
