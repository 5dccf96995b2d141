//! Residue law by character-sum inversion over the additive characters
//! C ↦ e(ψ_P(C·B/D)), deg B_p < deg D_p.

use num_complex::Complex64;

use super::laurent::{complex_table, laurent_coeffs};
use super::layout::Layout;
use super::PrimeModulusSet;
use crate::error::Result;
use crate::fpoly::FpPoly;
use crate::interval::CertifiedInterval as CI;
use crate::measures::{CoefficientMeasure, MeasureSequence};

fn unit(k: u64, big_p: u64) -> Complex64 {
    Complex64::new(
        CI::cos_pi_frac(2 * k as i128, big_p).mid(),
        CI::sin_pi_frac(2 * k as i128, big_p).mid(),
    )
}

pub(crate) fn invert(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    moduli: &[FpPoly],
    layout: &Layout,
) -> Result<Vec<f64>> {
    let big_p = primes.product();
    let mut distinct: Vec<&CoefficientMeasure> = Vec::new();
    let mut slot = Vec::with_capacity(n);
    for j in 0..n {
        let m = measures.get(j);
        slot.push(match distinct.iter().position(|x| *x == m) {
            Some(s) => s,
            None => {
                distinct.push(m);
                distinct.len() - 1
            }
        });
    }
    let tables = distinct
        .iter()
        .map(|m| complex_table(m, big_p))
        .collect::<Result<Vec<_>>>()?;
    let roots: Vec<Complex64> = (0..big_p).map(|k| unit(k, big_p)).collect();
    let count = moduli.iter().map(|d| d.deg()).max().unwrap_or(0).max(n + 1);

    let mut out = vec![0.0f64; layout.size];
    let mut phase = Vec::with_capacity(layout.size);
    for b_idx in 0..layout.size {
        let b = layout.residues_at(b_idx);
        // Per-prime Laurent coefficients of B_p/D_p, combined into ψ_P numerators.
        let mut k = vec![0u64; count];
        let mut digit_w = Vec::with_capacity(layout.digits());
        for (i, (bp, dp)) in b.iter().zip(moduli).enumerate() {
            let cof = big_p / layout.primes[i];
            let c = laurent_coeffs(bp, dp, count);
            for (kj, &cj) in k.iter_mut().zip(&c) {
                *kj = (*kj + cj * cof) % big_p;
            }
            digit_w.extend(c[..dp.deg()].iter().map(|&cj| cj * cof % big_p));
        }
        // E[e(ψ(A·B/D))] = e(ψ(T^n B/D)) Π_j μ̂_j(ψ(T^j B/D)).
        let mut e = roots[k[n] as usize];
        for j in 0..n {
            e *= tables[slot[j]][k[j] as usize];
            if e.norm_sqr() == 0.0 {
                break;
            }
        }
        if e.norm_sqr() == 0.0 {
            continue;
        }
        // ψ(C·B/D) is additive in the digits of C.
        phase.clear();
        phase.push(0u64);
        for (t, &w) in digit_w.iter().enumerate() {
            let len = phase.len();
            for d in 1..layout.radix[t] {
                for i in 0..len {
                    let v = ((phase[i] as u128 + d as u128 * w as u128) % big_p as u128) as u64;
                    phase.push(v);
                }
            }
        }
        for (o, &ph) in out.iter_mut().zip(&phase) {
            *o += (e * roots[((big_p - ph) % big_p) as usize]).re;
        }
    }
    let inv = 1.0 / layout.size as f64;
    out.iter_mut().for_each(|x| *x *= inv);
    Ok(out)
}
