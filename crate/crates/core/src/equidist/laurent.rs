//! Laurent expansions in F_p((1/T)), the residue functional and S_P(n; X).

use num_complex::Complex64;

use super::PrimeModulusSet;
use crate::error::{Error, Result};
use crate::fpoly::FpPoly;
use crate::interval::CertifiedInterval as CI;
use crate::measures::{magnitude_table, CoefficientMeasure, MeasureSequence};

/// The coefficients c_{−1}, …, c_{−count} of B/D ∈ F_p((1/T)) for monic D
/// and deg B < deg D. In particular res(T^j B/D) = c_{−(j+1)}.
pub fn laurent_coeffs(b: &FpPoly, d: &FpPoly, count: usize) -> Vec<u64> {
    assert!(d.is_monic(), "denominator must be monic");
    let p = d.p();
    let k = d.deg();
    if b.is_zero() || k == 0 {
        return vec![0; count];
    }
    assert!(b.deg() < k, "B/D must be a proper fraction");
    let dc = d.coeffs();
    let mut r: Vec<u64> = b.coeffs().to_vec();
    r.resize(k, 0);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        // r ← r·T; the T^k coefficient is the next Laurent coefficient.
        let c = r[k - 1];
        for i in (1..k).rev() {
            r[i] = r[i - 1];
        }
        r[0] = 0;
        if c != 0 {
            for i in 0..k {
                r[i] = ((r[i] as u128 + crate::arith::mul_mod(p - c, dc[i], p) as u128) % p as u128) as u64;
            }
        }
        out.push(c);
    }
    out
}

/// A tuple (G_p/H_p)_p with H_p monic, deg G_p < deg H_p and gcd(G_p, H_p) = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPhase {
    primes: PrimeModulusSet,
    g: Vec<FpPoly>,
    h: Vec<FpPoly>,
}

impl LaurentPhase {
    pub fn new(primes: &PrimeModulusSet, pairs: Vec<(FpPoly, FpPoly)>) -> Result<Self> {
        if pairs.len() != primes.len() {
            return Err(Error::invalid("one G/H pair per prime required"));
        }
        let mut g = Vec::new();
        let mut h = Vec::new();
        for ((gp, hp), &p) in pairs.into_iter().zip(primes.primes()) {
            if gp.p() != p || hp.p() != p {
                return Err(Error::invalid(format!("pair not over F_{p}")));
            }
            if !hp.is_monic() {
                return Err(Error::invalid(format!("H = {hp} is not monic")));
            }
            if !gp.is_zero() && gp.deg() >= hp.deg() {
                return Err(Error::invalid("deg G must be below deg H"));
            }
            if !gp.gcd(&hp).is_one() {
                return Err(Error::invalid(format!("gcd({gp}, {hp}) ≠ 1")));
            }
            g.push(gp);
            h.push(hp);
        }
        Ok(LaurentPhase {
            primes: primes.clone(),
            g,
            h,
        })
    }

    /// The zero tuple (G_p, H_p) = (0, 1).
    pub fn zero(primes: &PrimeModulusSet) -> Self {
        LaurentPhase {
            primes: primes.clone(),
            g: primes.primes().iter().map(|&p| FpPoly::zero(p)).collect(),
            h: primes.primes().iter().map(|&p| FpPoly::one(p)).collect(),
        }
    }

    pub fn numerators(&self) -> &[FpPoly] {
        &self.g
    }

    pub fn denominators(&self) -> &[FpPoly] {
        &self.h
    }

    /// ℓ_p = deg H_p.
    pub fn degrees(&self) -> Vec<usize> {
        self.h.iter().map(|h| h.deg()).collect()
    }

    /// k_j with ψ_P(T^j X) = k_j / P, for j = 0..count.
    pub fn psi_numerators(&self, count: usize) -> Vec<u64> {
        psi_numerators(&self.primes, &self.g, &self.h, count)
    }
}

pub(crate) fn psi_numerators(
    primes: &PrimeModulusSet,
    g: &[FpPoly],
    h: &[FpPoly],
    count: usize,
) -> Vec<u64> {
    let big_p = primes.product();
    let mut out = vec![0u64; count];
    for (i, &p) in primes.primes().iter().enumerate() {
        let cof = big_p / p;
        for (j, c) in laurent_coeffs(&g[i], &h[i], count).into_iter().enumerate() {
            out[j] = (out[j] + c * cof) % big_p;
        }
    }
    out
}

/// Cached |μ̂_j(k/P)| tables for the distinct measures at indices < n.
pub(crate) struct MagnitudeCache {
    slot: Vec<usize>,
    tables: Vec<Vec<CI>>,
}

impl MagnitudeCache {
    pub fn new(measures: &MeasureSequence, n: usize, big_p: u64) -> Result<Self> {
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
            .map(|m| magnitude_table(m, big_p))
            .collect::<Result<Vec<_>>>()?;
        Ok(MagnitudeCache { slot, tables })
    }

    pub fn get(&self, j: usize, k: u64) -> CI {
        self.tables[self.slot[j]][k as usize]
    }

    /// Π_{j<n} |μ̂_j(k_j/P)|.
    pub fn product(&self, ks: &[u64]) -> CI {
        let mut s = CI::point(1.0);
        for (j, &k) in ks.iter().enumerate() {
            let m = self.get(j, k);
            if m.upper() == 0.0 {
                return CI::point(0.0);
            }
            if m.lower() == 1.0 {
                continue;
            }
            s = (s * m).clamp(0.0, 1.0);
        }
        s
    }

    /// β over the indices < n.
    pub fn beta(&self) -> CI {
        let mut b: Option<CI> = None;
        for &s in &self.slot {
            for m in &self.tables[s][1..] {
                b = Some(b.map_or(*m, |x| x.max(m)));
            }
        }
        b.unwrap_or(CI::point(0.0))
    }
}

/// S_P(n; X) = Π_{j<n} |μ̂_j(ψ_P(T^j X))|.
pub fn s_value(measures: &MeasureSequence, n: usize, phase: &LaurentPhase) -> Result<CI> {
    let cache = MagnitudeCache::new(measures, n, phase.primes.product())?;
    Ok(cache.product(&phase.psi_numerators(n)))
}

/// β_n(P)^{⌊n/ℓ_q⌋} for the smallest ℓ_q ≥ 1, when the phase meets the
/// hypotheses T ∤ H_p of the L^∞ bound; `None` otherwise.
pub fn linf_bound(measures: &MeasureSequence, n: usize, phase: &LaurentPhase) -> Result<Option<CI>> {
    if phase.h.iter().any(|h| h.coeff(0) == 0) {
        return Ok(None);
    }
    let Some(lq) = phase.degrees().into_iter().filter(|&l| l >= 1).min() else {
        return Ok(None);
    };
    let cache = MagnitudeCache::new(measures, n, phase.primes.product())?;
    Ok(Some(cache.beta().powi((n / lq) as u32)))
}

/// Complex μ̂(k/P) for k = 0..P in plain floating point.
pub(crate) fn complex_table(m: &CoefficientMeasure, big_p: u64) -> Result<Vec<Complex64>> {
    let (w, _) = m.residue_masses_f64(big_p)?;
    let nz: Vec<(usize, f64)> = w
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0.0)
        .map(|(r, &x)| (r, x))
        .collect();
    let roots: Vec<Complex64> = (0..big_p)
        .map(|t| {
            Complex64::new(
                CI::cos_pi_frac(2 * t as i128, big_p).mid(),
                CI::sin_pi_frac(2 * t as i128, big_p).mid(),
            )
        })
        .collect();
    Ok((0..big_p as usize)
        .map(|k| {
            nz.iter()
                .map(|&(r, x)| roots[r * k % big_p as usize] * x)
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec()).unwrap()
    }

    #[test]
    fn laurent_of_simple_fractions() {
        // 1/(T − 1) = T^{-1} + T^{-2} + …
        assert_eq!(laurent_coeffs(&fp(3, &[1]), &fp(3, &[2, 1]), 4), vec![1, 1, 1, 1]);
        // 1/(T^2 + 1) over F_2 = T^{-2} + T^{-4} + …
        assert_eq!(laurent_coeffs(&fp(2, &[1]), &fp(2, &[1, 0, 1]), 5), vec![0, 1, 0, 1, 0]);
        // Check (B/D)·D = B on the polynomial part by multiplying back.
        let b = fp(5, &[3, 1]);
        let d = fp(5, &[2, 4, 0, 1]);
        let c = laurent_coeffs(&b, &d, 12);
        // Coefficient of T^{-m} in D·Σ c_{-k} T^{-k} must vanish for m ≥ 1.
        for m in 1..=8usize {
            let mut s = 0u64;
            for (i, &di) in d.coeffs().iter().enumerate() {
                // T^i · T^{-k} = T^{-m}  ⇒  k = m + i.
                s += di * c[m + i - 1];
            }
            assert_eq!(s % 5, 0, "m = {m}");
        }
    }

    #[test]
    fn zero_phase_gives_one() {
        let ps = PrimeModulusSet::new(vec![2, 3]).unwrap();
        let m = MeasureSequence::iid(CoefficientMeasure::uniform_box(0, 6).unwrap());
        let s = s_value(&m, 5, &LaurentPhase::zero(&ps)).unwrap();
        assert_eq!(s, CI::point(1.0));
    }

    #[test]
    fn phase_validation() {
        let ps = PrimeModulusSet::new(vec![3]).unwrap();
        assert!(LaurentPhase::new(&ps, vec![(fp(3, &[1, 1]), fp(3, &[1, 1]))]).is_err());
        assert!(LaurentPhase::new(&ps, vec![(fp(3, &[1]), fp(3, &[2, 2]))]).is_err());
        assert!(LaurentPhase::new(&ps, vec![(fp(3, &[2]), fp(3, &[1, 1]))]).is_ok());
    }
}
