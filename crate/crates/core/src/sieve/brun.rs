//! The Brun sieve bound for P(D | A, (A/D, ℐ) = 1) and the probabilities it
//! is compared against.
//!
//! Everything is driven by the joint law of the "divisor masks": for each
//! prime, whether D_p | A_p and which family members I satisfy D_p·I | A_p.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{default_truncation, rough_fraction_exact, IrreducibleFamily};
use crate::equidist::layout::Layout;
use crate::equidist::{exact_table, PrimeModulusSet};
use crate::error::{Error, Result};
use crate::fpoly::FpPoly;
use crate::measures::MeasureSequence;
use crate::rng::sample_stream;

#[derive(Clone, Debug, PartialEq)]
pub struct BrunOptions {
    /// Per-prime truncation v_p; `None` uses ⌈3/2 + 2 log ℓ_p⌉.
    pub truncation: Option<Vec<u32>>,
    /// Cap on residue-table size or enumeration size for the exact paths.
    pub cap: u128,
    /// Monte Carlo fallback when neither exact path fits (0 disables it).
    pub mc_samples: u64,
    pub seed: u64,
}

impl Default for BrunOptions {
    fn default() -> Self {
        BrunOptions {
            truncation: None,
            cap: 10_000_000,
            mc_samples: 0,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilitySource {
    /// Exact law of A mod D·Π I by dynamic programming.
    ResidueDp,
    /// Exact enumeration of the coefficient support.
    Enumeration,
    /// Empirical frequencies; not a certified probability.
    MonteCarlo,
}

fn ser_q<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrunReport {
    pub n: usize,
    pub primes: Vec<u64>,
    pub moduli: Vec<String>,
    pub family_sizes: Vec<usize>,
    /// ℓ_p per prime.
    pub degree_bounds: Vec<usize>,
    pub truncation: Vec<u32>,
    /// All ℓ_p ≥ 11, the hypothesis under which the lemma is stated.
    pub hypothesis_ok: bool,
    pub source: ProbabilitySource,
    /// P(D | A, (A/D, ℐ) = 1).
    #[serde(serialize_with = "ser_q")]
    pub probability: BigRational,
    /// 2^{#𝒫}/‖D‖ · Π_p Π_I (1 − 1/‖I‖).
    #[serde(serialize_with = "ser_q")]
    pub main_term: BigRational,
    /// Σ_{ω(G_p) ≤ 2v_p} (−1)^{ω(G)}/‖DG‖.
    #[serde(serialize_with = "ser_q")]
    pub truncated_main: BigRational,
    /// Σ_{ω(G_p) ≤ 2v_p} |P(DG | A) − 1/‖DG‖|.
    #[serde(serialize_with = "ser_q")]
    pub remainder: BigRational,
    /// truncated_main + remainder; valid for every v.
    #[serde(serialize_with = "ser_q")]
    pub truncated_bound: BigRational,
    /// main_term + remainder.
    #[serde(serialize_with = "ser_q")]
    pub lemma_bound: BigRational,
    /// 2v_p + 1 ≥ 4 Σ_I 1/‖I‖ for every p, which is what lemma_bound needs.
    pub lemma_bound_applicable: bool,
    pub ok: bool,
}

/// Joint law of the per-prime masks, restricted to D | A; numerators over `den`.
struct MaskLaw {
    entries: BTreeMap<Vec<u64>, BigUint>,
    den: BigUint,
    source: ProbabilitySource,
}

struct PrimeData {
    p: u64,
    d: FpPoly,
    /// D·I for each member I.
    di: Vec<FpPoly>,
}

impl PrimeData {
    fn mask(&self, a: &FpPoly) -> Option<u64> {
        if !a.rem(&self.d).is_zero() {
            return None;
        }
        let mut mask = 0u64;
        for (i, f) in self.di.iter().enumerate() {
            if a.rem(f).is_zero() {
                mask |= 1 << i;
            }
        }
        Some(mask)
    }
}

fn masks_of(data: &[PrimeData], coeffs: &[i64]) -> Option<Vec<u64>> {
    data.iter()
        .map(|pd| {
            let a = FpPoly::from_i64(pd.p, coeffs).expect("prime checked");
            pd.mask(&a)
        })
        .collect()
}

fn law_by_dp(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    data: &[PrimeData],
) -> Result<MaskLaw> {
    let moduli: Vec<FpPoly> = data
        .iter()
        .map(|pd| pd.di.iter().fold(pd.d.clone(), |acc, f| acc.mul(&f.exact_div(&pd.d).unwrap())))
        .collect();
    let degs: Vec<usize> = moduli.iter().map(|f| f.deg()).collect();
    let layout = Layout::new(primes.primes(), &degs).expect("size capped");
    let (num, den) = exact_table(measures, n, primes, &moduli, &layout)?.into_big();
    // Per prime: mask of every residue class mod M_p.
    let per: Vec<(usize, usize, Vec<Option<u64>>)> = data
        .iter()
        .enumerate()
        .map(|(i, pd)| {
            let sub = Layout::new(&[pd.p], &[degs[i]]).unwrap();
            let masks = (0..sub.size).map(|r| pd.mask(&sub.residues_at(r)[0])).collect();
            let place = if degs[i] == 0 { 1 } else { layout.place[layout.offset[i]] };
            (place, sub.size, masks)
        })
        .collect();
    let mut entries: BTreeMap<Vec<u64>, BigUint> = BTreeMap::new();
    'outer: for (idx, x) in num.into_iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let mut key = Vec::with_capacity(per.len());
        for (place, size, masks) in &per {
            match masks[(idx / place) % size] {
                Some(m) => key.push(m),
                None => continue 'outer,
            }
        }
        *entries.entry(key).or_default() += x;
    }
    Ok(MaskLaw {
        entries,
        den,
        source: ProbabilitySource::ResidueDp,
    })
}

fn law_by_enumeration(measures: &MeasureSequence, n: usize, data: &[PrimeData]) -> MaskLaw {
    // Atoms with integer weights over a common denominator per index.
    let atoms: Vec<Vec<(i64, BigUint)>> = (0..n)
        .map(|j| {
            let at = measures.get(j).atoms();
            let den = at
                .iter()
                .fold(BigInt::one(), |a, (_, w)| a.lcm(w.denom()));
            at.into_iter()
                .map(|(a, w)| {
                    let num = (w * BigRational::from_integer(den.clone())).to_integer();
                    (a, num.to_biguint().unwrap())
                })
                .collect()
        })
        .collect();
    let den = atoms.iter().fold(BigUint::one(), |acc, at| {
        acc * at.iter().fold(BigUint::zero(), |s, (_, w)| s + w)
    });
    let mut idx = vec![0usize; n];
    let mut coeffs: Vec<i64> = atoms.iter().map(|at| at[0].0).collect();
    coeffs.push(1);
    // prefix[j] = Π_{i ≥ j} weight of the chosen atom at i.
    let mut prefix = vec![BigUint::one(); n + 1];
    for j in (0..n).rev() {
        prefix[j] = &prefix[j + 1] * &atoms[j][0].1;
    }
    let mut entries: BTreeMap<Vec<u64>, BigUint> = BTreeMap::new();
    loop {
        if let Some(key) = masks_of(data, &coeffs) {
            *entries.entry(key).or_default() += &prefix[0];
        }
        let mut t = 0;
        while t < n {
            idx[t] += 1;
            if idx[t] < atoms[t].len() {
                break;
            }
            idx[t] = 0;
            coeffs[t] = atoms[t][0].0;
            t += 1;
        }
        if t == n {
            break;
        }
        coeffs[t] = atoms[t][idx[t]].0;
        for j in (0..=t).rev() {
            prefix[j] = &prefix[j + 1] * &atoms[j][idx[j]].1;
        }
    }
    MaskLaw {
        entries,
        den,
        source: ProbabilitySource::Enumeration,
    }
}

fn law_by_sampling(
    measures: &MeasureSequence,
    n: usize,
    data: &[PrimeData],
    samples: u64,
    seed: u64,
) -> MaskLaw {
    let keys: Vec<Option<Vec<u64>>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_stream(seed, i);
            let mut c = measures.sample_coeffs(n, &mut rng);
            c.push(1);
            masks_of(data, &c)
        })
        .collect();
    let mut entries: BTreeMap<Vec<u64>, BigUint> = BTreeMap::new();
    for k in keys.into_iter().flatten() {
        *entries.entry(k).or_default() += 1u32;
    }
    MaskLaw {
        entries,
        den: BigUint::from(samples),
        source: ProbabilitySource::MonteCarlo,
    }
}

/// Submasks of `mask` with at most `k` bits.
fn submasks(mask: u64, k: u32) -> Vec<u64> {
    let mut out = Vec::new();
    let mut s = mask;
    loop {
        if s.count_ones() <= k {
            out.push(s);
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & mask;
    }
    out
}

/// The Brun sieve bound for P(D | A and no I ∈ ℐ_p divides A_p/D_p for all p),
/// together with that probability.
pub fn brun_upper_bound(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    d: &[FpPoly],
    families: &[IrreducibleFamily],
    opts: &BrunOptions,
) -> Result<BrunReport> {
    let r = primes.len();
    if d.len() != r || families.len() != r {
        return Err(Error::invalid("one modulus and one family per prime required"));
    }
    for ((dp, fam), &p) in d.iter().zip(families).zip(primes.primes()) {
        if dp.p() != p || fam.p() != p {
            return Err(Error::invalid(format!("modulus or family not over F_{p}")));
        }
        if !dp.is_monic() {
            return Err(Error::invalid(format!("{dp} is not monic")));
        }
        if fam.len() > 64 {
            return Err(Error::invalid("families are limited to 64 members"));
        }
    }
    let ells: Vec<usize> = families.iter().map(|f| f.degree_bound()).collect();
    let v: Vec<u32> = match &opts.truncation {
        Some(v) if v.len() == r && v.iter().all(|&x| x >= 1) => v.clone(),
        Some(_) => return Err(Error::invalid("one truncation v_p ≥ 1 per prime required")),
        None => ells.iter().map(|&l| default_truncation(l)).collect(),
    };
    let data: Vec<PrimeData> = d
        .iter()
        .zip(families)
        .map(|(dp, fam)| PrimeData {
            p: dp.p(),
            d: dp.clone(),
            di: fam.members().iter().map(|f| dp.mul(f)).collect(),
        })
        .collect();

    let state: u128 = data.iter().fold(1u128, |a, pd| {
        let deg = pd.d.deg() + pd.di.iter().map(|f| f.deg() - pd.d.deg()).sum::<usize>();
        a.saturating_mul((pd.p as u128).saturating_pow(deg as u32))
    });
    let support: u128 = (0..n).fold(1u128, |a, j| {
        a.saturating_mul(measures.get(j).support_len() as u128)
    });
    let law = if state <= opts.cap && state <= support {
        law_by_dp(measures, n, primes, &data)?
    } else if support <= opts.cap {
        law_by_enumeration(measures, n, &data)
    } else if opts.mc_samples > 0 {
        law_by_sampling(measures, n, &data, opts.mc_samples, opts.seed)
    } else {
        return Err(Error::CapExceeded {
            what: "brun exact probability (residue table and support enumeration)",
            needed: state.min(support),
            cap: opts.cap,
        });
    };
    let den = BigInt::from(law.den.clone());
    let q = |x: &BigUint| BigRational::new(BigInt::from(x.clone()), den.clone());

    let zero_key = vec![0u64; r];
    let probability = law
        .entries
        .get(&zero_key)
        .map(q)
        .unwrap_or_else(BigRational::zero);

    let norm_d: BigInt = data
        .iter()
        .map(|pd| BigInt::from(pd.p).pow(pd.d.deg() as u32))
        .product();
    let inv_d = BigRational::new(BigInt::one(), norm_d.clone());
    let mut main_term = BigRational::from_integer(BigInt::from(2).pow(r as u32)) * &inv_d;
    let mut truncated_main = inv_d.clone();
    let mut all_g = inv_d.clone();
    let mut lemma_bound_applicable = true;
    for (fam, &vp) in families.iter().zip(&v) {
        let k = 2 * vp as usize;
        let e = fam.elementary_sums(k);
        main_term *= fam.euler_product();
        truncated_main *= e
            .iter()
            .enumerate()
            .map(|(i, x)| if i % 2 == 0 { x.clone() } else { -x.clone() })
            .sum::<BigRational>();
        all_g *= e.iter().sum::<BigRational>();
        let lhs = BigRational::from_integer(BigInt::from(2 * vp + 1));
        if lhs < fam.reciprocal_sum() * BigRational::from_integer(4.into()) {
            lemma_bound_applicable = false;
        }
    }

    // P(DG | A) for every G with a positive probability, by superset sums.
    let member_degs: Vec<Vec<usize>> =
        families.iter().map(|f| f.members().iter().map(|m| m.deg()).collect()).collect();
    let mut hits: BTreeMap<Vec<u64>, BigUint> = BTreeMap::new();
    for (key, x) in &law.entries {
        let subs: Vec<Vec<u64>> = key.iter().zip(&v).map(|(&m, &vp)| submasks(m, 2 * vp)).collect();
        let mut idx = vec![0usize; r];
        loop {
            let g: Vec<u64> = idx.iter().zip(&subs).map(|(&i, s)| s[i]).collect();
            *hits.entry(g).or_default() += x;
            let mut t = 0;
            while t < r {
                idx[t] += 1;
                if idx[t] < subs[t].len() {
                    break;
                }
                idx[t] = 0;
                t += 1;
            }
            if t == r {
                break;
            }
        }
    }
    // Σ_G |P − u_G| = Σ_G u_G + Σ_{G hit} (|P − u_G| − u_G).
    let mut remainder = all_g;
    for (g, x) in &hits {
        let mut norm = norm_d.clone();
        for (i, &mask) in g.iter().enumerate() {
            let deg: usize = (0..64)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| member_degs[i][b])
                .sum();
            norm *= BigInt::from(data[i].p).pow(deg as u32);
        }
        let u = BigRational::new(BigInt::one(), norm);
        let pg = q(x);
        remainder += (&pg - &u).abs() - u;
    }

    let truncated_bound = &truncated_main + &remainder;
    let lemma_bound = &main_term + &remainder;
    let ok = probability <= truncated_bound && (!lemma_bound_applicable || probability <= lemma_bound);
    Ok(BrunReport {
        n,
        primes: primes.primes().to_vec(),
        moduli: d.iter().map(|f| f.to_string()).collect(),
        family_sizes: families.iter().map(|f| f.len()).collect(),
        degree_bounds: ells.clone(),
        truncation: v,
        hypothesis_ok: ells.iter().all(|&l| l >= 11),
        source: law.source,
        probability,
        main_term,
        truncated_main,
        remainder,
        truncated_bound,
        lemma_bound,
        lemma_bound_applicable,
        ok,
    })
}

/// One row of the `brun-check` table: D = 1, ℐ = all irreducibles ≠ T of
/// degree ≤ m, single prime.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrunCheck {
    pub p: u64,
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "ser_q")]
    pub exact: BigRational,
    #[serde(serialize_with = "ser_q")]
    pub bound: BigRational,
    #[serde(serialize_with = "ser_q")]
    pub lemma_bound: BigRational,
    /// exact agrees with the rough-fraction count (residue-uniform measures only).
    pub matches_rough_count: Option<bool>,
    pub hypothesis_ok: bool,
    pub ok: bool,
}

pub fn brun_check(
    measures: &MeasureSequence,
    p: u64,
    n: usize,
    m: usize,
    opts: &BrunOptions,
) -> Result<BrunCheck> {
    let primes = PrimeModulusSet::new(vec![p])?;
    let fam = IrreducibleFamily::up_to(p, m)?;
    let rep = brun_upper_bound(measures, n, &primes, &[FpPoly::one(p)], &[fam], opts)?;
    let uniform = (0..n).all(|j| measures.get(j).is_residue_uniform(p));
    let matches_rough_count = if uniform && rep.source != ProbabilitySource::MonteCarlo {
        Some(rough_fraction_exact(p, n, m)? == rep.probability)
    } else {
        None
    };
    Ok(BrunCheck {
        p,
        n,
        m,
        exact: rep.probability,
        bound: rep.truncated_bound,
        lemma_bound: rep.lemma_bound,
        matches_rough_count,
        hypothesis_ok: rep.hypothesis_ok,
        ok: rep.ok && matches_rough_count != Some(false),
    })
}

impl BrunReport {
    pub fn probability_f64(&self) -> f64 {
        self.probability.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpoly::monic_polys;
    use crate::measures::parse_measure;

    fn iid(spec: &str) -> MeasureSequence {
        MeasureSequence::iid(parse_measure(spec).unwrap())
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn spec_examples() {
        let ps = PrimeModulusSet::new(vec![2]).unwrap();
        let fam = IrreducibleFamily::new(2, vec![FpPoly::new(2, vec![1, 1]).unwrap()]).unwrap();
        let m = iid("box:0..1");
        let r = brun_upper_bound(&m, 3, &ps, &[FpPoly::one(2)], &[fam], &BrunOptions::default())
            .unwrap();
        assert_eq!(r.probability, q(1, 2));
        assert_eq!(r.main_term, q(1, 1));
        assert!(r.ok);

        let r = brun_upper_bound(
            &m,
            3,
            &ps,
            &[FpPoly::one(2)],
            &[IrreducibleFamily::empty(2)],
            &BrunOptions::default(),
        )
        .unwrap();
        assert_eq!(r.main_term, q(2, 1));
        assert!(r.probability <= r.main_term);

        let c = brun_check(&m, 2, 12, 3, &BrunOptions::default()).unwrap();
        assert!(c.ok && c.matches_rough_count == Some(true));
    }

    #[test]
    fn cap_selects_path_without_changing_result() {
        let ps = PrimeModulusSet::new(vec![3]).unwrap();
        let fam = IrreducibleFamily::up_to(3, 1).unwrap();
        let d = FpPoly::new(3, vec![1, 1]).unwrap();
        let m = iid("box:-1..3");
        let a = brun_upper_bound(&m, 5, &ps, &[d.clone()], &[fam.clone()], &BrunOptions::default())
            .unwrap();
        let small_cap = BrunOptions {
            cap: 3,
            ..BrunOptions::default()
        };
        assert!(brun_upper_bound(&m, 5, &ps, &[d.clone()], &[fam.clone()], &small_cap)
            .unwrap_err()
            .is_cap());
        let enum_only = BrunOptions {
            cap: 5u128.pow(5),
            ..BrunOptions::default()
        };
        let b = brun_upper_bound(&m, 6, &ps, &[d.clone()], &[fam.clone()], &enum_only).unwrap();
        let c = brun_upper_bound(&m, 6, &ps, &[d], &[fam], &BrunOptions::default()).unwrap();
        assert_eq!(a.source, ProbabilitySource::ResidueDp);
        assert_eq!(b.source, ProbabilitySource::ResidueDp);
        assert_eq!(b, c);
        assert!(a.ok);
    }

    #[test]
    fn enumeration_path_matches_brute_force() {
        // Family too large for the residue table; enumeration is used.
        let ps = PrimeModulusSet::new(vec![2]).unwrap();
        let fam = IrreducibleFamily::up_to(2, 4).unwrap();
        let m = iid("box:0..1");
        let opts = BrunOptions {
            cap: 1 << 12,
            ..BrunOptions::default()
        };
        let r = brun_upper_bound(&m, 9, &ps, &[FpPoly::one(2)], &[fam.clone()], &opts).unwrap();
        assert_eq!(r.source, ProbabilitySource::Enumeration);
        let good = monic_polys(2, 9).filter(|a| fam.divisor_mask(a) == 0).count();
        assert_eq!(r.probability, q(good as i64, 512));
        assert!(r.ok);
    }

    #[test]
    fn two_primes_joint() {
        let ps = PrimeModulusSet::new(vec![2, 3]).unwrap();
        let fams = [
            IrreducibleFamily::up_to(2, 2).unwrap(),
            IrreducibleFamily::up_to(3, 1).unwrap(),
        ];
        let d = [FpPoly::one(2), FpPoly::new(3, vec![2, 1]).unwrap()];
        let m = iid("box:-2..4");
        let r = brun_upper_bound(&m, 6, &ps, &d, &fams, &BrunOptions::default()).unwrap();
        let e = brun_upper_bound(
            &m,
            6,
            &ps,
            &d,
            &fams,
            &BrunOptions {
                cap: 7u128.pow(6),
                ..BrunOptions::default()
            },
        )
        .unwrap();
        assert_eq!(r.probability, e.probability);
        assert_eq!(r.remainder, e.remainder);
        assert!(r.ok);
        let mc = brun_upper_bound(
            &m,
            6,
            &ps,
            &d,
            &fams,
            &BrunOptions {
                cap: 1,
                mc_samples: 20_000,
                seed: 7,
                ..BrunOptions::default()
            },
        )
        .unwrap();
        assert_eq!(mc.source, ProbabilitySource::MonteCarlo);
        let (pe, pm) = (r.probability_f64(), mc.probability_f64());
        let sd = (pe * (1.0 - pe) / 20_000.0).sqrt();
        assert!((pe - pm).abs() <= 5.0 * sd + 1e-12);
    }

    #[test]
    fn remainder_vanishes_for_uniform_low_degree() {
        // Residue-uniform μ and deg(DG) ≤ n for every G: no remainder.
        let ps = PrimeModulusSet::new(vec![2]).unwrap();
        let fam = IrreducibleFamily::up_to(2, 2).unwrap();
        let r = brun_upper_bound(
            &iid("box:1..4"),
            8,
            &ps,
            &[FpPoly::one(2)],
            &[fam],
            &BrunOptions::default(),
        )
        .unwrap();
        assert!(r.remainder.is_zero());
        assert_eq!(r.probability, rough_fraction_exact(2, 8, 2).unwrap());
    }
}
