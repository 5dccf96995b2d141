//! Finitely supported coefficient measures on ℤ and their Fourier data.

mod fourier;
mod modulus;
mod spec;

pub use fourier::{
    alpha_beta, alpha_from_magnitudes, box_magnitudes, certify_alpha_range, fourier,
    magnitude_table, uniform_box_bound, AlphaBeta, AlphaSweepReport, BoxBound, RationalPhase,
};
pub use modulus::{find_good_modulus, sth_power_modulus, GoodModulus};
pub use spec::{parse_measure, MeasureReport};

use std::ops::Range;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Largest support size accepted for uniform boxes; keeps atoms exactly
/// representable in `f64` sampling and counting.
pub const MAX_BOX_LEN: u64 = 1 << 52;

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Box { lo: i64, hi: i64 },
    Uniform(Vec<i64>),
    Weighted {
        atoms: Vec<i64>,
        weights: Vec<BigRational>,
        cumulative: Vec<f64>,
    },
}

/// A probability measure on ℤ with finite support and rational weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMeasure {
    repr: Repr,
}

impl CoefficientMeasure {
    /// Uniform measure on the integers in `[lo, hi]`.
    pub fn uniform_box(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid(format!("empty box {lo}..{hi}")));
        }
        let len = (hi as i128 - lo as i128 + 1) as u128;
        if len > MAX_BOX_LEN as u128 {
            return Err(Error::invalid(format!("box {lo}..{hi} too large")));
        }
        Ok(CoefficientMeasure {
            repr: Repr::Box { lo, hi },
        })
    }

    /// Uniform measure on a finite set; duplicates are merged.
    pub fn uniform_set(mut atoms: Vec<i64>) -> Result<Self> {
        atoms.sort_unstable();
        atoms.dedup();
        if atoms.is_empty() {
            return Err(Error::invalid("empty support"));
        }
        if atoms.len() as u64 == (atoms[atoms.len() - 1] as i128 - atoms[0] as i128 + 1) as u64 {
            return Self::uniform_box(atoms[0], atoms[atoms.len() - 1]);
        }
        Ok(CoefficientMeasure {
            repr: Repr::Uniform(atoms),
        })
    }

    pub fn point(a: i64) -> Self {
        CoefficientMeasure {
            repr: Repr::Box { lo: a, hi: a },
        }
    }

    /// Measure with explicit rational weights. Repeated atoms have their
    /// weights added; weights must be positive and sum to exactly 1.
    pub fn weighted(pairs: Vec<(i64, BigRational)>) -> Result<Self> {
        let mut pairs = pairs;
        pairs.sort_by_key(|(a, _)| *a);
        let mut atoms: Vec<i64> = Vec::with_capacity(pairs.len());
        let mut weights: Vec<BigRational> = Vec::with_capacity(pairs.len());
        for (a, w) in pairs {
            if !w.is_positive() {
                return Err(Error::invalid(format!("non-positive weight {w} at atom {a}")));
            }
            if atoms.last() == Some(&a) {
                *weights.last_mut().unwrap() += w;
            } else {
                atoms.push(a);
                weights.push(w);
            }
        }
        if atoms.is_empty() {
            return Err(Error::invalid("empty support"));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        if weights.iter().all(|w| *w == weights[0]) {
            return Self::uniform_set(atoms);
        }
        let mut acc = BigRational::zero();
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc.to_f64().unwrap()
            })
            .collect();
        Ok(CoefficientMeasure {
            repr: Repr::Weighted {
                atoms,
                weights,
                cumulative,
            },
        })
    }

    pub fn support_len(&self) -> u64 {
        match &self.repr {
            Repr::Box { lo, hi } => (*hi - *lo) as u64 + 1,
            Repr::Uniform(a) => a.len() as u64,
            Repr::Weighted { atoms, .. } => atoms.len() as u64,
        }
    }

    pub fn min_atom(&self) -> i64 {
        match &self.repr {
            Repr::Box { lo, .. } => *lo,
            Repr::Uniform(a) | Repr::Weighted { atoms: a, .. } => a[0],
        }
    }

    pub fn max_atom(&self) -> i64 {
        match &self.repr {
            Repr::Box { hi, .. } => *hi,
            Repr::Uniform(a) | Repr::Weighted { atoms: a, .. } => a[a.len() - 1],
        }
    }

    /// The support bound H = max |a|.
    pub fn height(&self) -> u64 {
        self.min_atom().unsigned_abs().max(self.max_atom().unsigned_abs())
    }

    /// `Some((lo, hi))` when this is the uniform measure on an integer interval.
    pub fn as_box(&self) -> Option<(i64, i64)> {
        match self.repr {
            Repr::Box { lo, hi } => Some((lo, hi)),
            _ => None,
        }
    }

    pub fn is_point(&self) -> bool {
        self.support_len() == 1
    }

    /// All atoms with their weights, ascending. Materializes boxes.
    pub fn atoms(&self) -> Vec<(i64, BigRational)> {
        match &self.repr {
            Repr::Box { lo, hi } => {
                let w = BigRational::new(BigInt::one(), BigInt::from(self.support_len()));
                (*lo..=*hi).map(|a| (a, w.clone())).collect()
            }
            Repr::Uniform(a) => {
                let w = BigRational::new(BigInt::one(), BigInt::from(a.len()));
                a.iter().map(|&x| (x, w.clone())).collect()
            }
            Repr::Weighted { atoms, weights, .. } => {
                atoms.iter().copied().zip(weights.iter().cloned()).collect()
            }
        }
    }

    /// μ({a}).
    pub fn weight_of(&self, a: i64) -> BigRational {
        match &self.repr {
            Repr::Box { lo, hi } => {
                if (*lo..=*hi).contains(&a) {
                    BigRational::new(BigInt::one(), BigInt::from(self.support_len()))
                } else {
                    BigRational::zero()
                }
            }
            Repr::Uniform(atoms) => match atoms.binary_search(&a) {
                Ok(_) => BigRational::new(BigInt::one(), BigInt::from(atoms.len())),
                Err(_) => BigRational::zero(),
            },
            Repr::Weighted { atoms, weights, .. } => match atoms.binary_search(&a) {
                Ok(i) => weights[i].clone(),
                Err(_) => BigRational::zero(),
            },
        }
    }

    /// Residue masses mod `q` as integer numerators over a common denominator.
    pub fn residue_counts(&self, q: u64) -> Result<(Vec<BigUint>, BigUint)> {
        if q < 1 {
            return Err(Error::invalid("modulus must be positive"));
        }
        let qi = q as i128;
        match &self.repr {
            Repr::Box { lo, hi } => {
                let n = self.support_len();
                let full = n / q;
                let rem = n % q;
                let mut counts = vec![BigUint::from(full); q as usize];
                let start = (*lo as i128).rem_euclid(qi) as u64;
                for i in 0..rem {
                    counts[((start + i) % q) as usize] += 1u32;
                }
                let _ = hi;
                Ok((counts, BigUint::from(n)))
            }
            Repr::Uniform(atoms) => {
                let mut counts = vec![0u64; q as usize];
                for &a in atoms {
                    counts[(a as i128).rem_euclid(qi) as usize] += 1;
                }
                Ok((
                    counts.into_iter().map(BigUint::from).collect(),
                    BigUint::from(atoms.len()),
                ))
            }
            Repr::Weighted { atoms, weights, .. } => {
                let den = weights
                    .iter()
                    .fold(BigInt::one(), |l, w| l.lcm(w.denom()));
                let mut counts = vec![BigUint::zero(); q as usize];
                for (a, w) in atoms.iter().zip(weights) {
                    let num = (w.numer() * (&den / w.denom())).to_biguint().unwrap();
                    counts[(*a as i128).rem_euclid(qi) as usize] += num;
                }
                Ok((counts, den.to_biguint().unwrap()))
            }
        }
    }

    /// Exact residue masses μ(a ≡ r mod q) for r = 0..q.
    pub fn residue_masses(&self, q: u64) -> Result<Vec<BigRational>> {
        let (counts, den) = self.residue_counts(q)?;
        let den = BigInt::from(den);
        Ok(counts
            .into_iter()
            .map(|c| BigRational::new(BigInt::from(c), den.clone()))
            .collect())
    }

    /// Σ_{a ≡ ℓ mod q} μ(a).
    pub fn residue_mass(&self, q: u64, l: i64) -> Result<BigRational> {
        if q < 2 {
            return Err(Error::invalid(format!("modulus {q} < 2")));
        }
        let r = (l as i128).rem_euclid(q as i128) as u64;
        if let Repr::Box { lo, hi } = self.repr {
            // Count of a in [lo, hi] with a ≡ r, without materializing the table.
            let count = |x: i64| -> i128 {
                // #{a ≤ x : a ≡ r mod q}, relative to an arbitrary origin.
                (x as i128 - r as i128).div_euclid(q as i128)
            };
            let c = count(hi) - count(lo - 1);
            return Ok(BigRational::new(
                BigInt::from(c),
                BigInt::from(self.support_len()),
            ));
        }
        Ok(self.residue_masses(q)?.swap_remove(r as usize))
    }

    /// Residue masses mod `q` in `f64` with a bound on the total conversion error.
    pub fn residue_masses_f64(&self, q: u64) -> Result<(Vec<f64>, f64)> {
        let (counts, den) = self.residue_counts(q)?;
        let exact_den = den.to_f64().unwrap();
        let den_exact = den.bits() <= 53;
        let mut err = 0.0;
        let out = counts
            .iter()
            .map(|c| {
                let v = if den_exact && c.bits() <= 53 {
                    // Single correctly rounded division.
                    c.to_f64().unwrap() / exact_den
                } else {
                    BigRational::new(BigInt::from(c.clone()), BigInt::from(den.clone()))
                        .to_f64()
                        .unwrap()
                };
                err += 2.0 * f64::EPSILON * v.abs();
                v
            })
            .collect();
        Ok((out, err + f64::MIN_POSITIVE))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        match &self.repr {
            Repr::Box { lo, hi } => rng.random_range(*lo..=*hi),
            Repr::Uniform(atoms) => atoms[rng.random_range(0..atoms.len())],
            Repr::Weighted {
                atoms, cumulative, ..
            } => {
                let u: f64 = rng.random();
                let i = cumulative.partition_point(|&c| c <= u);
                atoms[i.min(atoms.len() - 1)]
            }
        }
    }

    /// Sum of weights (always 1 for a well-formed measure; exposed for checks).
    pub fn total_mass(&self) -> BigRational {
        match &self.repr {
            Repr::Weighted { weights, .. } => weights.iter().sum(),
            _ => BigRational::one(),
        }
    }

    /// True when μ mod p is uniform on F_p.
    pub fn is_residue_uniform(&self, p: u64) -> bool {
        match self.residue_counts(p) {
            Ok((c, _)) => c.iter().all(|x| *x == c[0]),
            Err(_) => false,
        }
    }
}

/// A sequence of coefficient measures μ_0, μ_1, … with a default for
/// indices past the explicit list.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSequence {
    indexed: Vec<CoefficientMeasure>,
    default: CoefficientMeasure,
}

impl MeasureSequence {
    pub fn iid(m: CoefficientMeasure) -> Self {
        MeasureSequence {
            indexed: Vec::new(),
            default: m,
        }
    }

    pub fn new(indexed: Vec<CoefficientMeasure>, default: CoefficientMeasure) -> Self {
        MeasureSequence { indexed, default }
    }

    pub fn get(&self, j: usize) -> &CoefficientMeasure {
        self.indexed.get(j).unwrap_or(&self.default)
    }

    pub fn default_measure(&self) -> &CoefficientMeasure {
        &self.default
    }

    pub fn explicit_len(&self) -> usize {
        self.indexed.len()
    }

    pub fn is_iid(&self) -> bool {
        self.indexed.iter().all(|m| *m == self.default)
    }

    /// Distinct measures among indices in `range`, or among every explicit
    /// entry and the default when `range` is `None`.
    pub fn distinct(&self, range: Option<Range<usize>>) -> Vec<&CoefficientMeasure> {
        let candidates: Vec<&CoefficientMeasure> = match range {
            Some(r) => r.map(|j| self.get(j)).take(self.indexed.len() + 1).collect(),
            None => self.indexed.iter().chain([&self.default]).collect(),
        };
        let mut out: Vec<&CoefficientMeasure> = Vec::new();
        for m in candidates {
            if !out.contains(&m) {
                out.push(m);
            }
        }
        out
    }

    /// Draws a_0, …, a_{n−1} from the product measure.
    pub fn sample_coeffs<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<i64> {
        (0..n).map(|j| self.get(j).sample(rng)).collect()
    }
}

impl From<CoefficientMeasure> for MeasureSequence {
    fn from(m: CoefficientMeasure) -> Self {
        MeasureSequence::iid(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn residue_mass_examples() {
        let u211 = CoefficientMeasure::uniform_box(1, 211).unwrap();
        assert_eq!(u211.residue_mass(2, 0).unwrap(), q(105, 211));
        let u10 = CoefficientMeasure::uniform_box(1, 10).unwrap();
        assert_eq!(u10.residue_mass(2, 0).unwrap(), q(1, 2));
        let d7 = CoefficientMeasure::point(7);
        assert_eq!(d7.residue_mass(3, 1).unwrap(), q(1, 1));
        assert_eq!(d7.residue_mass(3, -2).unwrap(), q(1, 1));
    }

    #[test]
    fn box_residue_mass_agrees_with_table() {
        let m = CoefficientMeasure::uniform_box(-17, 40).unwrap();
        for qq in 2..30u64 {
            let table = m.residue_masses(qq).unwrap();
            for r in 0..qq {
                assert_eq!(m.residue_mass(qq, r as i64).unwrap(), table[r as usize]);
            }
            assert_eq!(table.iter().sum::<BigRational>(), BigRational::one());
        }
    }

    #[test]
    fn weighted_validation() {
        assert!(CoefficientMeasure::weighted(vec![(1, q(1, 2)), (2, q(1, 3))]).is_err());
        assert!(CoefficientMeasure::weighted(vec![(1, q(3, 2)), (2, q(-1, 2))]).is_err());
        let m = CoefficientMeasure::weighted(vec![(2, q(1, 3)), (1, q(1, 3)), (2, q(1, 3))])
            .unwrap();
        assert_eq!(m.atoms(), vec![(1, q(1, 3)), (2, q(2, 3))]);
        let u = CoefficientMeasure::weighted(vec![(3, q(1, 2)), (1, q(1, 2))]).unwrap();
        assert_eq!(u, CoefficientMeasure::uniform_set(vec![1, 3]).unwrap());
    }

    #[test]
    fn set_normalizes() {
        let m = CoefficientMeasure::uniform_set(vec![5, 3, 5, 4]).unwrap();
        assert_eq!(m.as_box(), Some((3, 5)));
        let s = CoefficientMeasure::uniform_set(vec![9, 1, 1]).unwrap();
        assert_eq!(s.support_len(), 2);
        assert_eq!(s.weight_of(1), q(1, 2));
        assert_eq!(s.weight_of(2), q(0, 1));
    }

    #[test]
    fn sequence_lookup() {
        let a = CoefficientMeasure::point(1);
        let b = CoefficientMeasure::uniform_box(0, 1).unwrap();
        let s = MeasureSequence::new(vec![a.clone(), a.clone()], b.clone());
        assert_eq!(s.get(1), &a);
        assert_eq!(s.get(5), &b);
        assert_eq!(s.distinct(None).len(), 2);
        assert_eq!(s.distinct(Some(0..2)).len(), 1);
        assert_eq!(s.distinct(Some(1..4)).len(), 2);
    }
}
