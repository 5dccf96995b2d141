//! The law of A mod D under a product coefficient measure, and the
//! discrepancies Δ_P(n; m) and δ_P(n; ℓ).

mod delta;
pub(crate) mod dp;
mod fourier_method;
mod laurent;
pub(crate) mod layout;

pub use delta::{
    delta, delta_ell, delta_ell_with_cap, delta_with_cap, moduli_tuples, DeltaEllReport,
    DeltaReport, DeltaRow, DEFAULT_DELTA_CAP, DEFAULT_DELTA_ELL_CAP,
};
pub use laurent::{laurent_coeffs, linf_bound, s_value, LaurentPhase};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::is_prime;
use crate::error::{check_cap, Error, Result};
use crate::fpoly::FpPoly;
use crate::measures::MeasureSequence;
use layout::Layout;

/// 1/(4 − 4 log 2), the exponent of the window n/2 + n^{λ0+ε} in which the
/// equidistribution estimate is applied.
pub const LAMBDA0: f64 = 0.814_722_838_317_732_3;

/// Default cap on the number of residue classes in one table.
pub const DEFAULT_TABLE_CAP: u128 = 10_000_000;

/// A sorted set of distinct primes with their product.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeModulusSet {
    primes: Vec<u64>,
    product: u64,
}

impl PrimeModulusSet {
    pub fn new(mut primes: Vec<u64>) -> Result<Self> {
        primes.sort_unstable();
        if primes.is_empty() {
            return Err(Error::invalid("empty prime set"));
        }
        if primes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("repeated prime"));
        }
        if let Some(&q) = primes.iter().find(|&&q| !is_prime(q)) {
            return Err(Error::invalid(format!("{q} is not prime")));
        }
        let product = primes
            .iter()
            .try_fold(1u64, |a, &p| a.checked_mul(p))
            .filter(|&x| x < (1 << 40))
            .ok_or_else(|| Error::invalid("prime product too large"))?;
        Ok(PrimeModulusSet { primes, product })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn product(&self) -> u64 {
        self.product
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Exact rational convolution.
    Dp,
    /// Floating-point convolution with a tracked error bound.
    DpFloat,
    /// Character-sum inversion in floating point.
    Fourier,
}

#[derive(Clone, Debug, PartialEq)]
enum Table {
    Exact { num: Vec<BigUint>, den: BigUint },
    Float { p: Vec<f64>, err: Option<f64> },
}

/// The law of (A mod D_p)_p, indexed by residue tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueDistribution {
    moduli: Vec<FpPoly>,
    layout: Layout,
    table: Table,
}

fn validate_moduli(primes: &PrimeModulusSet, moduli: &[FpPoly]) -> Result<()> {
    if moduli.len() != primes.len() {
        return Err(Error::invalid("one modulus per prime required"));
    }
    for (d, &p) in moduli.iter().zip(primes.primes()) {
        if d.p() != p {
            return Err(Error::invalid(format!("modulus {d} not over F_{p}")));
        }
        if !d.is_monic() {
            return Err(Error::invalid(format!("modulus {d} is not monic")));
        }
    }
    Ok(())
}

/// The law of A mod D for A = T^n + Σ_{j<n} a_j T^j with a_j ~ μ_j independent.
pub fn residue_distribution(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    moduli: &[FpPoly],
    method: Method,
) -> Result<ResidueDistribution> {
    residue_distribution_with_cap(measures, n, primes, moduli, method, DEFAULT_TABLE_CAP)
}

pub fn residue_distribution_with_cap(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    moduli: &[FpPoly],
    method: Method,
    cap: u128,
) -> Result<ResidueDistribution> {
    if n == 0 {
        return Err(Error::invalid("degree n must be at least 1"));
    }
    validate_moduli(primes, moduli)?;
    if moduli.iter().any(|d| d.deg() == 0) {
        return Err(Error::invalid("every modulus must have degree at least 1"));
    }
    let degs: Vec<usize> = moduli.iter().map(|d| d.deg()).collect();
    let size = Layout::size_u128(primes.primes(), &degs);
    check_cap("residue table", size, cap)?;
    if method == Method::Fourier {
        check_cap("fourier inversion (size²)", size * size, cap.saturating_mul(100))?;
    }
    let layout = Layout::new(primes.primes(), &degs).expect("size checked");
    let table = match method {
        Method::Dp => {
            let (num, den) = exact_table(measures, n, primes, moduli, &layout)?.into_big();
            Table::Exact { num, den }
        }
        Method::DpFloat => {
            let laws = dp::CoefficientLaws::new(measures, n, primes.product())?;
            let input = dp::prepare(&layout, moduli, &laws, n);
            let (p, err) = dp::float(&layout, &input);
            Table::Float { p, err: Some(err) }
        }
        Method::Fourier => Table::Float {
            p: fourier_method::invert(measures, n, primes, moduli, &layout)?,
            err: None,
        },
    };
    Ok(ResidueDistribution {
        moduli: moduli.to_vec(),
        layout,
        table,
    })
}

pub(crate) fn exact_table(
    measures: &MeasureSequence,
    n: usize,
    primes: &PrimeModulusSet,
    moduli: &[FpPoly],
    layout: &Layout,
) -> Result<dp::ExactTable> {
    let laws = dp::CoefficientLaws::new(measures, n, primes.product())?;
    let input = dp::prepare(layout, moduli, &laws, n);
    Ok(dp::exact(layout, &input))
}

impl ResidueDistribution {
    pub fn moduli(&self) -> &[FpPoly] {
        &self.moduli
    }

    /// Number of residue classes, ‖D‖_P.
    pub fn size(&self) -> usize {
        self.layout.size
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.table, Table::Exact { .. })
    }

    /// L¹ error bound for the floating-point DP path; zero when exact.
    pub fn error_bound(&self) -> Option<f64> {
        match &self.table {
            Table::Exact { .. } => Some(0.0),
            Table::Float { err, .. } => *err,
        }
    }

    /// Index of the class of a residue tuple (each reduced mod its D_p).
    pub fn index_of(&self, residues: &[FpPoly]) -> Result<usize> {
        if residues.len() != self.moduli.len() {
            return Err(Error::invalid("one residue per prime required"));
        }
        let reduced: Vec<FpPoly> = residues
            .iter()
            .zip(&self.moduli)
            .map(|(c, d)| c.rem(d))
            .collect();
        Ok(self.layout.index_of(&reduced))
    }

    pub fn residues_at(&self, idx: usize) -> Vec<FpPoly> {
        self.layout.residues_at(idx)
    }

    pub fn probability(&self, idx: usize) -> f64 {
        match &self.table {
            Table::Exact { num, den } => {
                BigRational::new(BigInt::from(num[idx].clone()), BigInt::from(den.clone()))
                    .to_f64()
                    .unwrap()
            }
            Table::Float { p, .. } => p[idx],
        }
    }

    pub fn exact_probability(&self, idx: usize) -> Option<BigRational> {
        match &self.table {
            Table::Exact { num, den } => Some(BigRational::new(
                BigInt::from(num[idx].clone()),
                BigInt::from(den.clone()),
            )),
            Table::Float { .. } => None,
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.size()).map(|i| self.probability(i)).collect()
    }

    /// Exact total mass (rational path) or its float sum.
    pub fn total(&self) -> f64 {
        match &self.table {
            Table::Exact { num, den } => {
                let s: BigUint = num.iter().sum();
                BigRational::new(s.into(), den.clone().into()).to_f64().unwrap()
            }
            Table::Float { p, .. } => p.iter().sum(),
        }
    }

    pub fn exact_total(&self) -> Option<BigRational> {
        match &self.table {
            Table::Exact { num, den } => {
                let s: BigUint = num.iter().sum();
                Some(BigRational::new(s.into(), den.clone().into()))
            }
            Table::Float { .. } => None,
        }
    }

    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        if self.moduli != other.moduli {
            return Err(Error::invalid("distributions over different moduli"));
        }
        let a = self.probabilities();
        let b = other.probabilities();
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0)
    }

    /// max_C |P(A ≡ C) − 1/‖D‖|, exactly when the table is exact.
    pub fn max_deviation(&self) -> Discrepancy {
        match &self.table {
            Table::Exact { num, den } => {
                let t = dp::ExactTable::Big {
                    num: num.clone(),
                    den: den.clone(),
                };
                let (a, b) = t.max_deviation();
                Discrepancy::Exact(BigRational::new(a.into(), b.into()))
            }
            Table::Float { p, .. } => {
                let u = 1.0 / self.size() as f64;
                Discrepancy::Approx(p.iter().map(|x| (x - u).abs()).fold(0.0, f64::max))
            }
        }
    }

    /// The law of A mod D_p for the `i`-th prime alone.
    pub fn marginal(&self, i: usize) -> Result<ResidueDistribution> {
        if i >= self.moduli.len() {
            return Err(Error::invalid("prime index out of range"));
        }
        let p = self.layout.primes[i];
        let layout = Layout::new(&[p], &[self.layout.degs[i]]).unwrap();
        let o = self.layout.offset[i];
        let d = self.layout.degs[i];
        let project = |idx: usize| {
            let digits = self.layout.digits_of(idx);
            layout.index_of_digits(&digits[o..o + d])
        };
        let table = match &self.table {
            Table::Exact { num, den } => {
                let mut out = vec![BigUint::default(); layout.size];
                for (idx, x) in num.iter().enumerate() {
                    out[project(idx)] += x;
                }
                Table::Exact {
                    num: out,
                    den: den.clone(),
                }
            }
            Table::Float { p, err } => {
                let mut out = vec![0.0; layout.size];
                for (idx, x) in p.iter().enumerate() {
                    out[project(idx)] += x;
                }
                Table::Float { p: out, err: *err }
            }
        };
        Ok(ResidueDistribution {
            moduli: vec![self.moduli[i].clone()],
            layout,
            table,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Discrepancy {
    Exact(#[serde(serialize_with = "ser_rational")] BigRational),
    Approx(f64),
}

impl Discrepancy {
    pub fn to_f64(&self) -> f64 {
        match self {
            Discrepancy::Exact(q) => q.to_f64().unwrap(),
            Discrepancy::Approx(x) => *x,
        }
    }
}

pub(crate) fn ser_rational<S: serde::Serializer>(
    q: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::CoefficientMeasure;
    use num_traits::{One, Zero};

    fn fp(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec()).unwrap()
    }

    fn iid(spec: &str) -> MeasureSequence {
        MeasureSequence::iid(crate::measures::parse_measure(spec).unwrap())
    }

    /// Direct enumeration over the coefficient atoms (independent oracle).
    fn brute(m: &CoefficientMeasure, n: usize, d: &FpPoly) -> Vec<BigRational> {
        let p = d.p();
        let atoms = m.atoms();
        let size = p.pow(d.deg() as u32) as usize;
        let mut out = vec![BigRational::zero(); size];
        let mut idx = vec![0usize; n];
        loop {
            let mut c: Vec<i64> = idx.iter().map(|&i| atoms[i].0).collect();
            c.push(1);
            let w: BigRational = idx.iter().map(|&i| atoms[i].1.clone()).product();
            let r = FpPoly::from_i64(p, &c).unwrap().rem(d);
            let mut k = 0usize;
            for (i, &x) in r.coeffs().iter().enumerate() {
                k += x as usize * p.pow(i as u32) as usize;
            }
            out[k] += w;
            let mut i = 0;
            while i < n {
                idx[i] += 1;
                if idx[i] < atoms.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == n {
                return out;
            }
        }
    }

    #[test]
    fn spec_examples() {
        let ps3 = PrimeModulusSet::new(vec![3]).unwrap();
        let r = residue_distribution(&iid("box:1..3"), 4, &ps3, &[fp(3, &[2, 1])], Method::Dp)
            .unwrap();
        for i in 0..3 {
            assert_eq!(r.exact_probability(i).unwrap(), BigRational::new(1.into(), 3.into()));
        }
        let ps2 = PrimeModulusSet::new(vec![2]).unwrap();
        let r = residue_distribution(&iid("delta:0"), 3, &ps2, &[fp(2, &[1, 1, 1])], Method::Dp)
            .unwrap();
        let one = r.index_of(&[FpPoly::one(2)]).unwrap();
        assert!(r.exact_probability(one).unwrap().is_one());
        assert_eq!(r.exact_total().unwrap(), BigRational::one());
    }

    #[test]
    fn dp_matches_brute_force() {
        let cases = [
            ("box:-2..4", 5u64, vec![3u64, 0, 1]),
            ("powers:s=2,H=4", 3, vec![1, 2, 1]),
            ("box:0..1", 2, vec![1, 0, 1, 1]),
            ("delta:7", 5, vec![0, 1]),
        ];
        for (spec, p, d) in cases {
            let d = fp(p, &d);
            let ps = PrimeModulusSet::new(vec![p]).unwrap();
            let m = iid(spec);
            for n in 1..=5 {
                let r = residue_distribution(&m, n, &ps, &[d.clone()], Method::Dp).unwrap();
                let b = brute(m.default_measure(), n, &d);
                for (i, x) in b.iter().enumerate() {
                    assert_eq!(&r.exact_probability(i).unwrap(), x, "{spec} n={n} i={i}");
                }
            }
        }
    }

    #[test]
    fn methods_agree_two_primes() {
        let ps = PrimeModulusSet::new(vec![2, 3]).unwrap();
        let moduli = [fp(2, &[1, 1, 1]), fp(3, &[1, 0, 1])];
        let m = iid("box:-3..7");
        let a = residue_distribution(&m, 6, &ps, &moduli, Method::Dp).unwrap();
        let b = residue_distribution(&m, 6, &ps, &moduli, Method::Fourier).unwrap();
        let c = residue_distribution(&m, 6, &ps, &moduli, Method::DpFloat).unwrap();
        assert!(a.total_variation(&b).unwrap() < 1e-12);
        assert!(a.total_variation(&c).unwrap() <= c.error_bound().unwrap());
        // The mod-2 marginal is the single-prime law.
        let single = residue_distribution(
            &m,
            6,
            &PrimeModulusSet::new(vec![2]).unwrap(),
            &moduli[..1],
            Method::Dp,
        )
        .unwrap();
        assert_eq!(a.marginal(0).unwrap(), single);
    }

    #[test]
    fn rejects_bad_input() {
        let ps = PrimeModulusSet::new(vec![3]).unwrap();
        let m = iid("box:1..3");
        assert!(residue_distribution(&m, 0, &ps, &[fp(3, &[1, 1])], Method::Dp).is_err());
        assert!(residue_distribution(&m, 2, &ps, &[fp(3, &[1, 2])], Method::Dp).is_err());
        let big = fp(3, &[1; 20]);
        let e = residue_distribution(&m, 2, &ps, &[big], Method::Dp).unwrap_err();
        assert!(e.is_cap());
        assert!(PrimeModulusSet::new(vec![2, 4]).is_err());
        assert!(PrimeModulusSet::new(vec![3, 3]).is_err());
    }

    #[test]
    fn lambda0_value() {
        assert!((LAMBDA0 - 1.0 / (4.0 - 4.0 * 2f64.ln())).abs() < 1e-15);
    }
}
