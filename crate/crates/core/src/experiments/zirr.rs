//! Deciding irreducibility over ℤ of monic integer polynomials.
//!
//! Stage 0 looks for linear and cyclotomic factors. Stage 1 intersects the
//! divisor-degree sets of squarefree reductions: a degree-k factor over ℤ
//! reduces to a degree-k factor mod every p, so an intersection {0, n}
//! proves irreducibility. Stage 2 lifts a factorization mod p to p^k past a
//! Mignotte-type bound and tries every recombination of the lifted factors.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, inv_mod_prime, Primes};
use crate::error::{Error, Result};
use crate::fpoly::{degree_set_from_parts, factor, FpPoly};
use crate::intpoly::IntPoly;

/// Work limits for [`irreducible_over_z`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZBudget {
    /// Squarefree reductions used by stage 1.
    pub stage1_primes: usize,
    /// Primes scanned while looking for squarefree reductions.
    pub max_primes: usize,
    /// Stage 2 is skipped above this degree.
    pub max_degree: usize,
    /// Recombination subsets tried before giving up.
    pub max_subsets: u64,
}

impl Default for ZBudget {
    fn default() -> Self {
        ZBudget {
            stage1_primes: 8,
            max_primes: 200,
            max_degree: 64,
            max_subsets: 200_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZVerdict {
    Irreducible,
    Reducible,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZMethod {
    Linear,
    RationalRoot,
    Cyclotomic,
    DegreeSets,
    /// gcd(A, A') is a proper factor.
    RepeatedFactor,
    Recombination,
    /// Stage 2 could not run or ran out of budget.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZDecision {
    pub verdict: ZVerdict,
    /// 0, 1 or 2.
    pub stage: u8,
    pub method: ZMethod,
    /// A proper monic factor when reducible.
    pub witness: Option<IntPoly>,
    /// Squarefree primes used by stage 1.
    pub primes: Vec<u64>,
    /// Degrees k with a degree-k divisor mod every prime used.
    pub degree_set: Vec<usize>,
    pub hensel_prime: Option<u64>,
    pub subsets_tried: u64,
}

impl ZDecision {
    fn new(verdict: ZVerdict, stage: u8, method: ZMethod) -> Self {
        ZDecision {
            verdict,
            stage,
            method,
            witness: None,
            primes: Vec::new(),
            degree_set: Vec::new(),
            hensel_prime: None,
            subsets_tried: 0,
        }
    }

    fn reducible(stage: u8, method: ZMethod, w: IntPoly) -> Self {
        let mut d = Self::new(ZVerdict::Reducible, stage, method);
        d.witness = Some(w);
        d
    }
}

pub fn irreducible_over_z(a: &IntPoly, budget: &ZBudget) -> Result<ZDecision> {
    if !a.is_monic() {
        return Err(Error::invalid(format!("{} is not monic", a.pretty())));
    }
    let n = a.deg();
    if n == 0 {
        return Err(Error::invalid("constant polynomial"));
    }
    if n == 1 {
        return Ok(ZDecision::new(ZVerdict::Irreducible, 0, ZMethod::Linear));
    }
    if let Some(d) = stage0(a) {
        return Ok(d);
    }
    let (primes, facs, set) = match stage1(a, budget)? {
        Ok(s) => s,
        Err(g) => return Ok(ZDecision::reducible(1, ZMethod::RepeatedFactor, g)),
    };
    let trivial = set.iter().all(|&k| k == 0 || k == n);
    let mut out = if trivial {
        ZDecision::new(ZVerdict::Irreducible, 1, ZMethod::DegreeSets)
    } else {
        stage2(a, &primes, &facs, &set, budget)
    };
    out.primes = primes;
    out.degree_set = set;
    Ok(out)
}

// ---------------------------------------------------------------- stage 0

fn stage0(a: &IntPoly) -> Option<ZDecision> {
    let n = a.deg();
    let a0 = a.coeff(0);
    if a0.is_zero() {
        return Some(ZDecision::reducible(0, ZMethod::RationalRoot, IntPoly::from_i64(&[0, 1])));
    }
    // A monic polynomial's rational roots are integers dividing a_0.
    for r in root_candidates(&a0) {
        if a.eval(&r).is_zero() {
            return Some(ZDecision::reducible(
                0,
                ZMethod::RationalRoot,
                IntPoly::new(vec![-r, BigInt::one()]),
            ));
        }
    }
    let coeffs: Option<Vec<f64>> = a.coeffs().iter().map(|c| c.to_f64()).collect();
    let scale: f64 = coeffs
        .as_ref()
        .map_or(f64::INFINITY, |c| c.iter().map(|x| x.abs()).sum());
    for d in cyclotomic_indices(n) {
        // d ≤ 2 is covered by the roots ±1; Φ_d of degree n would be A itself.
        if d <= 2 || euler_phi(d) as usize >= n {
            continue;
        }
        // Horner at e(1/d) in floating point; the error is far below this
        // threshold, so a larger value proves A(e(1/d)) ≠ 0.
        if let Some(c) = &coeffs {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU / d as f64);
            let v = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * z + x);
            if v.norm() > 1e-9 * (n as f64 + 1.0) * scale {
                continue;
            }
        }
        let phi = cyclotomic(d);
        if a.exact_div_monic(&phi).is_some() {
            return Some(ZDecision::reducible(0, ZMethod::Cyclotomic, phi));
        }
    }
    None
}

fn root_candidates(a0: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::one(), -BigInt::one()];
    let Some(m) = a0.magnitude().to_u64().filter(|&m| m <= 1_000_000_000_000) else {
        return out;
    };
    let mut i = 2u64;
    while i * i <= m {
        if m % i == 0 {
            for d in [i, m / i] {
                out.push(BigInt::from(d));
                out.push(-BigInt::from(d));
            }
        }
        i += 1;
    }
    if m > 1 {
        out.push(BigInt::from(m));
        out.push(-BigInt::from(m));
    }
    out.sort_by_key(|x| x.magnitude().clone());
    out.dedup();
    out
}

/// All d with φ(d) ≤ n, ascending (φ(d) ≥ √(d/2) bounds the search).
fn cyclotomic_indices(n: usize) -> Vec<u64> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<u64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&n) {
        return v.clone();
    }
    let v: Vec<u64> = (1..=2 * (n as u64).pow(2))
        .filter(|&d| euler_phi(d) as usize <= n)
        .collect();
    cache.lock().unwrap().insert(n, v.clone());
    v
}

/// Φ_d = (T^d − 1) / Π_{e | d, e < d} Φ_e.
pub fn cyclotomic(d: u64) -> IntPoly {
    static CACHE: OnceLock<Mutex<HashMap<u64, IntPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&d) {
        return p.clone();
    }
    let mut p = IntPoly::monomial(d as usize).sub(&IntPoly::one());
    for e in crate::arith::divisors(d) {
        if e < d {
            p = p.exact_div_monic(&cyclotomic(e)).expect("Φ_e divides T^d − 1");
        }
    }
    cache.lock().unwrap().insert(d, p.clone());
    p
}

// ---------------------------------------------------------------- stage 1

type Stage1 = (Vec<u64>, Vec<Vec<FpPoly>>, Vec<usize>);

/// Non-squarefree reductions tolerated before testing A itself for a
/// repeated factor.
const SQUAREFREE_PROBE: usize = 10;

/// Monic gcd(A, A') over ℚ. By Gauss's lemma a monic rational divisor of a
/// monic integer polynomial has integer coefficients.
fn repeated_part(a: &IntPoly) -> IntPoly {
    let to_q = |p: &IntPoly| -> Vec<BigRational> { p.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect() };
    let (mut x, mut y) = (to_q(a), to_q(&a.derivative()));
    while !y.is_empty() {
        // x mod y
        let ly = y.last().unwrap().clone();
        while x.len() >= y.len() {
            let t = x.last().unwrap() / &ly;
            let shift = x.len() - y.len();
            for (i, c) in y.iter().enumerate() {
                x[shift + i] -= &t * c;
            }
            while x.last().is_some_and(|c| c.is_zero()) {
                x.pop();
            }
            if x.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
    let lead = x.last().unwrap().clone();
    IntPoly::new(x.iter().map(|c| (c / &lead).to_integer()).collect())
}

fn stage1(a: &IntPoly, budget: &ZBudget) -> Result<std::result::Result<Stage1, IntPoly>> {
    let n = a.deg();
    let mut primes = Vec::new();
    let mut facs = Vec::new();
    let mut set: Option<Vec<bool>> = None;
    let mut skipped = 0;
    for p in Primes::new().take(budget.max_primes) {
        if primes.len() >= budget.stage1_primes {
            break;
        }
        let f = a.reduce(p)?;
        if !f.gcd(&f.derivative()).is_one() {
            skipped += 1;
            if skipped == SQUAREFREE_PROBE {
                let g = repeated_part(a);
                if g.deg() > 0 {
                    return Ok(Err(g));
                }
            }
            continue;
        }
        let fac = factor(&f)?;
        let degs = fac.degrees();
        let ds = degree_set_from_parts(n, &degs);
        let cur: Vec<bool> = (0..=n).map(|k| ds.contains(k)).collect();
        set = Some(match set {
            None => cur,
            Some(s) => s.iter().zip(&cur).map(|(x, y)| *x && *y).collect(),
        });
        primes.push(p);
        facs.push(fac.factors().iter().map(|(g, _)| g.clone()).collect());
        let s = set.as_ref().unwrap();
        if (1..n).all(|k| !s[k]) {
            break;
        }
    }
    let set = match set {
        Some(s) => (0..=n).filter(|&k| s[k]).collect(),
        None => (0..=n).collect(),
    };
    Ok(Ok((primes, facs, set)))
}

// ---------------------------------------------------------------- stage 2

fn stage2(
    a: &IntPoly,
    primes: &[u64],
    facs: &[Vec<FpPoly>],
    set: &[usize],
    budget: &ZBudget,
) -> ZDecision {
    let n = a.deg();
    let exhausted = || ZDecision::new(ZVerdict::Undecided, 2, ZMethod::Exhausted);
    if n > budget.max_degree || primes.is_empty() {
        return exhausted();
    }
    // The prime with the fewest factors keeps recombination cheapest.
    let (idx, _) = facs
        .iter()
        .enumerate()
        .min_by_key(|(i, f)| (f.len(), primes[*i]))
        .unwrap();
    let p = primes[idx];
    let factors = &facs[idx];
    // Coefficients of a monic divisor of degree d < n are at most
    // C(d, j)·‖A‖₂ ≤ 2^n ‖A‖₂ in absolute value.
    let bound = (BigUint::one() << n) * a.l2_norm_ceil();
    let two_b = BigInt::from(bound * 2u32);
    let bp = BigInt::from(p);
    let mut modulus = bp.clone();
    while modulus <= two_b {
        modulus *= &bp;
    }
    let lifted = hensel_lift(&to_zm(a, &modulus), factors, p, &modulus);
    let mut out = recombine(a, &lifted, &modulus, set, budget.max_subsets);
    out.hensel_prime = Some(p);
    out
}

/// Little-endian BigInt coefficients reduced into [0, m).
type Zm = Vec<BigInt>;

fn trim(mut v: Zm) -> Zm {
    while v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
    v
}

fn to_zm(a: &IntPoly, m: &BigInt) -> Zm {
    trim(a.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn fp_to_zm(f: &FpPoly) -> Zm {
    f.coeffs().iter().map(|&c| BigInt::from(c)).collect()
}

fn zm_add(a: &Zm, b: &Zm, m: &BigInt) -> Zm {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim(
        (0..n)
            .map(|i| (a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).mod_floor(m))
            .collect(),
    )
}

fn zm_sub(a: &Zm, b: &Zm, m: &BigInt) -> Zm {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim(
        (0..n)
            .map(|i| (a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).mod_floor(m))
            .collect(),
    )
}

fn zm_mul(a: &Zm, b: &Zm, m: &BigInt) -> Zm {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    trim(c.into_iter().map(|x| x.mod_floor(m)).collect())
}

/// Division by a monic polynomial mod m.
fn zm_div_rem(a: &Zm, b: &Zm, m: &BigInt) -> (Zm, Zm) {
    let k = b.len() - 1;
    if a.len() <= k {
        return (Vec::new(), a.clone());
    }
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len() - k];
    for i in (k..r.len()).rev() {
        let t = r[i].mod_floor(m);
        if t.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i - k + j] = (&r[i - k + j] - &t * bj).mod_floor(m);
        }
        q[i - k] = t;
    }
    r.truncate(k);
    (trim(q), trim(r))
}

/// s, t with s·g + t·h = 1 over F_p, deg s < deg h, deg t < deg g.
fn xgcd(g: &FpPoly, h: &FpPoly) -> (FpPoly, FpPoly) {
    let p = g.p();
    let (mut r0, mut r1) = (g.clone(), h.clone());
    let (mut s0, mut s1) = (FpPoly::one(p), FpPoly::zero(p));
    let (mut t0, mut t1) = (FpPoly::zero(p), FpPoly::one(p));
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s2 = s0.sub(&q.mul(&s1));
        let t2 = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    debug_assert_eq!(r0.deg(), 0, "factors must be coprime");
    let inv = inv_mod_prime(r0.lead(), p);
    (s0.scale(inv), t0.scale(inv))
}

/// Lifts f ≡ Π factors (mod p) to f ≡ Π lifted (mod m), m a power of p,
/// splitting the factor list in halves and lifting each split quadratically.
fn hensel_lift(f: &Zm, factors: &[FpPoly], p: u64, m: &BigInt) -> Vec<Zm> {
    if factors.len() == 1 {
        return vec![f.clone()];
    }
    let (left, right) = factors.split_at(factors.len() / 2);
    let prod = |fs: &[FpPoly]| fs.iter().fold(FpPoly::one(p), |acc, x| acc.mul(x));
    let (g0, h0) = (prod(left), prod(right));
    let (s0, t0) = xgcd(&g0, &h0);
    let (mut g, mut h, mut s, mut t) = (fp_to_zm(&g0), fp_to_zm(&h0), fp_to_zm(&s0), fp_to_zm(&t0));
    let mut cur = BigInt::from(p);
    while &cur < m {
        let next = (&cur * &cur).min(m.clone());
        let md = &next;
        let fr: Zm = trim(f.iter().map(|c| c.mod_floor(md)).collect());
        let e = zm_sub(&fr, &zm_mul(&g, &h, md), md);
        let (q, r) = zm_div_rem(&zm_mul(&s, &e, md), &h, md);
        let g1 = zm_add(&zm_add(&g, &zm_mul(&t, &e, md), md), &zm_mul(&q, &g, md), md);
        let h1 = zm_add(&h, &r, md);
        let b = zm_sub(
            &zm_add(&zm_mul(&s, &g1, md), &zm_mul(&t, &h1, md), md),
            &vec![BigInt::one()],
            md,
        );
        let (c, d) = zm_div_rem(&zm_mul(&s, &b, md), &h1, md);
        s = zm_sub(&s, &d, md);
        t = zm_sub(&zm_sub(&t, &zm_mul(&t, &b, md), md), &zm_mul(&c, &g1, md), md);
        g = g1;
        h = h1;
        cur = next;
    }
    let mut out = hensel_lift(&g, left, p, m);
    out.extend(hensel_lift(&h, right, p, m));
    out
}

fn symmetric(v: &Zm, m: &BigInt) -> IntPoly {
    let half: BigInt = m >> 1;
    IntPoly::new(
        v.iter()
            .map(|c| if c > &half { c - m } else { c.clone() })
            .collect(),
    )
}

/// Tries the products of every subset of at most half of the lifted factors.
fn recombine(a: &IntPoly, lifted: &[Zm], m: &BigInt, set: &[usize], max_subsets: u64) -> ZDecision {
    let r = lifted.len();
    let a0 = a.coeff(0);
    let degs: Vec<usize> = lifted.iter().map(|f| f.len() - 1).collect();
    let mut tried = 0u64;
    for size in 1..=r / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let d: usize = idx.iter().map(|&i| degs[i]).sum();
            if set.binary_search(&d).is_ok() {
                tried += 1;
                if tried > max_subsets {
                    let mut out = ZDecision::new(ZVerdict::Undecided, 2, ZMethod::Exhausted);
                    out.subsets_tried = tried - 1;
                    return out;
                }
                // Constant-term test before the full product.
                let c0 = idx.iter().fold(BigInt::one(), |acc, &i| (acc * &lifted[i][0]).mod_floor(m));
                let c0 = symmetric(&vec![c0], m).coeff(0);
                if !c0.is_zero() && (&a0 % &c0).is_zero() {
                    let g = idx.iter().skip(1).fold(lifted[idx[0]].clone(), |acc, &i| zm_mul(&acc, &lifted[i], m));
                    let cand = symmetric(&g, m);
                    if a.exact_div_monic(&cand).is_some() {
                        let mut out = ZDecision::reducible(2, ZMethod::Recombination, cand);
                        out.subsets_tried = tried;
                        return out;
                    }
                }
            }
            // Next combination in lexicographic order.
            let mut i = size;
            while i > 0 && idx[i - 1] == r - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    let mut out = ZDecision::new(ZVerdict::Irreducible, 2, ZMethod::Recombination);
    out.subsets_tried = tried;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn z(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn decide(c: &[i64]) -> ZDecision {
        irreducible_over_z(&z(c), &ZBudget::default()).unwrap()
    }

    #[test]
    fn spec_examples() {
        let d = decide(&[-2, 0, 1]);
        assert_eq!((d.verdict, d.stage), (ZVerdict::Irreducible, 1));
        assert_eq!(d.degree_set, vec![0, 2]);

        let d = decide(&[-1, 0, 1]);
        assert_eq!(d.verdict, ZVerdict::Reducible);
        assert_eq!(d.stage, 0);
        let w = d.witness.unwrap();
        assert!(w == z(&[-1, 1]) || w == z(&[1, 1]));

        let d = decide(&[1, 0, 0, 0, 1]);
        assert_eq!(d.verdict, ZVerdict::Irreducible);
        assert_eq!(d.stage, 2);
        assert_eq!(d.degree_set, vec![0, 2, 4]);
        assert!(d.subsets_tried >= 1);
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(1), z(&[-1, 1]));
        assert_eq!(cyclotomic(6), z(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), z(&[1, 0, -1, 0, 1]));
        for d in 1..60u64 {
            assert_eq!(cyclotomic(d).deg() as u64, euler_phi(d));
        }
        // T^4 + T^3 + T^2 + T + 1 = Φ_5 is irreducible, Φ_5·Φ_3 is caught at stage 0.
        let d = irreducible_over_z(&cyclotomic(5).mul(&cyclotomic(3)), &ZBudget::default()).unwrap();
        assert_eq!((d.verdict, d.method), (ZVerdict::Reducible, ZMethod::Cyclotomic));
        assert_eq!(decide(&[1, 1, 1, 1, 1]).verdict, ZVerdict::Irreducible);
        // delta:1 at n = 3: T^3 + T^2 + T + 1 = (T + 1)(T^2 + 1).
        assert_eq!(decide(&[1, 1, 1, 1]).verdict, ZVerdict::Reducible);
    }

    #[test]
    fn squares_have_no_squarefree_reduction() {
        let b = z(&[-1, 1, 1]);
        let d = irreducible_over_z(&b.mul(&b), &ZBudget::default()).unwrap();
        assert_eq!((d.verdict, d.method), (ZVerdict::Reducible, ZMethod::RepeatedFactor));
        assert_eq!(d.witness, Some(b.clone()));
        let c = b.mul(&b).mul(&z(&[5, 0, 0, 1]));
        assert_eq!(repeated_part(&c), b);
        assert_eq!(repeated_part(&z(&[5, 0, 0, 1])), IntPoly::one());
    }

    #[test]
    fn swinnerton_dyer_needs_recombination() {
        // Minimal polynomial of √2 + √3: splits into ≥ 2 factors mod every p.
        let d = decide(&[1, 0, -10, 0, 1]);
        assert_eq!(d.verdict, ZVerdict::Irreducible);
        assert_eq!(d.stage, 2);
    }

    #[test]
    fn products_are_found_reducible() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let mut rand_monic = || {
                let deg = rng.random_range(1..=8);
                let mut c: Vec<i64> = (0..deg).map(|_| rng.random_range(-6..=6)).collect();
                c.push(1);
                z(&c)
            };
            let b = rand_monic();
            let c = rand_monic();
            let a = b.mul(&c);
            let d = irreducible_over_z(&a, &ZBudget::default()).unwrap();
            assert_eq!(d.verdict, ZVerdict::Reducible, "{} = ({})({})", a.pretty(), b.pretty(), c.pretty());
            let w = d.witness.unwrap();
            assert!(w.deg() >= 1 && w.deg() < a.deg());
            assert!(a.exact_div_monic(&w).is_some());
        }
    }

    #[test]
    fn hensel_lift_is_consistent() {
        let a = z(&[1, 0, -10, 0, 1]);
        let p = 5u64;
        let f = a.reduce(p).unwrap();
        let fac: Vec<FpPoly> = factor(&f).unwrap().factors().iter().map(|(g, _)| g.clone()).collect();
        let m = BigInt::from(5u32).pow(12);
        let lifted = hensel_lift(&to_zm(&a, &m), &fac, p, &m);
        let prod = lifted.iter().skip(1).fold(lifted[0].clone(), |acc, g| zm_mul(&acc, g, &m));
        assert_eq!(prod, to_zm(&a, &m));
        for (g, g0) in lifted.iter().zip(&fac) {
            let back: Vec<u64> = g.iter().map(|c| (c % 5u32).to_u64().unwrap()).collect();
            assert_eq!(FpPoly::new(5, back).unwrap(), *g0);
        }
    }

    #[test]
    fn input_validation_and_budget() {
        assert!(irreducible_over_z(&z(&[2, 1]), &ZBudget::default()).is_ok());
        assert!(irreducible_over_z(&z(&[1, 0, 2]), &ZBudget::default()).is_err());
        let tight = ZBudget {
            max_degree: 2,
            ..ZBudget::default()
        };
        let d = irreducible_over_z(&z(&[1, 0, 0, 0, 1]), &tight).unwrap();
        assert_eq!(d.verdict, ZVerdict::Undecided);
        assert_eq!(decide(&[0, 3, 1]).witness, Some(z(&[0, 1])));
    }

    #[test]
    fn root_candidates_cover_divisors() {
        let c = root_candidates(&BigInt::from(12));
        for d in [1, 2, 3, 4, 6, 12] {
            assert!(c.contains(&BigInt::from(d)) && c.contains(&BigInt::from(-d)));
        }
    }
}
