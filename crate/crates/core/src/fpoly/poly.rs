use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::arith::{inv_mod_prime, is_prime};
use crate::error::{Error, Result};

#[inline]
fn mulp(a: u64, b: u64, p: u64) -> u64 {
    if p < (1 << 32) {
        a * b % p
    } else {
        crate::arith::mul_mod(a, b, p)
    }
}

#[inline]
fn addp(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn subp(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

/// A polynomial over F_p with little-endian coefficients in `[0, p)` and no
/// trailing zeros (the zero polynomial has no coefficients).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

/// Largest prime accepted; keeps sums of two residues inside `u64`.
pub const MAX_PRIME: u64 = 1 << 62;

impl FpPoly {
    /// Builds a polynomial, reducing coefficients mod `p`.
    pub fn new(p: u64, coeffs: Vec<u64>) -> Result<Self> {
        check_prime(p)?;
        Ok(Self::from_reduced(p, coeffs.into_iter().map(|x| x % p).collect()))
    }

    /// Builds from signed integer coefficients.
    pub fn from_i64(p: u64, coeffs: &[i64]) -> Result<Self> {
        check_prime(p)?;
        let c = coeffs
            .iter()
            .map(|&x| (x as i128).rem_euclid(p as i128) as u64)
            .collect();
        Ok(Self::from_reduced(p, c))
    }

    pub(crate) fn from_reduced(p: u64, mut c: Vec<u64>) -> Self {
        debug_assert!(c.iter().all(|&x| x < p));
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly { p, c: vec![1] }
    }

    /// The indeterminate T.
    pub fn t(p: u64) -> Self {
        Self::monomial(p, 1)
    }

    /// T^k.
    pub fn monomial(p: u64, k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        FpPoly { p, c }
    }

    /// The monic polynomial of degree `n` whose lower coefficients are the
    /// base-p digits of `index` (little-endian). Bijective on `0..p^n`.
    pub fn monic_from_index(p: u64, n: usize, mut index: u64) -> Self {
        let mut c = Vec::with_capacity(n + 1);
        for _ in 0..n {
            c.push(index % p);
            index /= p;
        }
        c.push(1);
        FpPoly { p, c }
    }

    /// Inverse of [`FpPoly::monic_from_index`]; `None` if not monic or the
    /// index overflows.
    pub fn monic_index(&self) -> Option<u64> {
        if !self.is_monic() {
            return None;
        }
        let mut idx: u64 = 0;
        for &x in self.c[..self.c.len() - 1].iter().rev() {
            idx = idx.checked_mul(self.p)?.checked_add(x)?;
        }
        Some(idx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    /// Coefficient of T^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree, treating the zero polynomial as degree 0.
    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn is_monic(&self) -> bool {
        self.c.last() == Some(&1)
    }

    pub fn is_t(&self) -> bool {
        self.c == [0, 1]
    }

    pub fn lead(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    /// ‖A‖ = p^{deg A}, if it fits.
    pub fn norm(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.deg() as u32)
    }

    fn same_field(&self, o: &Self) {
        assert_eq!(self.p, o.p, "polynomials over different fields");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_field(o);
        let p = self.p;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| addp(self.coeff(i), o.coeff(i), p)).collect();
        Self::from_reduced(p, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.same_field(o);
        let p = self.p;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| subp(self.coeff(i), o.coeff(i), p)).collect();
        Self::from_reduced(p, c)
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        Self::from_reduced(p, self.c.iter().map(|&x| subp(0, x, p)).collect())
    }

    pub fn scale(&self, k: u64) -> Self {
        let p = self.p;
        let k = k % p;
        Self::from_reduced(p, self.c.iter().map(|&x| mulp(x, k, p)).collect())
    }

    /// Multiply by T^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&self.c);
        FpPoly { p: self.p, c }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_field(o);
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        if p < (1 << 31) {
            // Accumulate unreduced while it cannot overflow.
            let limit = u64::MAX / ((p - 1) * (p - 1)).max(1);
            let mut acc = vec![0u64; c.len()];
            let mut pending = vec![0u64; c.len()];
            for (i, &a) in self.c.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in o.c.iter().enumerate() {
                    acc[i + j] += a * b;
                    pending[i + j] += 1;
                    if pending[i + j] >= limit {
                        acc[i + j] %= p;
                        pending[i + j] = 1;
                    }
                }
            }
            for (x, a) in c.iter_mut().zip(acc) {
                *x = a % p;
            }
        } else {
            for (i, &a) in self.c.iter().enumerate() {
                for (j, &b) in o.c.iter().enumerate() {
                    c[i + j] = addp(c[i + j], mulp(a, b, p), p);
                }
            }
        }
        Self::from_reduced(p, c)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        self.same_field(d);
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod_prime(d.lead(), p);
        let dn = d.c.len() - 1;
        let mut r = self.c.clone();
        let mut q = vec![0u64; self.c.len() - dn];
        for i in (0..q.len()).rev() {
            let coef = mulp(r[i + dn], inv, p);
            q[i] = coef;
            if coef != 0 {
                for (j, &dj) in d.c.iter().enumerate() {
                    r[i + j] = subp(r[i + j], mulp(coef, dj, p), p);
                }
            }
        }
        r.truncate(dn);
        (Self::from_reduced(p, q), Self::from_reduced(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        if d.is_monic() && self.p < (1 << 31) {
            return self.rem_monic(d);
        }
        self.div_rem(d).1
    }

    fn rem_monic(&self, d: &Self) -> Self {
        let p = self.p;
        if self.c.len() < d.c.len() {
            return self.clone();
        }
        let dn = d.c.len() - 1;
        let mut r = self.c.clone();
        for i in (dn..r.len()).rev() {
            let coef = r[i] % p;
            if coef != 0 {
                let m = p - coef;
                for j in 0..dn {
                    r[i - dn + j] = (r[i - dn + j] + m * d.c[j]) % p;
                }
            }
        }
        r.truncate(dn);
        Self::from_reduced(p, r)
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, a: &Self) -> bool {
        a.rem(self).is_zero()
    }

    pub fn make_monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(inv_mod_prime(self.lead(), self.p))
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        self.same_field(o);
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &x)| mulp(x, i as u64 % p, p))
            .collect();
        Self::from_reduced(p, c)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.c
            .iter()
            .rev()
            .fold(0, |acc, &a| addp(mulp(acc, x % p, p), a, p))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut r = Self::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        r
    }

    pub fn mul_mod(&self, o: &Self, m: &Self) -> Self {
        self.mul(o).rem(m)
    }

    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut r = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_mod(&base, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, m);
            }
        }
        r
    }

    pub fn pow_mod_big(&self, e: &BigUint, m: &Self) -> Self {
        let mut r = Self::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            r = r.mul_mod(&r, m);
            if e.bit(i) {
                r = r.mul_mod(&base, m);
            }
        }
        r
    }

    /// The polynomial with coefficients `c[i·p]`, i.e. the p-th root of a
    /// polynomial in T^p (Frobenius is the identity on F_p).
    pub(crate) fn pth_root(&self) -> Self {
        let p = self.p as usize;
        debug_assert!(self.c.iter().enumerate().all(|(i, &x)| x == 0 || i % p == 0));
        Self::from_reduced(self.p, self.c.iter().step_by(p).copied().collect())
    }

    /// Multiplicity of T as a factor (0 for nonzero constant term).
    pub fn t_valuation(&self) -> usize {
        self.c.iter().take_while(|&&x| x == 0).count()
    }

    /// Compact human-readable form, e.g. `T^2 + 2T + 1`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            let coef = if a == 1 && i > 0 { String::new() } else { a.to_string() };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}T"),
                _ => format!("{coef}T^{i}"),
            });
        }
        terms.join(" + ")
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) || p > MAX_PRIME {
        return Err(Error::invalid(format!("{p} is not a supported prime")));
    }
    Ok(())
}

/// Orders by degree, then lexicographically by coefficient list.
impl Ord for FpPoly {
    fn cmp(&self, o: &Self) -> Ordering {
        self.p
            .cmp(&o.p)
            .then(self.c.len().cmp(&o.c.len()))
            .then_with(|| self.c.cmp(&o.c))
    }
}

impl PartialOrd for FpPoly {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly(mod {}: {})", self.p, self.pretty())
    }
}

/// The text format `p:c0,c1,...,cd`.
impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.p)?;
        if self.c.is_empty() {
            return write!(f, "0");
        }
        for (i, x) in self.c.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for FpPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (p, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("polynomial {s:?}: expected p:c0,c1,...")))?;
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad prime {p:?}")))?;
        let coeffs = rest
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::parse(format!("bad coefficient {x:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FpPoly::from_i64(p, &coeffs).map_err(|e| Error::parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec()).unwrap()
    }

    #[test]
    fn text_roundtrip() {
        let a: FpPoly = "5:1,-1,0,1".parse().unwrap();
        assert_eq!(a, fp(5, &[1, 4, 0, 1]));
        assert_eq!(a.to_string(), "5:1,4,0,1");
        assert_eq!(a.to_string().parse::<FpPoly>().unwrap(), a);
        assert_eq!(FpPoly::zero(3).to_string(), "3:0");
        assert!("4:1,1".parse::<FpPoly>().is_err());
        assert!("x".parse::<FpPoly>().is_err());
        assert_eq!(a.pretty(), "T^3 + 4T + 1");
    }

    #[test]
    fn division_identity() {
        let a = fp(7, &[3, 1, 4, 1, 5, 2, 6]);
        let b = fp(7, &[2, 0, 3]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.deg() < b.deg());
        assert_eq!(a.rem(&b.make_monic()), r.rem(&b.make_monic()));
    }

    #[test]
    fn gcd_and_index() {
        let x1 = fp(3, &[1, 1]);
        let x2 = fp(3, &[2, 1]);
        let a = x1.mul(&x2).mul(&x2);
        let b = x2.mul(&fp(3, &[1, 0, 1]));
        assert_eq!(a.gcd(&b), x2);
        for idx in 0..81 {
            let m = FpPoly::monic_from_index(3, 4, idx);
            assert_eq!(m.monic_index(), Some(idx));
            assert_eq!(m.deg(), 4);
        }
    }

    #[test]
    fn large_prime_arithmetic() {
        let p = (1u64 << 61) - 1;
        let a = fp(p, &[p - 1, 3, 1]);
        let b = fp(p, &[5, p - 2]);
        let (q, r) = a.mul(&b).div_rem(&b);
        assert_eq!(q, a);
        assert!(r.is_zero());
        assert_eq!(a.pow(3), a.mul(&a).mul(&a));
    }

    #[test]
    fn derivative_and_eval() {
        let a = fp(5, &[1, 2, 3, 4]);
        assert_eq!(a.derivative(), fp(5, &[2, 6, 12]));
        assert_eq!(a.eval(2), (1 + 4 + 12 + 32) % 5);
        assert_eq!(fp(3, &[0, 0, 1, 1]).t_valuation(), 2);
    }
}
