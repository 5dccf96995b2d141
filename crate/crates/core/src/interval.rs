//! Outward-rounded interval arithmetic on `f64`.
//!
//! Every basic operation is computed in round-to-nearest and then pushed
//! one ulp outward, which encloses the exact result. Library transcendental
//! functions are widened by [`LIBM_ULPS`] ulps on top of an explicit bound on
//! argument error.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Error allowance, in ulps of the result, granted to libm's sin/exp/ln.
pub const LIBM_ULPS: u32 = 4;

const U: f64 = f64::EPSILON / 2.0;

#[derive(Clone, Copy, PartialEq)]
pub struct CertifiedInterval {
    lower: f64,
    upper: f64,
}

fn down(x: f64, k: u32) -> f64 {
    (0..k).fold(x, |v, _| v.next_down())
}

fn up(x: f64, k: u32) -> f64 {
    (0..k).fold(x, |v, _| v.next_up())
}

impl CertifiedInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() || lower > upper {
            return Err(Error::invalid(format!("bad interval [{lower}, {upper}]")));
        }
        Ok(CertifiedInterval { lower, upper })
    }

    fn raw(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "[{lower}, {upper}]");
        CertifiedInterval { lower, upper }
    }

    /// The degenerate interval at an exactly representable value.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite());
        Self::raw(x, x)
    }

    /// Enclosure of a value known to be within `err` of `x`.
    pub fn around(x: f64, err: f64) -> Self {
        assert!(err >= 0.0);
        Self::raw((x - err).next_down(), (x + err).next_up())
    }

    /// Enclosure of a value of which `x` is the correctly rounded image.
    pub fn rounded(x: f64) -> Self {
        Self::raw(x.next_down(), x.next_up())
    }

    pub fn from_u128(n: u128) -> Self {
        let x = n as f64;
        if x as u128 == n && (x as u128) < (1u128 << 53) {
            Self::point(x)
        } else {
            Self::rounded(x)
        }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        if q.is_integer() {
            if let Some(i) = q.to_integer().to_i64() {
                if i.unsigned_abs() < (1 << 53) {
                    return Self::point(i as f64);
                }
            }
        }
        let x = q.to_f64().expect("rational out of f64 range");
        Self::raw(down(x, 2), up(x, 2))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::from_rational(&BigRational::from_integer(n.clone()))
    }

    pub fn pi() -> Self {
        // f64 PI lies below the true value and its successor above it.
        Self::raw(std::f64::consts::PI, std::f64::consts::PI.next_up())
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn mid(&self) -> f64 {
        self.lower / 2.0 + self.upper / 2.0
    }

    pub fn width(&self) -> f64 {
        (self.upper - self.lower).next_up()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self::raw(self.lower.min(other.lower), self.upper.max(other.upper))
    }

    /// Enclosure of `max(x, y)` for `x` in `self`, `y` in `other`.
    pub fn max(&self, other: &Self) -> Self {
        Self::raw(self.lower.max(other.lower), self.upper.max(other.upper))
    }

    pub fn min(&self, other: &Self) -> Self {
        Self::raw(self.lower.min(other.lower), self.upper.min(other.upper))
    }

    pub fn abs(&self) -> Self {
        if self.lower >= 0.0 {
            *self
        } else if self.upper <= 0.0 {
            -*self
        } else {
            Self::raw(0.0, self.upper.max(-self.lower))
        }
    }

    /// Intersect with `[lo, hi]`, used when the exact value is known to lie there.
    pub fn clamp(&self, lo: f64, hi: f64) -> Self {
        let l = self.lower.max(lo);
        let u = self.upper.min(hi);
        if l > u {
            // Only possible through a bug in the caller's a-priori bounds.
            panic!("clamp [{lo}, {hi}] disjoint from {self:?}");
        }
        Self::raw(l, u)
    }

    /// Certified strict inequality `x < t` for every `x` in the interval.
    pub fn certainly_below(&self, t: f64) -> bool {
        self.upper < t
    }

    pub fn certainly_above(&self, t: f64) -> bool {
        self.lower > t
    }

    pub fn scale(&self, k: f64) -> Self {
        *self * Self::point(k)
    }

    pub fn recip(&self) -> Self {
        assert!(
            self.lower > 0.0 || self.upper < 0.0,
            "reciprocal of interval containing 0"
        );
        Self::raw((1.0 / self.upper).next_down(), (1.0 / self.lower).next_up())
    }

    pub fn div(&self, other: &Self) -> Self {
        *self * other.recip()
    }

    pub fn sqrt(&self) -> Self {
        assert!(self.lower >= 0.0 || self.lower > -1e-300, "sqrt of negative");
        let lo = self.lower.max(0.0).sqrt().next_down().max(0.0);
        Self::raw(lo, self.upper.sqrt().next_up())
    }

    pub fn square(&self) -> Self {
        let a = self.abs();
        Self::raw((a.lower * a.lower).next_down().max(0.0), (a.upper * a.upper).next_up())
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, k: u32) -> Self {
        let mut r = Self::point(1.0);
        for _ in 0..k {
            r = r * *self;
        }
        r
    }

    pub fn exp(&self) -> Self {
        let lo = down(self.lower.exp(), LIBM_ULPS).max(0.0);
        Self::raw(lo, up(self.upper.exp(), LIBM_ULPS))
    }

    pub fn ln(&self) -> Self {
        assert!(self.lower > 0.0, "log of non-positive interval");
        Self::raw(down(self.lower.ln(), LIBM_ULPS), up(self.upper.ln(), LIBM_ULPS))
    }

    /// `ln(1 + x)`, accurate for small `x`.
    pub fn ln_1p(&self) -> Self {
        assert!(self.lower > -1.0);
        Self::raw(
            down(self.lower.ln_1p(), LIBM_ULPS),
            up(self.upper.ln_1p(), LIBM_ULPS),
        )
    }

    /// `sin(π r / q)` for integers `r`, `q > 0`, with argument reduction
    /// done exactly in integers.
    pub fn sin_pi_frac(r: i128, q: u64) -> Self {
        assert!(q > 0 && q < (1u64 << 52));
        let q = q as i128;
        let mut r = r.rem_euclid(2 * q);
        let mut neg = false;
        if r >= q {
            r -= q;
            neg = true;
        }
        if 2 * r > q {
            r = q - r;
        }
        let v = if r == 0 {
            Self::point(0.0)
        } else if 2 * r == q {
            Self::point(1.0)
        } else {
            // x = fl(fl(r/q)·PI) has relative error < 3.1u against π r/q,
            // so |Δx| ≤ 4u·x; |d sin| ≤ |dx|.
            let x = (r as f64 / q as f64) * std::f64::consts::PI;
            let s = x.sin();
            let e = 4.0 * U * x;
            Self::raw(down(s - e, LIBM_ULPS + 1), up(s + e, LIBM_ULPS + 1)).clamp(0.0, 1.0)
        };
        if neg {
            -v
        } else {
            v
        }
    }

    /// `cos(π r / q)`.
    pub fn cos_pi_frac(r: i128, q: u64) -> Self {
        Self::sin_pi_frac(2 * r + q as i128, 2 * q)
    }
}

impl Add for CertifiedInterval {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let lo = self.lower + o.lower;
        let hi = self.upper + o.upper;
        // Sums of exact zero-width terms that are themselves exact need no widening,
        // but checking that is not worth it; widen unconditionally.
        Self::raw(lo.next_down(), hi.next_up())
    }
}

impl Sub for CertifiedInterval {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for CertifiedInterval {
    type Output = Self;
    fn neg(self) -> Self {
        Self::raw(-self.upper, -self.lower)
    }
}

impl Mul for CertifiedInterval {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let c = [
            self.lower * o.lower,
            self.lower * o.upper,
            self.upper * o.lower,
            self.upper * o.upper,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::raw(lo.next_down(), hi.next_up())
    }
}

impl fmt::Debug for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lower, self.upper)
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

impl Serialize for CertifiedInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lower, self.upper].serialize(s)
    }
}

impl<'de> Deserialize<'de> for CertifiedInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[f64; 2]>::deserialize(d)?;
        CertifiedInterval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}
