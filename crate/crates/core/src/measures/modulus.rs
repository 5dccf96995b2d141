use serde::Serialize;

use super::{alpha_beta, AlphaBeta, MeasureSequence};
use crate::arith::{gcd, primes_up_to, Primes};
use crate::error::{Error, Result};
use crate::interval::CertifiedInterval;

/// The modulus used for s-th power coefficients: the product of the first four
/// primes p with gcd(p − 1, s) = 1, for which x ↦ x^s permutes F_p.
pub fn sth_power_modulus(s: u64) -> Result<(u64, Vec<u64>)> {
    if s == 0 || s % 2 == 0 {
        return Err(Error::invalid(format!("s = {s} must be odd and positive")));
    }
    let primes: Vec<u64> = Primes::new().filter(|&p| gcd(p - 1, s) == 1).take(4).collect();
    Ok((primes.iter().product(), primes))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodModulus {
    pub modulus: u64,
    pub primes: Vec<u64>,
    pub alpha: CertifiedInterval,
    pub beta: CertifiedInterval,
    pub candidates: usize,
}

/// Largest candidate modulus accepted by [`find_good_modulus`].
pub const MAX_SEARCH_MODULUS: u64 = 1 << 28;

/// Searches N_4(x), the products of four distinct primes in [x/2, x], for
/// the modulus minimizing the certified upper bound on α.
pub fn find_good_modulus(measures: &MeasureSequence, x: f64) -> Result<GoodModulus> {
    if !x.is_finite() || x < 2.0 {
        return Err(Error::invalid(format!("x = {x} too small")));
    }
    let lo = (x / 2.0).ceil() as u64;
    let primes: Vec<u64> = primes_up_to(x.floor() as u64)
        .into_iter()
        .filter(|&p| p >= lo)
        .collect();
    if primes.len() < 4 {
        return Err(Error::invalid(format!(
            "N_4({x}) is empty: only {} primes in [{}, {}] ({:?}), need four",
            primes.len(),
            x / 2.0,
            x,
            primes
        )));
    }
    let top: u64 = primes[primes.len() - 4..].iter().product();
    if top > MAX_SEARCH_MODULUS {
        return Err(Error::CapExceeded {
            what: "modulus search",
            needed: top as u128,
            cap: MAX_SEARCH_MODULUS as u128,
        });
    }
    let mut best: Option<(AlphaBeta, Vec<u64>)> = None;
    let mut candidates = 0;
    let n = primes.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    candidates += 1;
                    let set = vec![primes[a], primes[b], primes[c], primes[d]];
                    let p: u64 = set.iter().product();
                    let ab = alpha_beta(measures, p, None)?;
                    let better = match &best {
                        None => true,
                        Some((cur, _)) => ab.alpha.upper() < cur.alpha.upper(),
                    };
                    if better {
                        best = Some((ab, set));
                    }
                }
            }
        }
    }
    let (ab, set) = best.unwrap();
    Ok(GoodModulus {
        modulus: set.iter().product(),
        primes: set,
        alpha: ab.alpha,
        beta: ab.beta,
        candidates,
    })
}
