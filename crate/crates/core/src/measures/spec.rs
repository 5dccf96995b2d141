//! The measure-spec mini-language:
//!
//! ```text
//! box:LO..HI         uniform on the integers LO..=HI
//! set:@path          uniform on the integers listed one per line
//! powers:s=S,H=H     uniform on {k^S : 1 ≤ k ≤ H}
//! weighted:@path     lines "atom num/den"
//! delta:A            point mass at A
//! ```
//!
//! Integers may be written `10^6`. Blank lines and lines starting with `#`
//! are ignored in files.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::CoefficientMeasure;
use crate::error::{Error, Result};
use crate::interval::CertifiedInterval;

pub(crate) fn parse_int(s: &str) -> Result<i64> {
    let s = s.trim();
    let bad = || Error::parse(format!("bad integer {s:?}"));
    if let Some((b, e)) = s.split_once('^') {
        let base: i64 = b.trim().parse().map_err(|_| bad())?;
        let exp: u32 = e.trim().parse().map_err(|_| bad())?;
        return base.checked_pow(exp).ok_or_else(bad);
    }
    s.replace('_', "").parse().map_err(|_| bad())
}

fn read_lines(path: &str) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn file_arg<'a>(kind: &str, rest: &'a str) -> Result<&'a str> {
    rest.strip_prefix('@')
        .filter(|p| !p.is_empty())
        .ok_or_else(|| Error::parse(format!("{kind}: expected @path, got {rest:?}")))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::parse(format!("bad weight {s:?}"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Parses a measure spec.
pub fn parse_measure(spec: &str) -> Result<CoefficientMeasure> {
    let spec = spec.trim();
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::parse(format!("measure spec {spec:?} lacks a kind prefix")))?;
    match kind {
        "box" => {
            let (lo, hi) = rest
                .split_once("..")
                .ok_or_else(|| Error::parse(format!("box: expected LO..HI, got {rest:?}")))?;
            CoefficientMeasure::uniform_box(parse_int(lo)?, parse_int(hi)?)
        }
        "delta" => Ok(CoefficientMeasure::point(parse_int(rest)?)),
        "set" => {
            let atoms = read_lines(file_arg(kind, rest)?)?
                .iter()
                .map(|l| parse_int(l))
                .collect::<Result<Vec<_>>>()?;
            CoefficientMeasure::uniform_set(atoms)
        }
        "weighted" => {
            let mut pairs = Vec::new();
            for line in read_lines(file_arg(kind, rest)?)? {
                let mut it = line.split_whitespace();
                let (Some(a), Some(w), None) = (it.next(), it.next(), it.next()) else {
                    return Err(Error::parse(format!("weighted: bad line {line:?}")));
                };
                pairs.push((parse_int(a)?, parse_rational(w)?));
            }
            CoefficientMeasure::weighted(pairs)
        }
        "powers" => {
            let (mut s, mut h) = (None, None);
            for kv in rest.split(',') {
                match kv.split_once('=') {
                    Some(("s", v)) => s = Some(parse_int(v)?),
                    Some(("H", v)) => h = Some(parse_int(v)?),
                    _ => return Err(Error::parse(format!("powers: bad field {kv:?}"))),
                }
            }
            let (Some(s), Some(h)) = (s, h) else {
                return Err(Error::parse("powers: need s=S,H=H"));
            };
            if s < 1 || h < 1 {
                return Err(Error::parse("powers: s and H must be positive"));
            }
            let atoms = (1..=h)
                .map(|k| {
                    k.checked_pow(s as u32)
                        .ok_or_else(|| Error::invalid(format!("{k}^{s} overflows i64")))
                })
                .collect::<Result<Vec<_>>>()?;
            CoefficientMeasure::uniform_set(atoms)
        }
        other => Err(Error::parse(format!("unknown measure kind {other:?}"))),
    }
}

/// JSON summary of an α/β evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub spec: String,
    #[serde(rename = "P")]
    pub modulus: u64,
    pub alpha: CertifiedInterval,
    pub beta: CertifiedInterval,
    pub certified: bool,
}
