//! Random N-subsets of [−H, H] and how often α(210) ≤ 3/4 is certified.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Proportion, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::measures::{alpha_from_magnitudes, magnitude_table, CoefficientMeasure};
use crate::rng::sample_stream;

pub const SUBSET_MODULUS: u64 = 210;
pub const SUBSET_THRESHOLD: f64 = 0.75;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetConfig {
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetReport {
    pub schema_version: u32,
    pub experiment: &'static str,
    pub version: &'static str,
    pub config: SubsetConfig,
    pub modulus: u64,
    pub threshold: f64,
    pub certified: Proportion,
    /// 1/√N, the order of the failure probability.
    pub reference: f64,
    /// Certified upper bound on α(210) for each trial.
    pub alpha_upper: Vec<f64>,
}

pub fn random_subset_alpha(cfg: &SubsetConfig) -> Result<SubsetReport> {
    let width = 2 * cfg.h + 1;
    if cfg.n < 2 || cfg.n > width {
        return Err(Error::invalid(format!(
            "N = {} must lie in [2, 2H+1] = [2, {width}]",
            cfg.n
        )));
    }
    if cfg.trials == 0 {
        return Err(Error::invalid("trial count must be positive"));
    }
    let h = i64::try_from(cfg.h).map_err(|_| Error::invalid("H too large"))?;
    let alpha_upper: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = sample_stream(cfg.seed, t);
            let atoms: Vec<i64> = index::sample(&mut rng, width as usize, cfg.n as usize)
                .into_iter()
                .map(|i| i as i64 - h)
                .collect();
            let m = CoefficientMeasure::uniform_set(atoms)?;
            let table = magnitude_table(&m, SUBSET_MODULUS)?;
            Ok(alpha_from_magnitudes(&table, SUBSET_MODULUS).upper())
        })
        .collect::<Result<_>>()?;
    let ok = alpha_upper.iter().filter(|&&a| a <= SUBSET_THRESHOLD).count() as u64;
    Ok(SubsetReport {
        schema_version: SCHEMA_VERSION,
        experiment: "random_subset_alpha",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        modulus: SUBSET_MODULUS,
        threshold: SUBSET_THRESHOLD,
        certified: Proportion::new(ok, cfg.trials),
        reference: 1.0 / (cfg.n as f64).sqrt(),
        alpha_upper,
    })
}
