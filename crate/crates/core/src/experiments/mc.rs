//! Monte Carlo estimates of P(A irreducible | a_0 ≠ 0).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::zirr::{irreducible_over_z, ZBudget, ZMethod, ZVerdict};
use super::{Proportion, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;
use crate::measures::{parse_measure, CoefficientMeasure, MeasureSequence};
use crate::rng::sample_stream;

/// Draws per sample before the a_0 ≠ 0 rejection loop gives up.
const MAX_REJECTIONS: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Measure spec of every coefficient a_0, …, a_{n−1}.
    pub measure: String,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    #[serde(default)]
    pub budget: ZBudget,
    /// Keep every sampled polynomial and its verdict in the report.
    #[serde(default)]
    pub keep_samples: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StageCounts {
    pub stage0: u64,
    pub stage1: u64,
    pub stage2: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: u64,
    pub poly: IntPoly,
    pub verdict: ZVerdict,
    pub stage: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    /// Accepted samples (a_0 ≠ 0); equals `config.samples`.
    pub samples: u64,
    /// Draws including those rejected for a_0 = 0.
    pub raw_draws: u64,
    pub irreducible: Proportion,
    pub reducible: Proportion,
    pub undecided: Proportion,
    /// Samples decided at each stage; sums to `samples`.
    pub stages: StageCounts,
    pub methods: BTreeMap<String, u64>,
    /// Samples with A(−1) = 0 and with A(1) = 0.
    pub root_minus_one: Proportion,
    pub root_plus_one: Proportion,
    /// n(1 + log H)/H when every coefficient is uniform on [1, H].
    pub rivin_bound: Option<f64>,
    pub records: Option<Vec<SampleRecord>>,
}

/// The bound n(1 + log H)/H on P(A reducible) for coefficients uniform on
/// [1, H].
pub fn rivin_bound(n: usize, h: u64) -> f64 {
    n as f64 * (1.0 + (h as f64).ln()) / h as f64
}

struct Outcome {
    draws: u64,
    poly: IntPoly,
    verdict: ZVerdict,
    stage: u8,
    method: ZMethod,
    minus_one: bool,
    plus_one: bool,
}

fn run_sample(
    measures: &MeasureSequence,
    cfg: &ExperimentConfig,
    index: u64,
) -> Result<Outcome> {
    let mut rng = sample_stream(cfg.seed, index);
    let mut draws = 0;
    let coeffs = loop {
        draws += 1;
        let c = measures.sample_coeffs(cfg.n, &mut rng);
        if c[0] != 0 {
            break c;
        }
        if draws >= MAX_REJECTIONS {
            return Err(Error::BudgetExhausted(format!(
                "sample {index}: a_0 = 0 in {draws} consecutive draws"
            )));
        }
    };
    let mut c: Vec<BigInt> = coeffs.into_iter().map(BigInt::from).collect();
    c.push(BigInt::one());
    let poly = IntPoly::new(c);
    let d = irreducible_over_z(&poly, &cfg.budget)?;
    Ok(Outcome {
        draws,
        minus_one: poly.eval(&-BigInt::one()).is_zero(),
        plus_one: poly.eval(&BigInt::one()).is_zero(),
        poly,
        verdict: d.verdict,
        stage: d.stage,
        method: d.method,
    })
}

fn method_name(m: ZMethod) -> String {
    serde_json::to_value(m)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

pub fn mc_irreducibility(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let measure: CoefficientMeasure = parse_measure(&cfg.measure)?;
    if cfg.n == 0 || cfg.samples == 0 {
        return Err(Error::invalid("degree and sample count must be positive"));
    }
    if measure.weight_of(0) == measure.total_mass() {
        return Err(Error::invalid(format!(
            "{}: a_0 = 0 almost surely, the conditioning event is empty",
            cfg.measure
        )));
    }
    let measures = MeasureSequence::iid(measure.clone());
    // Ordered collection keeps the aggregation independent of scheduling.
    let outcomes: Vec<Outcome> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| run_sample(&measures, cfg, i))
        .collect::<Result<_>>()?;

    let total = cfg.samples;
    let count = |v: ZVerdict| outcomes.iter().filter(|o| o.verdict == v).count() as u64;
    let mut stages = StageCounts::default();
    let mut methods = BTreeMap::new();
    for o in &outcomes {
        match o.stage {
            0 => stages.stage0 += 1,
            1 => stages.stage1 += 1,
            _ => stages.stage2 += 1,
        }
        *methods.entry(method_name(o.method)).or_insert(0) += 1;
    }
    let rivin = match measure.as_box() {
        Some((1, h)) if h >= 1 => Some(rivin_bound(cfg.n, h as u64)),
        _ => None,
    };
    let records = cfg.keep_samples.then(|| {
        outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| SampleRecord {
                index: i as u64,
                poly: o.poly.clone(),
                verdict: o.verdict,
                stage: o.stage,
            })
            .collect()
    });
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        experiment: "mc_irreducibility",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        samples: total,
        raw_draws: outcomes.iter().map(|o| o.draws).sum(),
        irreducible: Proportion::new(count(ZVerdict::Irreducible), total),
        reducible: Proportion::new(count(ZVerdict::Reducible), total),
        undecided: Proportion::new(count(ZVerdict::Undecided), total),
        stages,
        methods,
        root_minus_one: Proportion::new(outcomes.iter().filter(|o| o.minus_one).count() as u64, total),
        root_plus_one: Proportion::new(outcomes.iter().filter(|o| o.plus_one).count() as u64, total),
        rivin_bound: rivin,
        records,
    })
}
