//! Seeded experiments over ℤ: the irreducibility decider, Monte Carlo
//! estimates of the irreducibility probability, the random-subset α
//! experiment and batch suites.
//!
//! Reports carry no timing information so that they are byte-identical for
//! identical inputs, whatever the number of worker threads.

mod mc;
mod subset;
mod suite;
mod zirr;

use serde::Serialize;

pub use mc::{mc_irreducibility, rivin_bound, ExperimentConfig, ExperimentReport, StageCounts};
pub use subset::{random_subset_alpha, SubsetConfig, SubsetReport, SUBSET_MODULUS, SUBSET_THRESHOLD};
pub use suite::{run_suite, Manifest, ManifestEntry, SuiteConfig, SuiteEntry, SuiteTask};
pub use zirr::{cyclotomic, irreducible_over_z, ZBudget, ZDecision, ZMethod, ZVerdict};

/// Version of the JSON layout of every report and manifest.
pub const SCHEMA_VERSION: u32 = 1;

/// A binomial proportion with its standard error and 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Proportion {
    pub count: u64,
    pub total: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

impl Proportion {
    pub fn new(count: u64, total: u64) -> Self {
        assert!(count <= total);
        if total == 0 {
            return Proportion { count, total, estimate: 0.0, stderr: 0.0, wilson_lo: 0.0, wilson_hi: 1.0 };
        }
        let n = total as f64;
        let p = count as f64 / n;
        let z = 1.959_963_984_540_054;
        let z2 = z * z;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Proportion {
            count,
            total,
            estimate: p,
            stderr: (p * (1.0 - p) / n).sqrt(),
            wilson_lo: (centre - half).max(0.0),
            wilson_hi: (centre + half).min(1.0),
        }
    }
}
