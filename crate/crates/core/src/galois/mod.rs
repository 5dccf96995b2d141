//! Cycle-type combinatorics, block-system tests, the events E1–E5 and a
//! Frobenius-based certifier for A_n ≤ Gal(A).

mod certify;
mod events;
mod merge;
mod nu;
mod transitive;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fpoly::Partition;

pub use certify::{frobenius_certify, Conclusion, FrobeniusEvidence, GaloisCertificate, TypeWitness};
pub use events::{partition_events, subset_sums, EventThresholds, PartitionEvents};
pub use merge::{cycle_power, enumerate_mergings, is_y_merging, power_support, MERGE_PART_CAP};
pub use nu::{nu_checks, NuMode, NuReport, NuValue, PairCheck, TailCheck, TAIL_T};
pub use transitive::{
    block_system, support_of_power, transitive_overapprox, BlockGroup, BlockWitness, Membership,
    PowerWitness, TransitivityReport,
};

/// A conjugacy class of S_n, given by its cycle lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    partition: Partition,
    n: u64,
}

impl CycleType {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        let partition = Partition::new(parts)?;
        if partition.is_empty() {
            return Err(Error::invalid("a cycle type needs at least one cycle"));
        }
        let n = partition.n();
        Ok(CycleType { partition, n })
    }

    pub(crate) fn from_partition(partition: Partition, n: u64) -> Self {
        debug_assert_eq!(partition.n(), n);
        CycleType { partition, n }
    }

    /// Checks that the parts sum to `n`.
    pub fn with_n(partition: Partition, n: u64) -> Result<Self> {
        if partition.n() != n || n == 0 {
            return Err(Error::invalid(format!("{partition} is not a partition of {n}")));
        }
        Ok(CycleType { partition, n })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn parts(&self) -> &[u32] {
        self.partition.parts()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        self.parts().iter().all(|&l| l == 1)
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.partition.fmt(f)
    }
}

impl FromStr for CycleType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p: Partition = s.parse()?;
        CycleType::new(p.parts().to_vec()).map_err(|e| Error::parse(e.to_string()))
    }
}

impl Serialize for CycleType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.partition.serialize(s)
    }
}

/// The constants of the generalized Łuczak–Pyber proposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThmLPParams {
    pub c: f64,
    pub t: f64,
    pub kappa: f64,
    pub delta: f64,
    pub theta: f64,
}

impl ThmLPParams {
    /// Accepts C ≥ 1, t ∈ (0,1), κ ∈ (0,1], δ > 0 and 0 ≤ θ < δ/2. The
    /// proposition itself also needs δ ≤ 1/10, see
    /// [`ThmLPParams::in_proposition_range`]; larger δ is allowed so that
    /// the event windows can be explored at small n.
    pub fn new(c: f64, t: f64, kappa: f64, delta: f64, theta: f64) -> Result<Self> {
        let ok = c >= 1.0
            && t > 0.0
            && t < 1.0
            && kappa > 0.0
            && kappa <= 1.0
            && delta > 0.0
            && theta >= 0.0
            && theta < delta / 2.0;
        if !ok {
            return Err(Error::invalid(format!(
                "bad parameters C={c}, t={t}, κ={kappa}, δ={delta}, θ={theta}"
            )));
        }
        Ok(ThmLPParams { c, t, kappa, delta, theta })
    }

    /// α = δ/4 − θ/2.
    pub fn alpha(&self) -> f64 {
        self.delta / 4.0 - self.theta / 2.0
    }

    /// δ ≤ 1/10, θ ≤ δ/2 − ε and hence α ∈ [ε/2, 1/40].
    pub fn in_proposition_range(&self, eps: f64) -> bool {
        eps > 0.0
            && eps < self.delta / 2.0
            && self.delta <= 0.1
            && self.theta <= self.delta / 2.0 - eps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_type_basics() {
        let c: CycleType = "(3,1,2)".parse().unwrap();
        assert_eq!(c.n(), 6);
        assert_eq!(c.to_string(), "(1,2,3)");
        assert!(!c.is_identity());
        assert!(CycleType::with_n("(1,2)".parse().unwrap(), 4).is_err());
        assert!("()".parse::<CycleType>().is_err());
    }

    #[test]
    fn params() {
        let p = ThmLPParams::new(1.0, 0.5, 1.0, 0.1, 0.02).unwrap();
        assert!((p.alpha() - 0.015).abs() < 1e-15);
        assert!(p.in_proposition_range(0.01));
        assert!(!p.in_proposition_range(0.04));
        assert!(ThmLPParams::new(0.5, 0.5, 1.0, 0.1, 0.0).is_err());
        assert!(ThmLPParams::new(1.0, 0.5, 1.0, 0.1, 0.05).is_err());
        let q = ThmLPParams::new(1.0, 0.5, 1.0, 0.1, 0.0).unwrap();
        assert!(q.alpha() <= 1.0 / 40.0);
    }
}
