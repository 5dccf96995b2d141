//! Computational tools for studying when random integer polynomials are
//! irreducible.
//!
//! The crate is organized bottom-up:
//!
//! * [`measures`]: coefficient measures, their Fourier transforms and the
//!   certified quantities α(P), β(P).
//! * [`fpoly`]: polynomials over F_p, factorization and divisor statistics.
//! * [`equidist`]: the exact law of A mod D and the discrepancies built from it.
//! * [`sieve`]: Brun's pure sieve over F_p\[T\] and exact rough counts.
//! * [`anatomy`]: smooth parts, additive functions and divisor-degree densities.
//! * [`galois`]: cycle-type combinatorics and a Frobenius-based certifier.
//! * [`experiments`]: integer polynomials, Monte Carlo drivers and reports.

pub mod anatomy;
pub mod arith;
pub mod equidist;
pub mod experiments;
pub mod error;
pub mod fpoly;
pub mod galois;
pub mod intpoly;
pub mod interval;
pub mod measures;
pub mod rng;
pub mod sieve;

pub use error::{Error, Result};
pub use interval::CertifiedInterval;
pub use fpoly::{FpPoly, Factorization, Partition};
pub use intpoly::IntPoly;
pub use measures::{CoefficientMeasure, MeasureSequence, RationalPhase};
