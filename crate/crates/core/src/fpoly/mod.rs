//! Polynomials over F_p: arithmetic, factorization and divisor statistics.

mod enumerate;
mod factor;
mod partition;
mod poly;
mod stats;

pub use enumerate::{monic_count, monic_irreducibles, monic_polys, ENUMERATION_CAP};
pub use factor::{
    distinct_degree, factor, factor_seeded, is_irreducible, squarefree_decomposition,
    Factorization, DEFAULT_FACTOR_SEED,
};
pub use partition::Partition;
pub use poly::{FpPoly, MAX_PRIME};
pub use stats::{
    count_irreducibles, count_irreducibles_u128, degree_set_from_parts, degree_set_of,
    divisor_degree_set, factorization_type, irreducible_density, ppt_bracket_holds,
    smooth_rough_split, split_factorization, type_of, DegreeSet, FactorizationType,
};
