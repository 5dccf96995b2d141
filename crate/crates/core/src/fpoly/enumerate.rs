use super::{is_irreducible, FpPoly};
use crate::error::{check_cap, Result};

/// Default cap on exhaustive enumerations.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// Number of monic polynomials of degree n over F_p, if it fits.
pub fn monic_count(p: u64, n: usize) -> Option<u64> {
    p.checked_pow(n as u32)
}

/// Iterator over all monic polynomials of degree `n`, in index order.
pub fn monic_polys(p: u64, n: usize) -> impl Iterator<Item = FpPoly> {
    let count = monic_count(p, n).expect("enumeration too large");
    (0..count).map(move |i| FpPoly::monic_from_index(p, n, i))
}

/// All monic irreducibles of degree `k`, sorted.
pub fn monic_irreducibles(p: u64, k: usize) -> Result<Vec<FpPoly>> {
    let count = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    check_cap("irreducible enumeration", count, ENUMERATION_CAP)?;
    Ok(monic_polys(p, k)
        .filter(|f| is_irreducible(f).unwrap_or(false))
        .collect())
}
