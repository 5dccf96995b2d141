//! Certifying A_n ≤ Gal(A) from factorization types of squarefree reductions.
//!
//! If A_p is squarefree, Frobenius at p has cycle type exactly τ_{A_p}, so
//! every observed type is the cycle type of some element of the Galois group.
//! The certificate combines the following classical facts:
//!
//! * a type (n) makes the group transitive;
//! * a transitive group is primitive if n is prime, if it contains an element
//!   of type (1, n−1) (then it is 2-transitive), or if it contains a q-cycle
//!   for a prime q > n/2;
//! * a primitive group containing a transposition is S_n; one containing a
//!   q-cycle for a prime q ≤ n − 3 contains A_n (Jordan);
//! * every transitive group of degree ≤ 3 and every primitive group of
//!   degree 4 contains A_n.
//!
//! A type yields a q-cycle as a power when exactly one part is divisible by q
//! and that part equals q. In particular a prime part q with n/2 < q < n − 2
//! proves primitivity and A_n ≤ G at once.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, Primes};
use crate::error::{Error, Result};
use crate::fpoly::{factor_seeded, Partition};
use crate::intpoly::IntPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    /// T divides A.
    Reducible,
    NoCertificate,
    TransitiveOnly,
    CertifiedAnOrSn,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusEvidence {
    pub prime: u64,
    /// Factorization type of A mod p; omitted for non-squarefree reductions.
    #[serde(rename = "type")]
    pub cycle_type: Option<Partition>,
    pub squarefree: bool,
    pub conclusion_so_far: Conclusion,
}

/// One observed type and the property it establishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeWitness {
    pub prime: u64,
    #[serde(rename = "type")]
    pub cycle_type: Partition,
    pub route: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaloisCertificate {
    pub poly: IntPoly,
    pub n: usize,
    pub budget: u64,
    pub seed: u64,
    pub conclusion: Conclusion,
    pub primes_scanned: u64,
    pub skipped_nonsquarefree: u64,
    pub irreducible_reductions: u64,
    pub transitive: Option<TypeWitness>,
    pub primitive: Option<TypeWitness>,
    pub alternating: Option<TypeWitness>,
    /// A transposition was found, so the group is all of S_n.
    pub symmetric: bool,
    pub evidence: Vec<FrobeniusEvidence>,
}

/// The unique part divisible by the prime q, if there is exactly one.
fn sole_multiple(parts: &[u32], q: u32) -> Option<u32> {
    let mut it = parts.iter().filter(|&&k| k % q == 0);
    let first = *it.next()?;
    it.next().is_none().then_some(first)
}

/// Primes q such that some power of an element of this type is a q-cycle.
fn prime_cycles(parts: &[u32]) -> Vec<u32> {
    let mut qs: Vec<u32> = parts
        .iter()
        .copied()
        .filter(|&k| is_prime(k as u64) && sole_multiple(parts, k) == Some(k))
        .collect();
    qs.dedup();
    qs
}

#[derive(Default)]
struct State {
    transitive: Option<TypeWitness>,
    primitive: Option<TypeWitness>,
    alternating: Option<TypeWitness>,
    /// Elements that only matter once primitivity is known.
    pending: Vec<TypeWitness>,
    symmetric: bool,
}

impl State {
    fn conclusion(&self) -> Conclusion {
        if self.alternating.is_some() {
            Conclusion::CertifiedAnOrSn
        } else if self.transitive.is_some() {
            Conclusion::TransitiveOnly
        } else {
            Conclusion::NoCertificate
        }
    }

    fn observe(&mut self, n: usize, p: u64, parts: &[u32]) {
        let w = |route: &str| TypeWitness {
            prime: p,
            cycle_type: Partition::new(parts.to_vec()).unwrap(),
            route: route.to_string(),
        };
        let n32 = n as u32;
        if parts == [n32] && self.transitive.is_none() {
            self.transitive = Some(w("n-cycle"));
        }
        if self.primitive.is_none() {
            if parts == [1, n32 - 1] {
                self.primitive = Some(w("(n-1)-cycle: 2-transitive"));
            } else if let Some(q) = prime_cycles(parts).into_iter().find(|&q| 2 * q > n32) {
                self.primitive = Some(w(&format!("{q}-cycle with {q} > n/2")));
            }
        }
        if sole_multiple(parts, 2) == Some(2) {
            self.pending.push(w("transposition"));
        } else if let Some(q) = prime_cycles(parts).into_iter().find(|&q| q >= 3 && q + 3 <= n32) {
            self.pending.push(w(&format!("{q}-cycle (Jordan)")));
        }
        self.resolve(n);
    }

    fn resolve(&mut self, n: usize) {
        let Some(t) = &self.transitive else {
            return;
        };
        if n <= 3 {
            self.alternating.get_or_insert_with(|| TypeWitness {
                route: "transitive of degree ≤ 3".into(),
                ..t.clone()
            });
            self.symmetric |= n == 2;
            return;
        }
        if self.primitive.is_none() && is_prime(n as u64) {
            self.primitive = Some(TypeWitness {
                route: "transitive of prime degree".into(),
                ..t.clone()
            });
        }
        let Some(prim) = &self.primitive else {
            return;
        };
        if self.alternating.is_none() && n == 4 {
            self.alternating = Some(TypeWitness {
                route: "primitive of degree 4".into(),
                ..prim.clone()
            });
        }
        if let Some(tr) = self.pending.iter().find(|w| w.route == "transposition") {
            self.symmetric = true;
            self.alternating = Some(tr.clone());
        } else if self.alternating.is_none() {
            self.alternating = self.pending.first().cloned();
        }
    }
}

/// Scans up to `prime_budget` primes in ascending order, stopping once A_n
/// is certified.
pub fn frobenius_certify(a: &IntPoly, prime_budget: u64, seed: u64) -> Result<GaloisCertificate> {
    if !a.is_monic() {
        return Err(Error::invalid(format!("{} is not monic", a.pretty())));
    }
    let n = a.deg();
    if n < 2 {
        return Err(Error::invalid("degree must be at least 2"));
    }
    let mut cert = GaloisCertificate {
        poly: a.clone(),
        n,
        budget: prime_budget,
        seed,
        conclusion: Conclusion::NoCertificate,
        primes_scanned: 0,
        skipped_nonsquarefree: 0,
        irreducible_reductions: 0,
        transitive: None,
        primitive: None,
        alternating: None,
        symmetric: false,
        evidence: Vec::new(),
    };
    if a.coeff(0) == 0.into() {
        cert.conclusion = Conclusion::Reducible;
        return Ok(cert);
    }
    let mut st = State::default();
    let mut primes = Primes::new();
    const CHUNK: usize = 64;
    'scan: while cert.primes_scanned < prime_budget {
        let take = CHUNK.min((prime_budget - cert.primes_scanned) as usize);
        let chunk: Vec<u64> = primes.by_ref().take(take).collect();
        let types: Vec<Option<Vec<u32>>> = chunk
            .par_iter()
            .map(|&p| -> Result<Option<Vec<u32>>> {
                let f = a.reduce(p)?;
                if !f.gcd(&f.derivative()).is_one() {
                    return Ok(None);
                }
                let mut d = factor_seeded(&f, seed)?.degrees();
                d.sort_unstable();
                Ok(Some(d))
            })
            .collect::<Result<_>>()?;
        for (&p, ty) in chunk.iter().zip(types) {
            cert.primes_scanned += 1;
            match &ty {
                None => cert.skipped_nonsquarefree += 1,
                Some(parts) => {
                    if parts.len() == 1 {
                        cert.irreducible_reductions += 1;
                    }
                    st.observe(n, p, parts);
                }
            }
            cert.evidence.push(FrobeniusEvidence {
                prime: p,
                squarefree: ty.is_some(),
                cycle_type: ty.map(|t| Partition::new(t).unwrap()),
                conclusion_so_far: st.conclusion(),
            });
            if st.alternating.is_some() {
                break 'scan;
            }
        }
    }
    cert.conclusion = st.conclusion();
    cert.transitive = st.transitive;
    cert.primitive = st.primitive;
    cert.alternating = st.alternating;
    cert.symmetric = st.symmetric;
    Ok(cert)
}
