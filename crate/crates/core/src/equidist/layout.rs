//! Mixed-radix indexing of residue tuples (C_p mod D_p)_p.

use crate::fpoly::FpPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    pub primes: Vec<u64>,
    pub degs: Vec<usize>,
    /// Radix of each digit (the prime it belongs to).
    pub radix: Vec<u64>,
    pub place: Vec<usize>,
    /// First digit of each prime.
    pub offset: Vec<usize>,
    pub size: usize,
}

impl Layout {
    /// Layout for the given moduli degrees; `None` if the size overflows.
    pub fn new(primes: &[u64], degs: &[usize]) -> Option<Layout> {
        let mut radix = Vec::new();
        let mut place = Vec::new();
        let mut offset = Vec::new();
        let mut size: usize = 1;
        for (&p, &d) in primes.iter().zip(degs) {
            offset.push(radix.len());
            for _ in 0..d {
                radix.push(p);
                place.push(size);
                size = size.checked_mul(p as usize)?;
            }
        }
        Some(Layout {
            primes: primes.to_vec(),
            degs: degs.to_vec(),
            radix,
            place,
            offset,
            size,
        })
    }

    pub fn size_u128(primes: &[u64], degs: &[usize]) -> u128 {
        primes
            .iter()
            .zip(degs)
            .fold(1u128, |s, (&p, &d)| {
                s.saturating_mul((p as u128).saturating_pow(d as u32))
            })
    }

    pub fn digits(&self) -> usize {
        self.radix.len()
    }

    /// Index of a residue tuple given as per-prime coefficient lists.
    pub fn index_of(&self, residues: &[FpPoly]) -> usize {
        let mut idx = 0;
        for (i, r) in residues.iter().enumerate() {
            debug_assert!(r.coeffs().len() <= self.degs[i]);
            for (k, &c) in r.coeffs().iter().enumerate() {
                idx += c as usize * self.place[self.offset[i] + k];
            }
        }
        idx
    }

    pub fn index_of_digits(&self, digits: &[u64]) -> usize {
        digits.iter().zip(&self.place).map(|(&d, &p)| d as usize * p).sum()
    }

    pub fn digits_of(&self, mut idx: usize) -> Vec<u64> {
        self.radix
            .iter()
            .map(|&r| {
                let d = idx as u64 % r;
                idx /= r as usize;
                d
            })
            .collect()
    }

    /// The residue tuple at an index.
    pub fn residues_at(&self, idx: usize) -> Vec<FpPoly> {
        let d = self.digits_of(idx);
        self.primes
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let o = self.offset[i];
                FpPoly::new(p, d[o..o + self.degs[i]].to_vec()).unwrap()
            })
            .collect()
    }

    /// Calls `f(s, t)` for every index `s`, where `t` is the index of the
    /// digitwise sum of `s` and `w`. The lowest digit is a rotated contiguous
    /// run; the higher digits are walked as an odometer.
    pub fn for_each_shifted(&self, w: &[u64], mut f: impl FnMut(usize, usize)) {
        let k = self.radix.len();
        if k == 0 {
            f(0, 0);
            return;
        }
        let r0 = self.radix[0] as usize;
        let w0 = w[0] as usize;
        let mut cur = vec![0u64; k];
        let mut tg: Vec<u64> = w.to_vec();
        tg[0] = 0;
        let mut base = self.index_of_digits(&tg);
        for row in 0..self.size / r0 {
            let sb = row * r0;
            for d in 0..r0 - w0 {
                f(sb + d, base + d + w0);
            }
            for d in r0 - w0..r0 {
                f(sb + d, base + d + w0 - r0);
            }
            for i in 1..k {
                cur[i] += 1;
                let old = tg[i];
                tg[i] = if old + 1 == self.radix[i] { 0 } else { old + 1 };
                base = base + tg[i] as usize * self.place[i] - old as usize * self.place[i];
                if cur[i] < self.radix[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_walk_matches_direct_addition() {
        let l = Layout::new(&[2, 3], &[2, 1]).unwrap();
        assert_eq!(l.size, 12);
        let w = vec![1, 1, 2];
        let mut seen = vec![false; l.size];
        l.for_each_shifted(&w, |s, t| {
            let ds = l.digits_of(s);
            let sum: Vec<u64> = ds
                .iter()
                .zip(&w)
                .zip(&l.radix)
                .map(|((a, b), r)| (a + b) % r)
                .collect();
            assert_eq!(l.index_of_digits(&sum), t);
            seen[t] = true;
        });
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn empty_layout() {
        let l = Layout::new(&[5], &[0]).unwrap();
        assert_eq!(l.size, 1);
        let mut calls = 0;
        l.for_each_shifted(&[], |s, t| {
            assert_eq!((s, t), (0, 0));
            calls += 1;
        });
        assert_eq!(calls, 1);
    }
}
