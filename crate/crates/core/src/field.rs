//! Arithmetic in the prime field F_p.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("field characteristic {0} is not a prime below 2^16")]
pub struct NotPrime(pub u32);

/// The prime field of characteristic `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: 2 }
    }
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, NotPrime> {
        let prime = (2..(1 << 16)).contains(&p) && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
        if prime {
            Ok(PrimeField { p })
        } else {
            Err(NotPrime(p))
        }
    }

    pub fn characteristic(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        (self.p - a) % self.p
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        a * b % self.p
    }

    /// Multiplicative inverse by Fermat's little theorem; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.p));
        let mut result = 1;
        let mut base = a % self.p;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// `(-1)^i` as a field element.
    pub fn sign(self, i: usize) -> u32 {
        if i.is_multiple_of(2) {
            1
        } else {
            self.neg(1)
        }
    }
}

/// Sparse vector: entries `(index, coefficient)` sorted by index, coefficients nonzero.
pub type SparseVec = Vec<(usize, u32)>;

/// `a + c·b` for sparse vectors.
pub fn axpy(field: PrimeField, a: &[(usize, u32)], c: u32, b: &[(usize, u32)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = field.mul(c, b[j].1);
            if v != 0 {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = field.add(a[i].1, field.mul(c, b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Rank of a dense matrix over `field` by Gaussian elimination.
pub fn dense_rank(field: PrimeField, mut rows: Vec<Vec<u32>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = field.inv(rows[rank][col]);
        for c in 0..width {
            rows[rank][c] = field.mul(rows[rank][c], inv);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in 0..width {
                    let sub = field.mul(factor, rows[rank][c]);
                    rows[r][c] = field.sub(rows[r][c], sub);
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(7).is_ok());
        assert_eq!(PrimeField::new(9), Err(NotPrime(9)));
        assert_eq!(PrimeField::new(1), Err(NotPrime(1)));
    }

    #[test]
    fn inverses() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn axpy_cancels() {
        let f = PrimeField::new(3).unwrap();
        let a = vec![(0, 1), (2, 2)];
        let b = vec![(0, 1), (1, 1), (2, 1)];
        assert_eq!(axpy(f, &a, 2, &b), vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn rank_of_small_matrices() {
        let f = PrimeField::default();
        assert_eq!(dense_rank(f, vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]), 2);
        let g = PrimeField::new(3).unwrap();
        assert_eq!(dense_rank(g, vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]), 3);
    }
}
