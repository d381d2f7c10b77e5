//! The full Vietoris-Rips complex of a finite space, in filtration order.

use std::collections::HashMap;

use itertools::Itertools;
use thiserror::Error;

use crate::field::{PrimeField, SparseVec};
use crate::metric::FiniteMetricSpace;
use crate::scalar::Real;

/// Default cap on the total number of simplices (the full complex on 12 points).
pub const DEFAULT_SIZE_CAP: usize = 4095;

/// Environment variable overriding [`DEFAULT_SIZE_CAP`].
pub const SIZE_CAP_ENV: &str = "VERBOSE_PH_SIZE_CAP";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("complex would have {count} simplices, above the cap of {cap}")]
    SizeCapExceeded { count: usize, cap: usize },
    #[error("max_dim {max_dim} out of range for {n} points")]
    MaxDimOutOfRange { max_dim: usize, n: usize },
}

/// The simplex-count cap: [`SIZE_CAP_ENV`] if set and valid, else the default.
pub fn size_cap() -> usize {
    std::env::var(SIZE_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_SIZE_CAP)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex<T> {
    pub vertices: Vec<usize>,
    pub diameter: T,
}

impl<T> Simplex<T> {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Tie-breaking rule among simplices of equal diameter and dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Lexicographic on vertex tuples.
    #[default]
    Lex,
    /// Reverse lexicographic; used to cross-check that barcodes do not depend on the order.
    RevLex,
}

/// All simplices of dimension `≤ max_dim + 1` in the order (diameter, dimension, tie-break).
#[derive(Debug, Clone)]
pub struct FilteredComplex<T> {
    space: FiniteMetricSpace<T>,
    max_dim: usize,
    simplices: Vec<Simplex<T>>,
    index: HashMap<Vec<usize>, usize>,
}

/// Number of simplices of dimension at most `top` on `n` vertices.
pub fn simplex_count(n: usize, top: usize) -> usize {
    (0..=top.min(n.saturating_sub(1))).map(|d| binomial(n, d + 1)).sum()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl<T: Real> FilteredComplex<T> {
    /// Builds the complex needed for barcodes in degrees `0..=max_dim`.
    pub fn build(space: &FiniteMetricSpace<T>, max_dim: usize) -> Result<Self, ComplexError> {
        Self::build_with(space, max_dim, size_cap(), TieBreak::Lex)
    }

    pub fn build_with(
        space: &FiniteMetricSpace<T>,
        max_dim: usize,
        cap: usize,
        tie: TieBreak,
    ) -> Result<Self, ComplexError> {
        let n = space.len();
        if max_dim + 1 > n {
            return Err(ComplexError::MaxDimOutOfRange { max_dim, n });
        }
        let top = (max_dim + 1).min(n - 1);
        let count = simplex_count(n, top);
        if count > cap {
            return Err(ComplexError::SizeCapExceeded { count, cap });
        }
        let mut simplices = Vec::with_capacity(count);
        for d in 0..=top {
            for vertices in (0..n).combinations(d + 1) {
                let diameter = space.diameter_of(&vertices);
                simplices.push(Simplex { vertices, diameter });
            }
        }
        simplices.sort_by(|a, b| {
            a.diameter.cmp(&b.diameter).then(a.dim().cmp(&b.dim())).then_with(|| match tie {
                TieBreak::Lex => a.vertices.cmp(&b.vertices),
                TieBreak::RevLex => b.vertices.cmp(&a.vertices),
            })
        });
        let index = simplices.iter().enumerate().map(|(i, s)| (s.vertices.clone(), i)).collect();
        Ok(FilteredComplex { space: space.clone(), max_dim, simplices, index })
    }

    pub fn space(&self) -> &FiniteMetricSpace<T> {
        &self.space
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Highest simplex dimension present.
    pub fn top_dim(&self) -> usize {
        self.simplices.iter().map(Simplex::dim).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex<T>] {
        &self.simplices
    }

    pub fn simplex(&self, i: usize) -> &Simplex<T> {
        &self.simplices[i]
    }

    pub fn position(&self, vertices: &[usize]) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    /// Global indices of the simplices of dimension `d`, in filtration order.
    pub fn of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.simplices.len()).filter(|&i| self.simplices[i].dim() == d).collect()
    }

    /// Boundary of simplex `i` with alternating signs, rows sorted by global index.
    pub fn boundary(&self, i: usize, field: PrimeField) -> SparseVec {
        let s = &self.simplices[i];
        if s.dim() == 0 {
            return Vec::new();
        }
        let mut col: SparseVec = (0..s.vertices.len())
            .map(|drop| {
                let face: Vec<usize> =
                    s.vertices.iter().enumerate().filter(|&(j, _)| j != drop).map(|(_, &v)| v).collect();
                (self.index[&face], field.sign(drop))
            })
            .collect();
        col.sort_unstable();
        col
    }

    /// Filtration level `ℓ` of a chain: the largest diameter among its nonzero terms.
    pub fn level(&self, chain: &[(usize, u32)]) -> Option<T> {
        chain.iter().filter(|e| e.1 != 0).map(|&(i, _)| self.simplices[i].diameter).max()
    }
}
