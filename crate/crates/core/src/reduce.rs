//! Column reduction of the boundary matrix, keeping every pair.

use crate::complex::FilteredComplex;
use crate::field::{axpy, PrimeField, SparseVec};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReduceOptions {
    pub field: PrimeField,
    /// Process dimensions top-down and zero out columns known to be creators.
    pub clearing: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { field: PrimeField::default(), clearing: true }
    }
}

/// Result of reducing a filtered complex.
///
/// For every simplex a basis chain is kept: the reduced column `R_τ` for creators
/// killed by `τ`, the reduction record `V_τ` for destroyers, and `V_σ` (a cycle) for
/// creators that are never killed. These chains form a singular value decomposition
/// of each boundary map `C_{k+1} -> Ker ∂_k`.
#[derive(Debug, Clone)]
pub struct PersistencePairing<T> {
    field: PrimeField,
    max_dim: usize,
    levels: Vec<T>,
    dims: Vec<usize>,
    pairs: Vec<Vec<(usize, usize)>>,
    unpaired: Vec<Vec<usize>>,
    basis: Vec<SparseVec>,
}

impl<T: Real> PersistencePairing<T> {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// `(creator, destroyer)` pairs in degree `k`, creators of dimension `k`.
    pub fn pairs(&self, k: usize) -> &[(usize, usize)] {
        self.pairs.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn unpaired(&self, k: usize) -> &[usize] {
        self.unpaired.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn level(&self, simplex: usize) -> T {
        self.levels[simplex]
    }

    pub fn dim_of(&self, simplex: usize) -> usize {
        self.dims[simplex]
    }

    pub fn simplex_count(&self) -> usize {
        self.levels.len()
    }

    /// Basis chain attached to a simplex (see the type-level docs).
    pub fn basis_chain(&self, simplex: usize) -> &[(usize, u32)] {
        &self.basis[simplex]
    }

    /// Swaps the destroyers of two degree-`k` pairs. Only useful for exercising the
    /// decomposition oracle, which must then reject the pairing.
    pub fn swap_destroyers(&mut self, k: usize, a: usize, b: usize) {
        let da = self.pairs[k][a].1;
        self.pairs[k][a].1 = self.pairs[k][b].1;
        self.pairs[k][b].1 = da;
    }
}

/// Standard persistence reduction in filtration order.
pub fn reduce<T: Real>(complex: &FilteredComplex<T>, opts: ReduceOptions) -> PersistencePairing<T> {
    let field = opts.field;
    let len = complex.len();
    let dims: Vec<usize> = complex.simplices().iter().map(|s| s.dim()).collect();
    let top = complex.top_dim();
    let mut reduced: Vec<SparseVec> = vec![Vec::new(); len];
    let mut record: Vec<SparseVec> = vec![Vec::new(); len];
    let mut pivot_col: Vec<Option<usize>> = vec![None; len];
    let mut cleared = vec![false; len];

    let order: Vec<usize> = if opts.clearing { (1..=top).rev().collect() } else { (1..=top).collect() };
    for d in order {
        for j in (0..len).filter(|&j| dims[j] == d) {
            if cleared[j] {
                continue;
            }
            let mut r = complex.boundary(j, field);
            let mut v: SparseVec = vec![(j, 1)];
            while let Some(&(low, c)) = r.last() {
                let Some(k) = pivot_col[low] else { break };
                let ck = reduced[k].last().expect("pivot column is nonzero").1;
                let factor = field.neg(field.mul(c, field.inv(ck)));
                r = axpy(field, &r, factor, &reduced[k]);
                v = axpy(field, &v, factor, &record[k]);
            }
            if let Some(&(low, _)) = r.last() {
                pivot_col[low] = Some(j);
                if opts.clearing {
                    cleared[low] = true;
                }
            }
            reduced[j] = r;
            record[j] = v;
        }
    }

    let mut pairs = vec![Vec::new(); complex.max_dim() + 1];
    let mut unpaired = vec![Vec::new(); complex.max_dim() + 1];
    let mut basis: Vec<SparseVec> = vec![Vec::new(); len];
    for i in 0..len {
        if !reduced[i].is_empty() {
            basis[i] = record[i].clone();
            continue;
        }
        match pivot_col[i] {
            Some(j) => {
                basis[i] = reduced[j].clone();
                if dims[i] <= complex.max_dim() {
                    pairs[dims[i]].push((i, j));
                }
            }
            None => {
                basis[i] = if dims[i] == 0 { vec![(i, 1)] } else { record[i].clone() };
                if dims[i] <= complex.max_dim() {
                    unpaired[dims[i]].push(i);
                }
            }
        }
    }
    PersistencePairing {
        field,
        max_dim: complex.max_dim(),
        levels: complex.simplices().iter().map(|s| s.diameter).collect(),
        dims,
        pairs,
        unpaired,
        basis,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;
    use crate::scalar::Exact;

    #[test]
    fn single_point() {
        let s = FiniteMetricSpace::<Exact>::one_point();
        let c = FilteredComplex::build(&s, 0).unwrap();
        let p = reduce(&c, ReduceOptions::default());
        assert!(p.pairs(0).is_empty());
        assert_eq!(p.unpaired(0), &[0]);
    }

    #[test]
    fn two_points_pair_second_vertex_with_edge() {
        let s = FiniteMetricSpace::equilateral(2, Exact::from_int(1)).unwrap();
        let c = FilteredComplex::build(&s, 1).unwrap();
        let p = reduce(&c, ReduceOptions::default());
        assert_eq!(p.pairs(0), &[(1, 2)]);
        assert_eq!(p.unpaired(0), &[0]);
    }

    #[test]
    fn clearing_does_not_change_pairs() {
        let s = FiniteMetricSpace::equilateral(5, Exact::from_int(1)).unwrap();
        let c = FilteredComplex::build(&s, 4).unwrap();
        for p in [2, 3, 5] {
            let field = PrimeField::new(p).unwrap();
            let a = reduce(&c, ReduceOptions { field, clearing: true });
            let b = reduce(&c, ReduceOptions { field, clearing: false });
            for k in 0..=4 {
                assert_eq!(a.pairs(k), b.pairs(k));
                assert_eq!(a.unpaired(k), b.unpaired(k));
            }
        }
    }
}
