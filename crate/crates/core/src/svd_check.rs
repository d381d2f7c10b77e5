//! Exhaustive oracle for the decomposition produced by [`crate::reduce`].
//!
//! For each degree `k` the pairing supplies bases `(y_i)` of `C_{k+1}` and `(x_i)` of
//! `Ker ∂_k`. The oracle checks, independently of the reduction, that both are
//! orthogonal bases (by evaluating `ℓ` on every nonzero coefficient combination), that
//! the trailing `y`s span the kernel of `∂_{k+1}`, that the leading `x`s span its image,
//! and that `∂ y_i = x_i`.

use thiserror::Error;

use crate::complex::FilteredComplex;
use crate::field::{dense_rank, PrimeField, SparseVec};
use crate::reduce::PersistencePairing;
use crate::scalar::Real;

/// Default cap on the number of basis vectors checked exhaustively (over F_2).
pub const DEFAULT_ORACLE_CAP: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("degree {degree}: {count} basis vectors exceed the oracle cap of {cap}")]
    OracleCapExceeded { degree: usize, count: usize, cap: usize },
}

/// A failed requirement, named after the decomposition property it breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub degree: usize,
    pub bullet: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SvdReport {
    pub degrees_checked: usize,
    pub violations: Vec<Violation>,
}

impl SvdReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the pairing's bases for every degree `0..=max_dim`.
pub fn check_svd<T: Real>(
    complex: &FilteredComplex<T>,
    pairing: &PersistencePairing<T>,
    cap: usize,
) -> Result<SvdReport, OracleError> {
    let field = pairing.field();
    // Combinations grow like p^count; keep the work comparable to 2^cap.
    let p = field.characteristic() as f64;
    let cap = ((cap as f64) * 2f64.ln() / p.ln()).floor() as usize;
    let mut report = SvdReport::default();
    for k in 0..=complex.max_dim() {
        check_degree(complex, pairing, field, k, cap, &mut report)?;
        report.degrees_checked += 1;
    }
    Ok(report)
}

fn dense(chain: &[(usize, u32)], rows: &[usize]) -> Vec<u32> {
    rows.iter().map(|r| chain.iter().find(|e| e.0 == *r).map_or(0, |e| e.1)).collect()
}

fn apply_boundary<T: Real>(complex: &FilteredComplex<T>, field: PrimeField, chain: &[(usize, u32)]) -> SparseVec {
    let mut acc: SparseVec = Vec::new();
    for &(s, c) in chain {
        acc = crate::field::axpy(field, &acc, c, &complex.boundary(s, field));
    }
    acc
}

/// Describes the first nonzero combination whose level differs from the max of its terms' levels.
fn orthogonality_failure<T: Real>(
    complex: &FilteredComplex<T>,
    field: PrimeField,
    vectors: &[Vec<u32>],
    rows: &[usize],
) -> Option<String> {
    let p = field.characteristic();
    let levels: Vec<Option<T>> = vectors
        .iter()
        .map(|v| rows.iter().zip(v).filter(|e| *e.1 != 0).map(|(&r, _)| complex.simplex(r).diameter).max())
        .collect();
    let mut coeffs = vec![0u32; vectors.len()];
    let mut acc = vec![0u32; rows.len()];
    loop {
        // Odometer step: each digit change adds its vector once (p additions wrap to zero).
        let mut pos = 0;
        loop {
            if pos == vectors.len() {
                return None;
            }
            for (a, &v) in acc.iter_mut().zip(&vectors[pos]) {
                *a = field.add(*a, v);
            }
            coeffs[pos] = (coeffs[pos] + 1) % p;
            if coeffs[pos] != 0 {
                break;
            }
            pos += 1;
        }
        let level = rows.iter().zip(&acc).filter(|e| *e.1 != 0).map(|(&r, _)| complex.simplex(r).diameter).max();
        let expected = coeffs.iter().zip(&levels).filter(|e| *e.0 != 0).filter_map(|e| *e.1).max();
        if level != expected {
            return Some(format!(
                "coefficients {coeffs:?}: level {} but terms reach {}",
                level.map_or("none".to_string(), |l| l.to_string()),
                expected.map_or("none".to_string(), |l| l.to_string()),
            ));
        }
    }
}

fn check_degree<T: Real>(
    complex: &FilteredComplex<T>,
    pairing: &PersistencePairing<T>,
    field: PrimeField,
    k: usize,
    cap: usize,
    report: &mut SvdReport,
) -> Result<(), OracleError> {
    let mut fail = |bullet: &'static str, detail: String| {
        report.violations.push(Violation { degree: k, bullet, detail });
    };
    let rows_k = complex.of_dim(k);
    let rows_k1 = complex.of_dim(k + 1);

    // Ranks of the boundary maps, from dense elimination.
    let rank_of = |d: usize, rows: &[usize]| -> usize {
        let cols = complex.of_dim(d);
        if cols.is_empty() || rows.is_empty() {
            return 0;
        }
        let matrix: Vec<Vec<u32>> = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| dense(&complex.boundary(c, field), &[r])[0]).collect())
            .collect();
        dense_rank(field, matrix)
    };
    let rank_k = if k == 0 { 0 } else { rank_of(k, &complex.of_dim(k - 1)) };
    let rank_k1 = rank_of(k + 1, &rows_k);
    let dim_ker_k = rows_k.len() - rank_k;
    let dim_ker_k1 = rows_k1.len() - rank_k1;

    let pairs = pairing.pairs(k);
    let unpaired = pairing.unpaired(k);
    // Leading y_i / x_i from the pairs, trailing y from creators of dim k+1, trailing x from unpaired creators.
    let y_head: Vec<SparseVec> = pairs.iter().map(|&(_, d)| pairing.basis_chain(d).to_vec()).collect();
    let x_head: Vec<SparseVec> = pairs.iter().map(|&(c, _)| pairing.basis_chain(c).to_vec()).collect();
    let creators_k1: Vec<usize> = rows_k1
        .iter()
        .copied()
        .filter(|&s| !pairs.iter().any(|&(_, d)| d == s))
        .collect();
    let y_tail: Vec<SparseVec> = creators_k1.iter().map(|&s| pairing.basis_chain(s).to_vec()).collect();
    let x_tail: Vec<SparseVec> = unpaired.iter().map(|&s| pairing.basis_chain(s).to_vec()).collect();

    if y_head.len() + y_tail.len() > cap || x_head.len() + x_tail.len() > cap {
        return Err(OracleError::OracleCapExceeded {
            degree: k,
            count: (y_head.len() + y_tail.len()).max(x_head.len() + x_tail.len()),
            cap,
        });
    }

    // Levels reported by the barcode must be the levels of the basis chains.
    for (i, &(c, d)) in pairs.iter().enumerate() {
        if complex.level(&x_head[i]) != Some(pairing.level(c)) || complex.level(&y_head[i]) != Some(pairing.level(d)) {
            fail("barcode levels", format!("pair {i}: ℓ(x), ℓ(y) differ from the reported birth and death"));
        }
    }
    for (i, &c) in unpaired.iter().enumerate() {
        if complex.level(&x_tail[i]) != Some(pairing.level(c)) {
            fail("barcode levels", format!("unpaired {i}: ℓ(x) differs from the reported birth"));
        }
    }

    // A y_i = x_i for i <= r, and r = rank.
    if y_head.len() != rank_k1 {
        fail("A y_i = x_i", format!("{} pairs but rank ∂_{} = {rank_k1}", y_head.len(), k + 1));
    }
    for (i, (y, x)) in y_head.iter().zip(&x_head).enumerate() {
        if &apply_boundary(complex, field, y) != x {
            fail("A y_i = x_i", format!("pair {i}: ∂y differs from x"));
        }
    }

    // (y_{r+1}, ..., y_n) is a basis of Ker ∂_{k+1}.
    if y_tail.len() != dim_ker_k1 {
        fail("kernel basis", format!("{} kernel vectors but dim Ker ∂_{} = {dim_ker_k1}", y_tail.len(), k + 1));
    }
    for (i, y) in y_tail.iter().enumerate() {
        if !apply_boundary(complex, field, y).is_empty() {
            fail("kernel basis", format!("y_{} is not a cycle", y_head.len() + i + 1));
        }
    }

    // (x_1, ..., x_m) is a basis of Ker ∂_k, the first r spanning the image.
    if x_head.len() + x_tail.len() != dim_ker_k {
        fail(
            "image basis",
            format!("{} vectors but dim Ker ∂_{k} = {dim_ker_k}", x_head.len() + x_tail.len()),
        );
    }
    for (i, x) in x_head.iter().chain(&x_tail).enumerate() {
        if !apply_boundary(complex, field, x).is_empty() {
            fail("image basis", format!("x_{} is not a cycle", i + 1));
        }
    }

    // Both families are orthogonal ordered bases.
    let ys: Vec<Vec<u32>> = y_head.iter().chain(&y_tail).map(|c| dense(c, &rows_k1)).collect();
    let xs: Vec<Vec<u32>> = x_head.iter().chain(&x_tail).map(|c| dense(c, &rows_k)).collect();
    if !ys.is_empty() && dense_rank(field, ys.clone()) != ys.len() {
        fail("orthogonal basis of C_{k+1}", "y vectors are linearly dependent".into());
    }
    if ys.len() != rows_k1.len() {
        fail("orthogonal basis of C_{k+1}", format!("{} vectors for dimension {}", ys.len(), rows_k1.len()));
    }
    if !xs.is_empty() && dense_rank(field, xs.clone()) != xs.len() {
        fail("orthogonal basis of Ker ∂_k", "x vectors are linearly dependent".into());
    }
    if let Some(detail) = orthogonality_failure(complex, field, &ys, &rows_k1) {
        fail("orthogonal basis of C_{k+1}", detail);
    }
    if let Some(detail) = orthogonality_failure(complex, field, &xs, &rows_k) {
        fail("orthogonal basis of Ker ∂_k", detail);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;
    use crate::reduce::{reduce, ReduceOptions};
    use crate::scalar::Exact;

    fn x4() -> FiniteMetricSpace<Exact> {
        let rows = [[0, 1, 1, 2], [1, 0, 1, 2], [1, 1, 0, 2], [2, 2, 2, 0]];
        FiniteMetricSpace::new(rows.iter().map(|r| r.iter().map(|&v| Exact::from_int(v)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn two_points_pass() {
        let s = FiniteMetricSpace::equilateral(2, Exact::from_int(1)).unwrap();
        let c = FilteredComplex::build(&s, 1).unwrap();
        let p = reduce(&c, ReduceOptions::default());
        assert!(check_svd(&c, &p, DEFAULT_ORACLE_CAP).unwrap().passed());
    }

    #[test]
    fn four_points_pass_over_several_fields() {
        let c = FilteredComplex::build(&x4(), 3).unwrap();
        for (p, clearing) in [(2, true), (2, false), (3, true), (5, false)] {
            let field = PrimeField::new(p).unwrap();
            let pairing = reduce(&c, ReduceOptions { field, clearing });
            let report = check_svd(&c, &pairing, DEFAULT_ORACLE_CAP).unwrap();
            assert!(report.passed(), "p={p}: {:?}", report.violations);
        }
    }

    #[test]
    fn swapped_destroyers_fail() {
        let c = FilteredComplex::build(&x4(), 3).unwrap();
        let mut pairing = reduce(&c, ReduceOptions::default());
        let pairs = pairing.pairs(0).to_vec();
        let (a, b) = (0..pairs.len())
            .flat_map(|a| (0..pairs.len()).map(move |b| (a, b)))
            .find(|&(a, b)| pairing.level(pairs[a].1) != pairing.level(pairs[b].1))
            .unwrap();
        pairing.swap_destroyers(0, a, b);
        let report = check_svd(&c, &pairing, DEFAULT_ORACLE_CAP).unwrap();
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| v.bullet == "A y_i = x_i"));
    }

    #[test]
    fn cap_is_reported() {
        let s = FiniteMetricSpace::equilateral(7, Exact::from_int(1)).unwrap();
        let c = FilteredComplex::build(&s, 6).unwrap();
        let p = reduce(&c, ReduceOptions::default());
        assert!(matches!(check_svd(&c, &p, DEFAULT_ORACLE_CAP), Err(OracleError::OracleCapExceeded { .. })));
    }
}
