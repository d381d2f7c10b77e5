//! Matching distance, bottleneck distance and the interleaving distance via barcodes.

use std::collections::VecDeque;

use serde_json::{json, Value};
use thiserror::Error;

use crate::barcode::{Barcode, Point};
use crate::metric::{FiniteMetricSpace, MetricError};
use crate::scalar::{ext_max, Extended, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("lists have different lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("list is not sorted in descending order")]
    NotSorted,
    #[error("padded multisets have different sizes {0} and {1}")]
    CardinalityMismatch(usize, usize),
    #[error("padding point ({0}, {1}) is not on the diagonal")]
    NotDiagonal(String, String),
}

/// `d∞` on the extended upper half-plane.
pub fn dinf<T: Real>(p: Point<T>, q: Point<T>) -> Extended<T> {
    let db = p.0.abs_diff(q.0);
    match (p.1, q.1) {
        (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(db.max(a.abs_diff(b))),
        (Extended::Infinite, Extended::Infinite) => Extended::Finite(db),
        _ => Extended::Infinite,
    }
}

/// `d∞` from a point to the diagonal: half its persistence.
pub fn dinf_to_diagonal<T: Real>(p: Point<T>) -> Extended<T> {
    match p.1 {
        Extended::Finite(d) => Extended::Finite(d.sub(p.0).half()),
        Extended::Infinite => Extended::Infinite,
    }
}

/// Outcome of a min-max matching.
///
/// Assignment entries are `(Some(i), Some(j))` for `A[i] ↔ B[j]`, `(Some(i), None)` when
/// `A[i]` goes to the diagonal and `(None, Some(j))` when `B[j]` does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingResult<T> {
    pub cost: Extended<T>,
    pub assignment: Option<Vec<(Option<usize>, Option<usize>)>>,
    /// Thresholds tried by the binary search, with their feasibility.
    pub threshold_trace: Vec<(T, bool)>,
}

impl<T: Real> MatchingResult<T> {
    fn infinite() -> Self {
        MatchingResult { cost: Extended::Infinite, assignment: None, threshold_trace: Vec::new() }
    }

    pub fn to_json(&self) -> Value {
        let assignment = self.assignment.as_ref().map(|a| {
            a.iter()
                .map(|&(i, j)| json!([i.map_or(Value::String("diag".into()), Value::from), j.map_or(Value::String("diag".into()), Value::from)]))
                .collect::<Vec<_>>()
        });
        json!({
            "cost": self.cost.to_json(),
            "assignment": assignment,
            "threshold_trace": self.threshold_trace.iter().map(|(t, ok)| json!([t.to_json(), ok])).collect::<Vec<_>>(),
            "mode": T::mode_name(),
            "slack": T::slack(),
        })
    }
}

/// Maximum bipartite matching by Hopcroft-Karp. `adj[u]` lists right vertices in
/// increasing order; returns `match_left`.
pub fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let n_left = adj.len();
    let mut match_l: Vec<Option<usize>> = vec![None; n_left];
    let mut match_r: Vec<Option<usize>> = vec![None; n_right];
    let mut dist = vec![usize::MAX; n_left];
    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u].is_none() {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_r[v] {
                    None => found = true,
                    Some(w) if dist[w] == usize::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            return match_l;
        }
        fn augment(
            u: usize,
            adj: &[Vec<usize>],
            dist: &mut [usize],
            match_l: &mut [Option<usize>],
            match_r: &mut [Option<usize>],
        ) -> bool {
            for &v in &adj[u] {
                let ok = match match_r[v] {
                    None => true,
                    Some(w) => dist[w] == dist[u] + 1 && augment(w, adj, dist, match_l, match_r),
                };
                if ok {
                    match_l[u] = Some(v);
                    match_r[v] = Some(u);
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }
        for u in 0..n_left {
            if match_l[u].is_none() {
                augment(u, adj, &mut dist, &mut match_l, &mut match_r);
            }
        }
    }
}

/// Smallest candidate threshold admitting a perfect matching, by binary search.
/// `edge(u, v)` gives the cost of an edge or `None` if absent.
fn bottleneck_assignment<T: Real>(
    n: usize,
    candidates: &mut Vec<T>,
    edge: impl Fn(usize, usize) -> Option<T>,
) -> (T, Vec<usize>, Vec<(T, bool)>) {
    candidates.sort();
    candidates.dedup();
    let costs: Vec<Vec<Option<T>>> = (0..n).map(|u| (0..n).map(|v| edge(u, v)).collect()).collect();
    let feasible = |t: T| -> Option<Vec<usize>> {
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|u| (0..n).filter(|&v| costs[u][v].is_some_and(|c| c.within(t))).collect())
            .collect();
        let m = hopcroft_karp(&adj, n);
        m.iter().copied().collect::<Option<Vec<usize>>>()
    };
    let mut trace = Vec::new();
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    let mut best: Option<(usize, Vec<usize>)> = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        let r = feasible(candidates[mid]);
        trace.push((candidates[mid], r.is_some()));
        if let Some(m) = r {
            best = Some((mid, m));
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let assignment = match best {
        Some((idx, m)) if idx == lo => m,
        _ => {
            let m = feasible(candidates[lo]).expect("largest candidate is always feasible");
            trace.push((candidates[lo], true));
            m
        }
    };
    (candidates[lo], assignment, trace)
}

fn split_infinite<T: Real>(points: &[Point<T>]) -> (Vec<usize>, Vec<usize>) {
    (0..points.len()).partition(|&i| !points[i].1.is_infinite())
}

/// Matches the infinite-death points by sorted births; returns the cost and index pairs.
fn match_infinite<T: Real>(a: &[Point<T>], ai: &[usize], b: &[Point<T>], bi: &[usize]) -> (T, Vec<(usize, usize)>) {
    let mut ai = ai.to_vec();
    let mut bi = bi.to_vec();
    ai.sort_by(|&x, &y| a[y].0.cmp(&a[x].0));
    bi.sort_by(|&x, &y| b[y].0.cmp(&b[x].0));
    let births_a: Vec<T> = ai.iter().map(|&i| a[i].0).collect();
    let births_b: Vec<T> = bi.iter().map(|&i| b[i].0).collect();
    let cost = sorted_matching(&births_a, &births_b).expect("equal lengths, sorted");
    (cost, ai.into_iter().zip(bi).collect())
}

/// Matching distance `d_M(A, B)`: min over bijections of the max `d∞`; `∞` if none is finite.
pub fn matching_distance<T: Real>(a: &[Point<T>], b: &[Point<T>]) -> MatchingResult<T> {
    if a.len() != b.len() {
        return MatchingResult::infinite();
    }
    let (af, ai) = split_infinite(a);
    let (bf, bi) = split_infinite(b);
    if ai.len() != bi.len() {
        return MatchingResult::infinite();
    }
    let (inf_cost, inf_pairs) = match_infinite(a, &ai, b, &bi);
    let n = af.len();
    let mut pairs: Vec<(Option<usize>, Option<usize>)> =
        inf_pairs.into_iter().map(|(i, j)| (Some(i), Some(j))).collect();
    let mut trace = Vec::new();
    let mut cost = inf_cost;
    if n > 0 {
        let d = |u: usize, v: usize| dinf(a[af[u]], b[bf[v]]).finite();
        let mut candidates: Vec<T> = (0..n).flat_map(|u| (0..n).filter_map(move |v| d(u, v))).collect();
        let (c, m, t) = bottleneck_assignment(n, &mut candidates, d);
        trace = t;
        cost = cost.max(c);
        pairs.extend(m.iter().enumerate().map(|(u, &v)| (Some(af[u]), Some(bf[v]))));
    }
    pairs.sort();
    MatchingResult { cost: Extended::Finite(cost), assignment: Some(pairs), threshold_trace: trace }
}

/// `max_i |a_i − b_i|` for two descending lists of equal length.
pub fn sorted_matching<T: Real>(a: &[T], b: &[T]) -> Result<T, MatchingError> {
    if a.len() != b.len() {
        return Err(MatchingError::LengthMismatch(a.len(), b.len()));
    }
    if a.windows(2).any(|w| w[0] < w[1]) || b.windows(2).any(|w| w[0] < w[1]) {
        return Err(MatchingError::NotSorted);
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| x.abs_diff(y)).max().unwrap_or_else(T::zero))
}

/// Bottleneck distance `d_B(A, B) = d_M(A ∪ Δ^∞, B ∪ Δ^∞)`.
pub fn bottleneck_distance<T: Real>(a: &[Point<T>], b: &[Point<T>]) -> MatchingResult<T> {
    let (af, ai) = split_infinite(a);
    let (bf, bi) = split_infinite(b);
    if ai.len() != bi.len() {
        return MatchingResult::infinite();
    }
    let (inf_cost, inf_pairs) = match_infinite(a, &ai, b, &bi);
    let mut pairs: Vec<(Option<usize>, Option<usize>)> =
        inf_pairs.into_iter().map(|(i, j)| (Some(i), Some(j))).collect();
    let (na, nb) = (af.len(), bf.len());
    let n = na + nb;
    let mut trace = Vec::new();
    let mut cost = inf_cost;
    if n > 0 {
        let half = |p: Point<T>| dinf_to_diagonal(p).finite().expect("finite point");
        // Left: A then diagonal copies of B. Right: B then diagonal copies of A.
        let edge = |u: usize, v: usize| -> Option<T> {
            match (u < na, v < nb) {
                (true, true) => dinf(a[af[u]], b[bf[v]]).finite(),
                (true, false) => (v - nb == u).then(|| half(a[af[u]])),
                (false, true) => (u - na == v).then(|| half(b[bf[v]])),
                (false, false) => Some(T::zero()),
            }
        };
        let mut candidates: Vec<T> = vec![T::zero()];
        candidates.extend(af.iter().map(|&i| half(a[i])));
        candidates.extend(bf.iter().map(|&j| half(b[j])));
        for &i in &af {
            for &j in &bf {
                candidates.extend(dinf(a[i], b[j]).finite());
            }
        }
        let (c, m, t) = bottleneck_assignment(n, &mut candidates, edge);
        trace = t;
        cost = cost.max(c);
        for (u, &v) in m.iter().enumerate() {
            match (u < na, v < nb) {
                (true, true) => pairs.push((Some(af[u]), Some(bf[v]))),
                (true, false) => pairs.push((Some(af[u]), None)),
                (false, true) => pairs.push((None, Some(bf[v]))),
                (false, false) => {}
            }
        }
    }
    pairs.sort();
    MatchingResult { cost: Extended::Finite(cost), assignment: Some(pairs), threshold_trace: trace }
}

/// Checks `d_B(A, B) ≤ d_M(A ⊔ A₁, B ⊔ B₁)` for diagonal paddings `A₁`, `B₁`.
pub fn db_le_dm_check<T: Real>(
    a: &[Point<T>],
    b: &[Point<T>],
    a1: &[Point<T>],
    b1: &[Point<T>],
) -> Result<bool, MatchingError> {
    for p in a1.iter().chain(b1) {
        if p.1 != Extended::Finite(p.0) {
            return Err(MatchingError::NotDiagonal(p.0.to_string(), p.1.to_string()));
        }
    }
    let pa: Vec<Point<T>> = a.iter().chain(a1).copied().collect();
    let pb: Vec<Point<T>> = b.iter().chain(b1).copied().collect();
    if pa.len() != pb.len() {
        return Err(MatchingError::CardinalityMismatch(pa.len(), pb.len()));
    }
    let db = bottleneck_distance(a, b).cost;
    let dm = matching_distance(&pa, &pb).cost;
    Ok(db.within(dm))
}

/// Interleaving distance of two filtered chain complexes, as the sup over degrees of the
/// matching distance between their verbose barcodes. Missing degrees count as empty.
pub fn interleaving_distance<T: Real>(x: &[Barcode<T>], y: &[Barcode<T>]) -> Extended<T> {
    let degrees = x.len().max(y.len());
    let mut sup = Extended::Finite(T::zero());
    for k in 0..degrees {
        let px = x.get(k).map_or(&[][..], Barcode::points);
        let py = y.get(k).map_or(&[][..], Barcode::points);
        sup = ext_max(sup, matching_distance(px, py).cost);
    }
    sup
}

/// Both sides of `|‖ℓ₁‖∞ − ‖ℓ₂‖∞| ≤ d_I ≤ ‖ℓ₁ − ℓ₂‖∞` for two metrics on one vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiBounds<T> {
    pub lower: T,
    pub di: Extended<T>,
    pub upper: T,
}

impl<T: Real> DiBounds<T> {
    pub fn holds(&self) -> bool {
        Extended::Finite(self.lower).within(self.di) && self.di.within(Extended::Finite(self.upper))
    }
}

pub fn di_bounds_check<T: Real>(
    d1: &FiniteMetricSpace<T>,
    d2: &FiniteMetricSpace<T>,
    x: &[Barcode<T>],
    y: &[Barcode<T>],
) -> Result<DiBounds<T>, MetricError> {
    let upper = d1.sup_distance(d2)?;
    Ok(DiBounds { lower: d1.diameter().abs_diff(d2.diameter()), di: interleaving_distance(x, y), upper })
}
