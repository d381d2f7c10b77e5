//! Exact Gromov-Hausdorff distance by correspondence search, and tripod enumeration.

use itertools::Itertools;
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, MetricError, Tripod};
use crate::scalar::Real;

/// Default cap on search nodes before giving up.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
}

/// Result of the exact correspondence search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhResult<T> {
    /// `d_GH(X, Y)`, half the optimal distortion.
    pub distance: T,
    /// Optimal distortion `2 d_GH(X, Y)`.
    pub distortion: T,
    /// An optimal correspondence as sorted `(x, y)` pairs.
    pub correspondence: Vec<(usize, usize)>,
    pub nodes: u64,
}

impl<T: Real> GhResult<T> {
    /// The correspondence viewed as a tripod with `Z = R`.
    pub fn tripod(&self, nx: usize, ny: usize) -> Tripod {
        Tripod::from_pairs(&self.correspondence, nx, ny).expect("a correspondence is surjective on both sides")
    }
}

struct Search<'a, T> {
    x: &'a FiniteMetricSpace<T>,
    y: &'a FiniteMetricSpace<T>,
    pairs: Vec<(usize, usize)>,
    best: T,
    best_pairs: Vec<(usize, usize)>,
    nodes: u64,
    budget: u64,
}

impl<T: Real> Search<'_, T> {
    /// Distortion increase from adding `(a, b)` to the current pairs.
    fn cost_with(&self, a: usize, b: usize, current: T) -> T {
        let mut worst = current;
        for &(p, q) in &self.pairs {
            worst = worst.max(self.x.dist(a, p).abs_diff(self.y.dist(b, q)));
        }
        worst
    }

    fn tick(&mut self) -> Result<(), SearchError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SearchError::BudgetExceeded { budget: self.budget });
        }
        Ok(())
    }

    /// Chooses `f(x)` for each `x`, then `g(y)` for every `y` outside the image of `f`.
    fn assign_x(&mut self, x: usize, current: T, hit: &mut Vec<bool>) -> Result<(), SearchError> {
        self.tick()?;
        if x == self.x.len() {
            let missing: Vec<usize> = (0..self.y.len()).filter(|&b| !hit[b]).collect();
            return self.assign_y(&missing, 0, current);
        }
        let mut options: Vec<(T, usize)> =
            (0..self.y.len()).map(|b| (self.cost_with(x, b, current), b)).collect();
        options.sort();
        for (cost, b) in options {
            if cost >= self.best {
                break;
            }
            let was_hit = hit[b];
            hit[b] = true;
            self.pairs.push((x, b));
            let r = self.assign_x(x + 1, cost, hit);
            self.pairs.pop();
            hit[b] = was_hit;
            r?;
        }
        Ok(())
    }

    fn assign_y(&mut self, missing: &[usize], idx: usize, current: T) -> Result<(), SearchError> {
        self.tick()?;
        if idx == missing.len() {
            if current < self.best {
                self.best = current;
                self.best_pairs = self.pairs.clone();
            }
            return Ok(());
        }
        let b = missing[idx];
        let mut options: Vec<(T, usize)> =
            (0..self.x.len()).map(|a| (self.cost_with(a, b, current), a)).collect();
        options.sort();
        for (cost, a) in options {
            if cost >= self.best {
                break;
            }
            self.pairs.push((a, b));
            let r = self.assign_y(missing, idx + 1, cost);
            self.pairs.pop();
            r?;
        }
        Ok(())
    }
}

/// Exact `d_GH(X, Y) = ½ min_R dis(R)` over correspondences, by branch and bound.
///
/// Every correspondence contains one of the form `graph(f) ∪ {(g(y), y)}` with no larger
/// distortion, so the search runs over pairs of maps `f: X -> Y`, `g: (Y \ im f) -> X`.
pub fn gromov_hausdorff_exact<T: Real>(
    x: &FiniteMetricSpace<T>,
    y: &FiniteMetricSpace<T>,
    budget: u64,
) -> Result<GhResult<T>, SearchError> {
    // Pairing every point with a fixed point of the other side has distortion at most
    // max(diam X, diam Y); start just above it so that some correspondence is recorded.
    let mut start = Vec::new();
    for a in 0..x.len() {
        start.push((a, 0));
    }
    for b in 1..y.len() {
        start.push((0, b));
    }
    let start_cost = pairs_distortion(x, y, &start);
    let mut search = Search {
        x,
        y,
        pairs: Vec::new(),
        best: start_cost,
        best_pairs: start,
        nodes: 0,
        budget,
    };
    let mut hit = vec![false; y.len()];
    search.assign_x(0, T::zero(), &mut hit)?;
    let mut correspondence = search.best_pairs;
    correspondence.sort();
    correspondence.dedup();
    Ok(GhResult {
        distance: search.best.half(),
        distortion: search.best,
        correspondence,
        nodes: search.nodes,
    })
}

/// Distortion of an arbitrary relation given as pairs.
pub fn pairs_distortion<T: Real>(
    x: &FiniteMetricSpace<T>,
    y: &FiniteMetricSpace<T>,
    pairs: &[(usize, usize)],
) -> T {
    let mut worst = T::zero();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for &(p, q) in &pairs[i + 1..] {
            worst = worst.max(x.dist(a, p).abs_diff(y.dist(b, q)));
        }
    }
    worst
}

/// All tripods between sets of sizes `nx` and `ny` with `|Z| ≤ max(nx, ny) + max_extra`,
/// one per relabeling class of `Z`.
///
/// A class is represented by its sorted pair sequence `(φ_X(z), φ_Y(z))`. Tripods come out
/// ordered by `|Z|`, then lexicographically by that sequence.
pub fn enumerate_tripods(nx: usize, ny: usize, max_extra: usize) -> impl Iterator<Item = Tripod> {
    let lo = nx.max(ny);
    let cells = nx * ny;
    (lo..=lo + max_extra).flat_map(move |z| {
        (0..cells).combinations_with_replacement(z).filter_map(move |seq| {
            let pairs: Vec<(usize, usize)> = seq.iter().map(|&c| (c / ny, c % ny)).collect();
            Tripod::from_pairs(&pairs, nx, ny).ok()
        })
    })
}

/// Builds a tripod whose fibers over `X` and `Y` have the given sizes, by the
/// north-west corner rule. Both compositions must sum to the same `|Z|`.
pub fn tripod_from_fibers(fx: &[usize], fy: &[usize]) -> Result<Tripod, MetricError> {
    let total_x: usize = fx.iter().sum();
    let total_y: usize = fy.iter().sum();
    if total_x != total_y {
        return Err(MetricError::DimensionMismatch { expected: total_x, found: total_y });
    }
    let mut rx = fx.to_vec();
    let mut ry = fy.to_vec();
    let (mut i, mut j) = (0, 0);
    let mut pairs = Vec::with_capacity(total_x);
    while i < rx.len() && j < ry.len() {
        let take = rx[i].min(ry[j]);
        pairs.extend(std::iter::repeat_n((i, j), take));
        rx[i] -= take;
        ry[j] -= take;
        if rx[i] == 0 {
            i += 1;
        }
        if ry[j] == 0 {
            j += 1;
        }
    }
    Tripod::from_pairs(&pairs, fx.len(), fy.len())
}
