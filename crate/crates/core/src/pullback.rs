//! Pullback barcodes and the pullback bottleneck / interleaving distances.

use std::collections::HashMap;

use itertools::Itertools;
use serde_json::{json, Value};
use thiserror::Error;

use crate::barcode::{vr_barcode, Barcode, Point};
use crate::complex::ComplexError;
use crate::gh::{gromov_hausdorff_exact, tripod_from_fibers, GhResult, SearchError};
use crate::matching::{bottleneck_distance, dinf, matching_distance};
use crate::metric::{pullback_metric, FiniteMetricSpace, MetricError, Surjection, Tripod};
use crate::reduce::ReduceOptions;
use crate::scalar::{ext_max, Extended, Real};

/// Default degree cap for tripod search.
pub const DEFAULT_DEGREE_CAP: usize = 3;
/// Default cap on `|Z|` during tripod search.
pub const DEFAULT_Z_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PullbackError {
    #[error("repeat index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("input is not sorted")]
    NotSorted,
    #[error("barcode has degree {found}, expected {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("multiplicity list has {found} entries for {expected} points")]
    LengthMismatch { expected: usize, found: usize },
    #[error("tripod search needs |Z| = {z}, above the cap of {cap}")]
    ZSizeCap { z: usize, cap: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// `Z = X ⊔ {x_{j_1}, ..., x_{j_m}}` with `j_1 ≤ ... ≤ j_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackSpec<T> {
    base: FiniteMetricSpace<T>,
    repeats: Vec<usize>,
}

impl<T: Real> PullbackSpec<T> {
    pub fn new(base: FiniteMetricSpace<T>, repeats: Vec<usize>) -> Result<Self, PullbackError> {
        if let Some(&index) = repeats.iter().find(|&&j| j >= base.len()) {
            return Err(PullbackError::IndexOutOfRange { index, n: base.len() });
        }
        if repeats.windows(2).any(|w| w[0] > w[1]) {
            return Err(PullbackError::NotSorted);
        }
        Ok(PullbackSpec { base, repeats })
    }

    /// Point `p` is repeated `extra[p]` extra times.
    pub fn from_multiplicities(base: FiniteMetricSpace<T>, extra: &[usize]) -> Result<Self, PullbackError> {
        if extra.len() != base.len() {
            return Err(PullbackError::LengthMismatch { expected: base.len(), found: extra.len() });
        }
        let repeats = extra.iter().enumerate().flat_map(|(p, &m)| std::iter::repeat_n(p, m)).collect();
        PullbackSpec::new(base, repeats)
    }

    pub fn base(&self) -> &FiniteMetricSpace<T> {
        &self.base
    }

    pub fn repeats(&self) -> &[usize] {
        &self.repeats
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.base.len()];
        for &j in &self.repeats {
            m[j] += 1;
        }
        m
    }

    /// The surjection `Z -> X`: identity on `X`, then each repeat onto its parent.
    pub fn surjection(&self) -> Surjection {
        let map = (0..self.base.len()).chain(self.repeats.iter().copied()).collect();
        Surjection::new(map, self.base.len()).expect("identity part makes it surjective")
    }

    /// The pullback pseudo-metric space `Z`.
    pub fn space(&self) -> FiniteMetricSpace<T> {
        pullback_metric(&self.base, &self.surjection()).expect("surjection onto the base")
    }
}

fn check_degree<T: Real>(barcode: &Barcode<T>, k: usize) -> Result<(), PullbackError> {
    if barcode.degree() != k {
        return Err(PullbackError::DegreeMismatch { expected: k, found: barcode.degree() });
    }
    Ok(())
}

/// Diagonal points added to the degree-`k` barcode by the repeats of `spec`.
///
/// For the `i`-th repeat `x_{j_{i+1}}`, every size-`k` selection `β` (by position) from
/// `(X \ {x_{j_{i+1}}}) ⊔ {x_{j_1}, ..., x_{j_i}}` adds `(t, t)` with `t = diam([x_{j_{i+1}}, β])`.
pub fn added_diagonal<T: Real>(spec: &PullbackSpec<T>, k: usize) -> Vec<T> {
    let x = &spec.base;
    let mut out = Vec::new();
    for (i, &head) in spec.repeats.iter().enumerate() {
        let pool: Vec<usize> =
            (0..x.len()).filter(|&p| p != head).chain(spec.repeats[..i].iter().copied()).collect();
        for beta in pool.iter().copied().combinations(k) {
            let mut pts = beta;
            pts.push(head);
            out.push(x.diameter_of(&pts));
        }
    }
    out
}

/// Closed-form degree-`k` verbose barcode of `Z` from that of `X`.
pub fn pullback_barcode_closed_form<T: Real>(
    spec: &PullbackSpec<T>,
    x_barcode: &Barcode<T>,
    k: usize,
) -> Result<Barcode<T>, PullbackError> {
    check_degree(x_barcode, k)?;
    Ok(x_barcode.union(added_diagonal(spec, k).into_iter().map(|t| (t, Extended::Finite(t)))))
}

/// Degree-`k` verbose barcode of `Z` by building and reducing its complex.
pub fn pullback_barcode_direct<T: Real>(
    spec: &PullbackSpec<T>,
    k: usize,
    opts: ReduceOptions,
) -> Result<Barcode<T>, PullbackError> {
    Ok(vr_barcode(&spec.space(), k, opts)?)
}

/// Degree-1 formula: add `d(x_p, x_q)·(1,1)` with multiplicity `m_p m_q + m_p + m_q` for
/// `p < q`, and `(0,0)` with multiplicity `Σ C(m_p, 2)`.
pub fn pullback_barcode_deg1<T: Real>(
    x: &FiniteMetricSpace<T>,
    x_barcode: &Barcode<T>,
    multiplicities: &[usize],
) -> Result<Barcode<T>, PullbackError> {
    check_degree(x_barcode, 1)?;
    if multiplicities.len() != x.len() {
        return Err(PullbackError::LengthMismatch { expected: x.len(), found: multiplicities.len() });
    }
    let m = multiplicities;
    let mut extra: Vec<Point<T>> = Vec::new();
    for p in 0..x.len() {
        for q in p + 1..x.len() {
            let t = x.dist(p, q);
            let count = m[p] * m[q] + m[p] + m[q];
            extra.extend(std::iter::repeat_n((t, Extended::Finite(t)), count));
        }
    }
    let zeros: usize = m.iter().map(|&mp| mp * mp.saturating_sub(1) / 2).sum();
    extra.extend(std::iter::repeat_n((T::zero(), Extended::Finite(T::zero())), zeros));
    Ok(x_barcode.union(extra))
}

/// Exact degree-0 pullback bottleneck distance from finite deaths sorted descending:
/// `max(max_{i<n-1} |a_i − b_i|, max_{i≥n-1} b_i)` with the shorter list as `a`.
pub fn hatdb_degree0<T: Real>(a: &[T], b: &[T]) -> Result<T, PullbackError> {
    if a.windows(2).any(|w| w[0] < w[1]) || b.windows(2).any(|w| w[0] < w[1]) {
        return Err(PullbackError::NotSorted);
    }
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let head = a.iter().zip(b).map(|(&x, &y)| x.abs_diff(y)).max().unwrap_or_else(T::zero);
    let tail = b[a.len()..].iter().copied().max().unwrap_or_else(T::zero);
    Ok(head.max(tail))
}

/// Degree-0 pullback bottleneck distance of two spaces.
pub fn hatdb0_spaces<T: Real>(x: &FiniteMetricSpace<T>, y: &FiniteMetricSpace<T>) -> Result<T, PullbackError> {
    let bx = vr_barcode(x, 0, ReduceOptions::default())?;
    let by = vr_barcode(y, 0, ReduceOptions::default())?;
    hatdb_degree0(&bx.finite_deaths_desc(), &by.finite_deaths_desc())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Tripods up to `|Z| = max(n, n') + max_extra`.
    pub max_extra: usize,
    pub z_cap: usize,
    pub degree_cap: usize,
    /// Compute pullback barcodes by reduction instead of the closed form.
    pub direct: bool,
    pub reduce: ReduceOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_extra: 1,
            z_cap: DEFAULT_Z_CAP,
            degree_cap: DEFAULT_DEGREE_CAP,
            direct: false,
            reduce: ReduceOptions::default(),
        }
    }
}

/// All compositions of `total` into `parts` positive parts, in lexicographic order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 || total < parts {
        return Vec::new();
    }
    // Choose parts-1 cut points among total-1 gaps.
    (1..total)
        .combinations(parts - 1)
        .map(|cuts| {
            let mut prev = 0;
            let mut out: Vec<usize> = cuts
                .iter()
                .map(|&c| {
                    let part = c - prev;
                    prev = c;
                    part
                })
                .collect();
            out.push(total - prev);
            out
        })
        .sorted()
        .collect()
}

/// Pullback barcodes of one space, memoized by fiber sizes.
struct Side<'a, T> {
    space: &'a FiniteMetricSpace<T>,
    base: Vec<Barcode<T>>,
    cache: HashMap<(Vec<usize>, usize), Barcode<T>>,
    opts: SearchOptions,
}

impl<'a, T: Real> Side<'a, T> {
    fn new(space: &'a FiniteMetricSpace<T>, degrees: usize, opts: SearchOptions) -> Result<Self, PullbackError> {
        let base = (0..=degrees).map(|k| vr_barcode(space, k, opts.reduce)).collect::<Result<Vec<_>, _>>()?;
        Ok(Side { space, base, cache: HashMap::new(), opts })
    }

    fn barcode(&mut self, fibers: &[usize], k: usize) -> Result<Barcode<T>, PullbackError> {
        let key = (fibers.to_vec(), k);
        if let Some(b) = self.cache.get(&key) {
            return Ok(b.clone());
        }
        let extra: Vec<usize> = fibers.iter().map(|f| f - 1).collect();
        let spec = PullbackSpec::from_multiplicities(self.space.clone(), &extra)?;
        let b = if self.opts.direct {
            pullback_barcode_direct(&spec, k, self.opts.reduce)?
        } else {
            pullback_barcode_closed_form(&spec, &self.base[k], k)?
        };
        self.cache.insert(key, b.clone());
        Ok(b)
    }
}

fn z_range<T: Real>(
    x: &FiniteMetricSpace<T>,
    y: &FiniteMetricSpace<T>,
    opts: &SearchOptions,
) -> Result<std::ops::RangeInclusive<usize>, PullbackError> {
    let lo = x.len().max(y.len());
    if lo > opts.z_cap {
        return Err(PullbackError::ZSizeCap { z: lo, cap: opts.z_cap });
    }
    Ok(lo..=(lo + opts.max_extra).min(opts.z_cap))
}

/// Diameters of all subsets of at most `size` points.
fn subset_diameters<T: Real>(space: &FiniteMetricSpace<T>, size: usize) -> Vec<T> {
    let mut out: Vec<T> = (1..=size.min(space.len()))
        .flat_map(|s| (0..space.len()).combinations(s).map(|c| space.diameter_of(&c)).collect::<Vec<_>>())
        .collect();
    out.sort();
    out.dedup();
    out
}

fn one_sided_bound<T: Real>(from: &Barcode<T>, to: &Barcode<T>, diag: &[T]) -> Extended<T> {
    let mut worst = Extended::Finite(T::zero());
    for &p in from.points() {
        let to_bars = to.points().iter().map(|&q| dinf(p, q));
        let to_diag = diag.iter().map(|&t| dinf(p, (t, Extended::Finite(t))));
        let best = to_bars.chain(to_diag).min().unwrap_or(Extended::Infinite);
        worst = ext_max(worst, best);
    }
    worst
}

/// Lower bound on the degree-`k` pullback bottleneck distance.
///
/// Every pullback barcode of `Y` is `B_k(Y)` plus diagonal points `(t, t)` where `t` is the
/// diameter of some subset of at most `k + 1` points, so each point of `B_k(X)` must travel
/// at least as far as the nearest such candidate, and symmetrically.
pub fn hatdb_lower_bound<T: Real>(
    x: &FiniteMetricSpace<T>,
    bx: &Barcode<T>,
    y: &FiniteMetricSpace<T>,
    by: &Barcode<T>,
    k: usize,
) -> Extended<T> {
    let dx = subset_diameters(x, k + 1);
    let dy = subset_diameters(y, k + 1);
    ext_max(one_sided_bound(bx, by, &dy), one_sided_bound(by, bx, &dx))
}

/// Result of a pullback bottleneck search in one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HatdbReport<T> {
    pub degree: usize,
    /// Smallest matching distance found over the searched tripods.
    pub bound: Extended<T>,
    pub witness: Option<Tripod>,
    /// Largest `|Z|` searched.
    pub z_max: usize,
    pub tripods_evaluated: usize,
    /// `max(d_B of concise barcodes, candidate-point bound)`.
    pub lower_bound: Extended<T>,
    pub db_concise: Extended<T>,
    /// The bound equals the lower bound, so it is the exact value.
    pub certified: bool,
    /// Computed from the exact degree-0 formula rather than by search.
    pub formula: bool,
}

impl<T: Real> HatdbReport<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "bound": self.bound.to_json(),
            "certified": self.certified,
            "lower_bound": self.lower_bound.to_json(),
            "db_concise": self.db_concise.to_json(),
            "z_max": self.z_max,
            "tripods_evaluated": self.tripods_evaluated,
            "formula": self.formula,
            "witness": self.witness.as_ref().map(Tripod::to_file_string),
            "mode": T::mode_name(),
        })
    }
}

fn lower_bounds<T: Real>(
    x: &FiniteMetricSpace<T>,
    y: &FiniteMetricSpace<T>,
    k: usize,
    opts: ReduceOptions,
) -> Result<(Extended<T>, Extended<T>), PullbackError> {
    let bx = vr_barcode(x, k, opts)?;
    let by = vr_barcode(y, k, opts)?;
    let db = bottleneck_distance(bx.concise().points(), by.concise().points()).cost;
    let lb = hatdb_lower_bound(x, &bx, y, &by, k);
    Ok((ext_max(db, lb), db))
}

/// Minimum over tripods of the degree-`k` matching distance between pullback barcodes.
///
/// Tripods are searched by their fiber sizes, which determine both pullback barcodes; each
/// pair of compositions is realised by a north-west-corner tripod. Always searches, even
/// in degree 0.
pub fn hatdb_search<T: Real>(
    x: &FiniteMetricSpace<T>,
    y: &FiniteMetricSpace<T>,
    k: usize,
    opts: SearchOptions,
) -> Result<HatdbReport<T>, PullbackError> {
    let zs = z_range(x, y, &opts)?;
    let (lower_bound, db_concise) = lower_bounds(x, y, k, opts.reduce)?;
    let mut sx = Side::new(x, k, opts)?;
    let mut sy = Side::new(y, k, opts)?;
    let mut best: Option<(Extended<T>, Vec<usize>, Vec<usize>)> = None;
    let mut evaluated = 0;
    let z_max = *zs.end();
    'outer: for z in zs {
        let cx = compositions(z, x.len());
        let cy = compositions(z, y.len());
        for fx in &cx {
            let bx = sx.barcode(fx, k)?;
            for fy in &cy {
                let by = sy.barcode(fy, k)?;
                evaluated += 1;
                let cost = matching_distance(bx.points(), by.points()).cost;
                if best.as_ref().is_none_or(|b| cost < b.0) {
                    best = Some((cost, fx.clone(), fy.clone()));
                    if cost.within(lower_bound) {
                        break 'outer;
                    }
                }
            }
        }
    }
    let (bound, fx, fy) = best.expect("at least one tripod");
    Ok(HatdbReport {
        degree: k,
        bound,
        witness: Some(tripod_from_fibers(&fx, &fy)?),
        z_max,
        tripods_evaluated: evaluated,
        lower_bound,
        db_concise,
        certified: bound.within(lower_bound),
        formula: false,
    })
}

/// Pullback bottleneck distance in degree `k`: exact formula for `k = 0`, tripod search otherwise.
pub fn hatdb_upper_bound<T: Real>(
    x: &FiniteMetricSpace<T>,
    y: &FiniteMetricSpace<T>,
    k: usize,
    opts: SearchOptions,
) -> Result<HatdbReport<T>, PullbackError> {
    if k > 0 {
        return hatdb_search(x, y, k, opts);
    }
    let value = hatdb0_spaces(x, y)?;
    let (_, db_concise) = lower_bounds(x, y, 0, opts.reduce)?;
    // Any tripod with |Z| = max(n, n') attains the formula: degree-0 pullback barcodes only
    // gain (0,0) points, whichever points are repeated.
    let z = x.len().max(y.len());
    let pad = |n: usize| {
        let mut f = vec![1; n];
        f[0] += z - n;
        f
    };
    Ok(HatdbReport {
        degree: 0,
        bound: Extended::Finite(value),
        witness: Some(tripod_from_fibers(&pad(x.len()), &pad(y.len()))?),
        z_max: z,
        tripods_evaluated: 0,
        lower_bound: Extended::Finite(value),
        db_concise,
        certified: true,
        formula: true,
    })
}

/// Pullback interleaving distance bound: min over tripods of the max over degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HatdiReport<T> {
    pub bound: Extended<T>,
    pub witness: Option<Tripod>,
    /// Matching distance of the witness in each degree considered.
    pub per_degree: Vec<Extended<T>>,
    pub lower_bound: Extended<T>,
    pub certified: bool,
    pub z_max: usize,
    /// Degrees above the cap were not searched although pullbacks could be nonempty there.
    pub degrees_truncated: bool,
}

impl<T: Real> HatdiReport<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "bound": self.bound.to_json(),
            "certified": self.certified,
            "lower_bound": self.lower_bound.to_json(),
            "per_degree": self.per_degree.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "z_max": self.z_max,
            "degrees_truncated": self.degrees_truncated,
            "witness": self.witness.as_ref().map(Tripod::to_file_string),
            "mode": T::mode_name(),
        })
    }
}

pub fn hatdi<T: Real>(
    x: &FiniteMetricSpace<T>,
    y: &FiniteMetricSpace<T>,
    opts: SearchOptions,
) -> Result<HatdiReport<T>, PullbackError> {
    let zs = z_range(x, y, &opts)?;
    let z_max = *zs.end();
    let top = z_max.saturating_sub(2).min(opts.degree_cap);
    let mut lower_bound = Extended::Finite(T::zero());
    for k in 0..=top {
        lower_bound = ext_max(lower_bound, lower_bounds(x, y, k, opts.reduce)?.0);
    }
    let mut sx = Side::new(x, top, opts)?;
    let mut sy = Side::new(y, top, opts)?;
    let mut best: Option<(Extended<T>, Vec<Extended<T>>, Vec<usize>, Vec<usize>)> = None;
    'outer: for z in zs {
        for fx in &compositions(z, x.len()) {
            for fy in &compositions(z, y.len()) {
                let mut per = Vec::with_capacity(top + 1);
                for k in 0..=top {
                    let bx = sx.barcode(fx, k)?;
                    let by = sy.barcode(fy, k)?;
                    per.push(matching_distance(bx.points(), by.points()).cost);
                }
                let cost = per.iter().copied().fold(Extended::Finite(T::zero()), ext_max);
                if best.as_ref().is_none_or(|b| cost < b.0) {
                    best = Some((cost, per, fx.clone(), fy.clone()));
                    if cost.within(lower_bound) {
                        break 'outer;
                    }
                }
            }
        }
    }
    let (bound, per_degree, fx, fy) = best.expect("at least one tripod");
    Ok(HatdiReport {
        bound,
        witness: Some(tripod_from_fibers(&fx, &fy)?),
        per_degree,
        lower_bound,
        certified: bound.within(lower_bound),
        z_max,
        degrees_truncated: z_max.saturating_sub(2) > opts.degree_cap,
    })
}

/// The three quantities of the stability chain `d_B ≤ d̂_B ≤ 2 d_GH` in one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport<T> {
    pub degree: usize,
    pub db_concise: Extended<T>,
    pub hatdb: HatdbReport<T>,
    pub gh: GhResult<T>,
    /// Matching distance of the pullback barcodes along the optimal correspondence.
    pub witness_dm: Extended<T>,
    pub left_ok: bool,
    /// Checked only when the bound is certified.
    pub right_ok: Option<bool>,
    /// `d_M` along the optimal correspondence is at most its distortion.
    pub witness_ok: bool,
}

impl<T: Real> StabilityReport<T> {
    pub fn passed(&self) -> bool {
        self.left_ok && self.right_ok.unwrap_or(true) && self.witness_ok
    }

    /// Row `(d_B, d̂_B, 2 d_GH)`.
    pub fn row(&self) -> (Extended<T>, Extended<T>, T) {
        (self.db_concise, self.hatdb.bound, self.gh.distortion)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "db_concise": self.db_concise.to_json(),
            "hatdb": self.hatdb.to_json(),
            "two_dgh": self.gh.distortion.to_json(),
            "correspondence": self.gh.correspondence,
            "witness_dm": self.witness_dm.to_json(),
            "left_ok": self.left_ok,
            "right_ok": self.right_ok,
            "witness_ok": self.witness_ok,
            "passed": self.passed(),
        })
    }
}

/// Pullback barcode of `space` along a surjection, through its fiber sizes.
pub fn pullback_barcode_along<T: Real>(
    space: &FiniteMetricSpace<T>,
    phi: &Surjection,
    k: usize,
    opts: ReduceOptions,
) -> Result<Barcode<T>, PullbackError> {
    if phi.image_size() != space.len() {
        return Err(MetricError::DimensionMismatch { expected: space.len(), found: phi.image_size() }.into());
    }
    let extra: Vec<usize> = phi.fiber_sizes().iter().map(|f| f - 1).collect();
    let spec = PullbackSpec::from_multiplicities(space.clone(), &extra)?;
    pullback_barcode_closed_form(&spec, &vr_barcode(space, k, opts)?, k)
}

pub fn stability_chain_check<T: Real>(
    x: &FiniteMetricSpace<T>,
    y: &FiniteMetricSpace<T>,
    k: usize,
    opts: SearchOptions,
    gh_budget: u64,
) -> Result<StabilityReport<T>, PullbackError> {
    let hatdb = hatdb_upper_bound(x, y, k, opts)?;
    let gh = gromov_hausdorff_exact(x, y, gh_budget)?;
    let tripod = gh.tripod(x.len(), y.len());
    let bx = pullback_barcode_along(x, tripod.phi_x(), k, opts.reduce)?;
    let by = pullback_barcode_along(y, tripod.phi_y(), k, opts.reduce)?;
    let witness_dm = matching_distance(bx.points(), by.points()).cost;
    let two_gh = Extended::Finite(gh.distortion);
    let right_ok = hatdb.certified.then(|| hatdb.bound.within(two_gh));
    Ok(StabilityReport {
        degree: k,
        db_concise: hatdb.db_concise,
        left_ok: hatdb.db_concise.within(hatdb.bound),
        right_ok,
        witness_ok: witness_dm.within(two_gh),
        witness_dm,
        hatdb,
        gh,
    })
}
