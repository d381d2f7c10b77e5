//! Generators and independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use itertools::Itertools;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use verbose_ph::barcode::Point;
use verbose_ph::metric::validate_metric;
use verbose_ph::{Exact, Extended, FiniteMetricSpace, Real};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Exact {
    Exact::from_ratio(n, d)
}

/// Random metric: shortest-path closure of random half-integer edge weights.
/// With `pseudo`, some weights may be zero.
pub fn random_metric(rng: &mut impl Rng, n: usize, pseudo: bool) -> FiniteMetricSpace<Exact> {
    let lo = if pseudo { 0 } else { 1 };
    let mut d = vec![vec![q(0, 1); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = q(rng.gen_range(lo..=8), 2);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    validate_metric(d).expect("shortest-path closure is a pseudo-metric")
}

/// Random metric with few distinct values, so ties and zero-length bars are common.
pub fn random_coarse_metric(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace<Exact> {
    let mut d = vec![vec![q(0, 1); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = q(rng.gen_range(2..=4), 2);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    // Values in [1, 2] always satisfy the triangle inequality.
    validate_metric(d).expect("values in [1,2] form a metric")
}

pub fn random_points(rng: &mut impl Rng, len: usize, allow_inf: bool) -> Vec<Point<Exact>> {
    (0..len)
        .map(|_| {
            let b = rng.gen_range(0..6);
            if allow_inf && rng.gen_bool(0.2) {
                (q(b, 1), Extended::Infinite)
            } else {
                (q(b, 1), Extended::Finite(q(b + rng.gen_range(0..5), 1)))
            }
        })
        .collect()
}

/// Degree-0 verbose deaths from single linkage: the edge weights of a minimum spanning tree (Prim).
pub fn mst_weights<T: Real>(s: &FiniteMetricSpace<T>) -> Vec<T> {
    let n = s.len();
    let mut in_tree = vec![false; n];
    let mut best: Vec<Option<T>> = vec![None; n];
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    in_tree[0] = true;
    for v in 1..n {
        best[v] = Some(s.dist(0, v));
    }
    for _ in 1..n {
        let v = (0..n).filter(|&v| !in_tree[v]).min_by_key(|&v| best[v]).unwrap();
        out.push(best[v].unwrap());
        in_tree[v] = true;
        for u in 0..n {
            if !in_tree[u] && s.dist(v, u) < best[u].unwrap() {
                best[u] = Some(s.dist(v, u));
            }
        }
    }
    out.sort();
    out
}

/// Verbose barcodes from a separately written GF(2) reduction: simplices are vertex bitmasks,
/// ties are broken by descending mask, columns are packed bitsets.
pub fn second_reduction(s: &FiniteMetricSpace<Exact>) -> Vec<Vec<Point<Exact>>> {
    let n = s.len();
    assert!(n <= 16);
    let mut simplices: Vec<(Exact, u32, u32)> = (1u32..(1 << n))
        .map(|mask| {
            let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            (s.diameter_of(&verts), mask.count_ones() - 1, mask)
        })
        .collect();
    simplices.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(b.2.cmp(&a.2)));
    let pos: std::collections::HashMap<u32, usize> = simplices.iter().enumerate().map(|(i, s)| (s.2, i)).collect();
    let words = simplices.len().div_ceil(64);
    let mut cols: Vec<Vec<u64>> = simplices
        .iter()
        .map(|&(_, dim, mask)| {
            let mut col = vec![0u64; words];
            if dim > 0 {
                for v in 0..n {
                    if mask >> v & 1 == 1 {
                        let f = pos[&(mask & !(1 << v))];
                        col[f / 64] |= 1 << (f % 64);
                    }
                }
            }
            col
        })
        .collect();
    let low = |c: &[u64]| -> Option<usize> {
        c.iter().enumerate().rev().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    };
    let mut owner: Vec<Option<usize>> = vec![None; simplices.len()];
    let mut paired = vec![false; simplices.len()];
    let mut bars: Vec<Vec<Point<Exact>>> = vec![Vec::new(); n];
    for j in 0..simplices.len() {
        while let Some(l) = low(&cols[j]) {
            match owner[l] {
                Some(k) => {
                    let other = cols[k].clone();
                    for (a, b) in cols[j].iter_mut().zip(other) {
                        *a ^= b;
                    }
                }
                None => {
                    owner[l] = Some(j);
                    paired[l] = true;
                    paired[j] = true;
                    let dim = simplices[l].1 as usize;
                    bars[dim].push((simplices[l].0, Extended::Finite(simplices[j].0)));
                    break;
                }
            }
        }
    }
    for (i, &(d, dim, _)) in simplices.iter().enumerate() {
        if !paired[i] {
            bars[dim as usize].push((d, Extended::Infinite));
        }
    }
    for b in &mut bars {
        b.sort();
    }
    bars
}

pub fn dinf_ref(p: Point<Exact>, r: Point<Exact>) -> Option<Exact> {
    match (p.1, r.1) {
        (Extended::Finite(a), Extended::Finite(b)) => Some((p.0 - r.0).abs().max((a - b).abs())),
        (Extended::Infinite, Extended::Infinite) => Some((p.0 - r.0).abs()),
        _ => None,
    }
}

/// Matching distance by trying every bijection; `None` means infinite.
pub fn brute_matching(a: &[Point<Exact>], b: &[Point<Exact>]) -> Option<Exact> {
    if a.len() != b.len() {
        return None;
    }
    (0..b.len())
        .permutations(b.len())
        .filter_map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(i, &j)| dinf_ref(a[i], b[j]))
                .try_fold(q(0, 1), |acc, c| c.map(|c| acc.max(c)))
        })
        .min()
}

fn half_pers(p: Point<Exact>) -> Option<Exact> {
    p.1.finite().map(|d| (d - p.0) / q(2, 1))
}

fn partial_fits(a: &[Point<Exact>], b: &[Point<Exact>], used: &mut Vec<bool>, i: usize, t: Exact) -> bool {
    if i == a.len() {
        return (0..b.len()).all(|j| used[j] || half_pers(b[j]).is_some_and(|h| h <= t));
    }
    if half_pers(a[i]).is_some_and(|h| h <= t) && partial_fits(a, b, used, i + 1, t) {
        return true;
    }
    for j in 0..b.len() {
        if !used[j] && dinf_ref(a[i], b[j]).is_some_and(|c| c <= t) {
            used[j] = true;
            let ok = partial_fits(a, b, used, i + 1, t);
            used[j] = false;
            if ok {
                return true;
            }
        }
    }
    false
}

/// Bottleneck distance: smallest candidate value (pairwise costs and half-persistences)
/// admitting a partial matching found by exhaustive backtracking.
pub fn brute_bottleneck(a: &[Point<Exact>], b: &[Point<Exact>]) -> Option<Exact> {
    let mut candidates = vec![q(0, 1)];
    candidates.extend(a.iter().chain(b).filter_map(|&p| half_pers(p)));
    for &p in a {
        for &r in b {
            candidates.extend(dinf_ref(p, r));
        }
    }
    candidates.sort();
    candidates.dedup();
    candidates.into_iter().find(|&t| partial_fits(a, b, &mut vec![false; b.len()], 0, t))
}

/// Number of tripods up to relabeling of Z, by enumerating labelled map pairs and canonicalizing.
pub fn brute_tripod_count(nx: usize, ny: usize, max_extra: usize) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    let lo = nx.max(ny);
    for z in lo..=lo + max_extra {
        for fx in (0..z).map(|_| 0..nx).multi_cartesian_product() {
            if (0..nx).any(|x| !fx.contains(&x)) {
                continue;
            }
            for fy in (0..z).map(|_| 0..ny).multi_cartesian_product() {
                if (0..ny).any(|y| !fy.contains(&y)) {
                    continue;
                }
                let mut pairs: Vec<(usize, usize)> = fx.iter().copied().zip(fy.iter().copied()).collect();
                pairs.sort();
                seen.insert(pairs);
            }
        }
    }
    seen.len()
}
