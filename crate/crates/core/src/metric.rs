//! Finite (pseudo-)metric spaces, surjections, tripods and distortion.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::scalar::{ParseValueError, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("distance matrix is empty")]
    Empty,
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("matrix is not symmetric: d[{i}][{j}] != d[{j}][{i}]")]
    NonSymmetric { i: usize, j: usize },
    #[error("negative entry d[{i}][{j}]")]
    NegativeEntry { i: usize, j: usize },
    #[error("nonzero diagonal entry d[{i}][{i}]")]
    NonzeroDiagonal { i: usize },
    #[error("triangle inequality violated: d[{i}][{k}] > d[{i}][{via}] + d[{via}][{k}]")]
    TriangleViolation { i: usize, via: usize, k: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("map is not surjective: index {missing} of [0, {image_size}) is never hit")]
    NotSurjective { missing: usize, image_size: usize },
    #[error("map entry {value} at position {position} is out of range [0, {image_size})")]
    IndexOutOfRange { position: usize, value: usize, image_size: usize },
}

impl MetricError {
    /// Name of the violated axiom, as reported by the CLI.
    pub fn axiom(&self) -> &'static str {
        match self {
            MetricError::Empty | MetricError::NotSquare { .. } => "Shape",
            MetricError::NonSymmetric { .. } => "NonSymmetric",
            MetricError::NegativeEntry { .. } => "NegativeEntry",
            MetricError::NonzeroDiagonal { .. } => "NonzeroDiagonal",
            MetricError::TriangleViolation { .. } => "TriangleViolation",
            MetricError::DimensionMismatch { .. } => "DimensionMismatch",
            MetricError::NotSurjective { .. } | MetricError::IndexOutOfRange { .. } => "Surjection",
        }
    }
}

/// A finite pseudo-metric space given by its distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace<T> {
    n: usize,
    d: Vec<T>,
    labels: Option<Vec<String>>,
    pseudo: bool,
}

impl<T: Real> FiniteMetricSpace<T> {
    /// Validates a square matrix against the pseudo-metric axioms.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self, MetricError> {
        validate_metric(rows)
    }

    pub fn one_point() -> Self {
        FiniteMetricSpace { n: 1, d: vec![T::zero()], labels: None, pseudo: false }
    }

    /// The n-point space with every pair of distinct points at distance `eps`.
    pub fn equilateral(n: usize, eps: T) -> Result<Self, MetricError> {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::zero() } else { eps }).collect())
            .collect();
        validate_metric(rows)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MetricError> {
        if labels.len() != self.n {
            return Err(MetricError::DimensionMismatch { expected: self.n, found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_pseudo(&self) -> bool {
        self.pseudo
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> T {
        self.d[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.d.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Largest distance among the given points (0 for fewer than two).
    pub fn diameter_of(&self, points: &[usize]) -> T {
        let mut best = T::zero();
        for (a, &p) in points.iter().enumerate() {
            for &q in &points[a + 1..] {
                best = best.max(self.dist(p, q));
            }
        }
        best
    }

    pub fn diameter(&self) -> T {
        self.d.iter().copied().max().unwrap_or_else(T::zero)
    }

    /// Sorted multiset of off-diagonal distances `d[i][j]`, `i < j`.
    pub fn edge_lengths(&self) -> Vec<T> {
        let mut out: Vec<T> =
            (0..self.n).tuple_combinations().map(|(i, j)| self.dist(i, j)).collect();
        out.sort();
        out
    }

    /// The space with its points reordered: point `i` of the result is point `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, MetricError> {
        if perm.len() != self.n {
            return Err(MetricError::DimensionMismatch { expected: self.n, found: perm.len() });
        }
        let rows =
            (0..self.n).map(|i| (0..self.n).map(|j| self.dist(perm[i], perm[j])).collect()).collect();
        validate_metric(rows)
    }

    /// `max_{i,j} |d1[i][j] - d2[i][j]|` on a common vertex set.
    pub fn sup_distance(&self, other: &Self) -> Result<T, MetricError> {
        if self.n != other.n {
            return Err(MetricError::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(self.d.iter().zip(&other.d).map(|(&a, &b)| a.abs_diff(b)).max().unwrap_or_else(T::zero))
    }

    /// Distortion of the bijection `i -> perm[i]` from `self` onto `other`.
    pub fn bijection_distortion(&self, other: &Self, perm: &[usize]) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max(self.dist(i, j).abs_diff(other.dist(perm[i], perm[j])));
            }
        }
        worst
    }

    /// Minimum distortion over all bijections onto `other` (exhaustive, n! permutations).
    pub fn min_bijection_distortion(&self, other: &Self) -> Result<(T, Vec<usize>), MetricError> {
        if self.n != other.n {
            return Err(MetricError::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut best: Option<(T, Vec<usize>)> = None;
        for perm in (0..self.n).permutations(self.n) {
            let dis = self.bijection_distortion(other, &perm);
            if best.as_ref().is_none_or(|(b, _)| dis < *b) {
                best = Some((dis, perm));
            }
        }
        Ok(best.unwrap_or((T::zero(), Vec::new())))
    }

    /// Exhaustive isometry test; returns a distance-preserving bijection if one exists.
    pub fn isometry_to(&self, other: &Self) -> Option<Vec<usize>> {
        if self.n != other.n || self.edge_lengths() != other.edge_lengths() {
            return None;
        }
        (0..self.n).permutations(self.n).find(|perm| {
            (0..self.n).all(|i| (i + 1..self.n).all(|j| self.dist(i, j) == other.dist(perm[i], perm[j])))
        })
    }

    /// Converts every distance to another numeric mode through `f`.
    pub fn map_values<U: Real>(&self, f: impl Fn(T) -> U) -> FiniteMetricSpace<U> {
        FiniteMetricSpace {
            n: self.n,
            d: self.d.iter().map(|&v| f(v)).collect(),
            labels: self.labels.clone(),
            pseudo: self.pseudo,
        }
    }
}

/// Checks the pseudo-metric axioms and reports the first violation found.
pub fn validate_metric<T: Real>(rows: Vec<Vec<T>>) -> Result<FiniteMetricSpace<T>, MetricError> {
    let n = rows.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
        }
    }
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            if v.is_negative() {
                return Err(MetricError::NegativeEntry { i, j });
            }
        }
    }
    for (i, r) in rows.iter().enumerate() {
        if r[i] != T::zero() {
            return Err(MetricError::NonzeroDiagonal { i });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if rows[i][j] != rows[j][i] {
                return Err(MetricError::NonSymmetric { i, j });
            }
        }
    }
    for i in 0..n {
        for via in 0..n {
            for k in 0..n {
                if rows[i][k] > rows[i][via].add(rows[via][k]) {
                    return Err(MetricError::TriangleViolation { i, via, k });
                }
            }
        }
    }
    let pseudo = (0..n).any(|i| (0..n).any(|j| i != j && rows[i][j] == T::zero()));
    Ok(FiniteMetricSpace { n, d: rows.into_iter().flatten().collect(), labels: None, pseudo })
}

/// A surjective map `[0, domain_size) -> [0, image_size)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Surjection {
    image_size: usize,
    map: Vec<usize>,
}

impl Surjection {
    pub fn new(map: Vec<usize>, image_size: usize) -> Result<Self, MetricError> {
        let mut hit = vec![false; image_size];
        for (position, &value) in map.iter().enumerate() {
            if value >= image_size {
                return Err(MetricError::IndexOutOfRange { position, value, image_size });
            }
            hit[value] = true;
        }
        if let Some(missing) = hit.iter().position(|h| !h) {
            return Err(MetricError::NotSurjective { missing, image_size });
        }
        Ok(Surjection { image_size, map })
    }

    pub fn identity(n: usize) -> Self {
        Surjection { image_size: n, map: (0..n).collect() }
    }

    pub fn domain_size(&self) -> usize {
        self.map.len()
    }

    pub fn image_size(&self) -> usize {
        self.image_size
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, z: usize) -> usize {
        self.map[z]
    }

    pub fn is_injective(&self) -> bool {
        self.map.len() == self.image_size
    }

    /// Fiber sizes `|phi^{-1}(x)|` for each `x`.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.image_size];
        for &x in &self.map {
            sizes[x] += 1;
        }
        sizes
    }
}

/// Pulls `space` back along `phi`: `d_Z(a, b) = d_X(phi(a), phi(b))`.
pub fn pullback_metric<T: Real>(
    space: &FiniteMetricSpace<T>,
    phi: &Surjection,
) -> Result<FiniteMetricSpace<T>, MetricError> {
    if phi.image_size() != space.len() {
        return Err(MetricError::DimensionMismatch { expected: space.len(), found: phi.image_size() });
    }
    let m = phi.domain_size();
    let mut d = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            d.push(space.dist(phi.apply(a), phi.apply(b)));
        }
    }
    let pseudo = space.is_pseudo() || !phi.is_injective();
    Ok(FiniteMetricSpace { n: m, d, labels: None, pseudo })
}

/// A pair of surjections `X <- Z -> Y` from a common index set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tripod {
    phi_x: Surjection,
    phi_y: Surjection,
}

impl Tripod {
    pub fn new(phi_x: Surjection, phi_y: Surjection) -> Result<Self, MetricError> {
        if phi_x.domain_size() != phi_y.domain_size() {
            return Err(MetricError::DimensionMismatch {
                expected: phi_x.domain_size(),
                found: phi_y.domain_size(),
            });
        }
        Ok(Tripod { phi_x, phi_y })
    }

    /// Builds a tripod from its list of pairs `(phi_x(z), phi_y(z))`.
    pub fn from_pairs(pairs: &[(usize, usize)], nx: usize, ny: usize) -> Result<Self, MetricError> {
        let phi_x = Surjection::new(pairs.iter().map(|p| p.0).collect(), nx)?;
        let phi_y = Surjection::new(pairs.iter().map(|p| p.1).collect(), ny)?;
        Tripod::new(phi_x, phi_y)
    }

    pub fn z_size(&self) -> usize {
        self.phi_x.domain_size()
    }

    pub fn phi_x(&self) -> &Surjection {
        &self.phi_x
    }

    pub fn phi_y(&self) -> &Surjection {
        &self.phi_y
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.phi_x.map().iter().copied().zip(self.phi_y.map().iter().copied()).collect()
    }

    /// Serializes in the three-line tripod file format.
    pub fn to_file_string(&self) -> String {
        format!(
            "{}\n{}\n{}\n",
            self.z_size(),
            self.phi_x.map().iter().join(" "),
            self.phi_y.map().iter().join(" ")
        )
    }
}

impl fmt::Display for Tripod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z={} [", self.z_size())?;
        for (i, (a, b)) in self.pairs().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({a},{b})")?;
        }
        f.write_str("]")
    }
}

/// `max_{z,z'} |d_X(phi_X z, phi_X z') - d_Y(phi_Y z, phi_Y z')|`.
pub fn distortion<T: Real>(
    tripod: &Tripod,
    x: &FiniteMetricSpace<T>,
    y: &FiniteMetricSpace<T>,
) -> Result<T, MetricError> {
    if tripod.phi_x().image_size() != x.len() {
        return Err(MetricError::DimensionMismatch {
            expected: x.len(),
            found: tripod.phi_x().image_size(),
        });
    }
    if tripod.phi_y().image_size() != y.len() {
        return Err(MetricError::DimensionMismatch {
            expected: y.len(),
            found: tripod.phi_y().image_size(),
        });
    }
    let pairs = tripod.pairs();
    let mut worst = T::zero();
    for (a, &(xa, ya)) in pairs.iter().enumerate() {
        for &(xb, yb) in &pairs[a + 1..] {
            worst = worst.max(x.dist(xa, xb).abs_diff(y.dist(ya, yb)));
        }
    }
    Ok(worst)
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("line {line}: {source}")]
    Value { line: usize, source: ParseValueError },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses the distance-matrix text format: a line with `n`, then `n` rows.
pub fn parse_matrix<T: Real>(text: &str) -> Result<Vec<Vec<T>>, InputError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(InputError::Missing("point count"))?;
    let n: usize = header.parse().map_err(|_| InputError::Format {
        line,
        message: format!("expected point count, found `{header}`"),
    })?;
    let mut rows = Vec::with_capacity(n);
    for (line, content) in lines {
        let row = content
            .split_whitespace()
            .map(|tok| T::parse(tok).map_err(|source| InputError::Value { line, source }))
            .collect::<Result<Vec<T>, _>>()?;
        if row.len() != n {
            return Err(InputError::Format {
                line,
                message: format!("expected {n} entries, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(InputError::Format { line: 0, message: format!("expected {n} rows, found {}", rows.len()) });
    }
    Ok(rows)
}

/// Parses and validates a distance-matrix file.
pub fn read_metric<T: Real>(text: &str) -> Result<FiniteMetricSpace<T>, InputError> {
    Ok(validate_metric(parse_matrix(text)?)?)
}

/// Writes a space in the distance-matrix text format.
pub fn write_metric<T: Real>(space: &FiniteMetricSpace<T>) -> String {
    let mut out = format!("{}\n", space.len());
    for row in space.rows() {
        out.push_str(&row.iter().join(" "));
        out.push('\n');
    }
    out
}

/// Parses the tripod file format: `z_size`, then the two index lists.
pub fn parse_tripod(text: &str, nx: usize, ny: usize) -> Result<Tripod, InputError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(InputError::Missing("z_size"))?;
    let z: usize = header
        .parse()
        .map_err(|_| InputError::Format { line, message: format!("expected z_size, found `{header}`") })?;
    let mut read_map = |what: &'static str| -> Result<Vec<usize>, InputError> {
        let (line, content) = lines.next().ok_or(InputError::Missing(what))?;
        let map = content
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| InputError::Format { line, message: format!("bad index `{t}`") })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if map.len() != z {
            return Err(InputError::Format {
                line,
                message: format!("expected {z} indices, found {}", map.len()),
            });
        }
        Ok(map)
    };
    let phi_x = read_map("phi_x")?;
    let phi_y = read_map("phi_y")?;
    Ok(Tripod::new(Surjection::new(phi_x, nx)?, Surjection::new(phi_y, ny)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_int(v)
    }

    fn m(rows: &[&[i64]]) -> Vec<Vec<Exact>> {
        rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
    }

    #[test]
    fn two_point_space_is_a_metric() {
        let s = validate_metric(m(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(s.len(), 2);
        assert!(!s.is_pseudo());
    }

    #[test]
    fn repeated_point_is_pseudo() {
        let s = validate_metric(m(&[&[0, 0, 1], &[0, 0, 1], &[1, 1, 0]])).unwrap();
        assert!(s.is_pseudo());
    }

    #[test]
    fn reports_each_axiom() {
        let err = validate_metric(m(&[&[0, 3, 1], &[3, 0, 1], &[1, 1, 0]])).unwrap_err();
        assert_eq!(err, MetricError::TriangleViolation { i: 0, via: 2, k: 1 });
        assert_eq!(
            validate_metric(m(&[&[0, 1], &[2, 0]])).unwrap_err(),
            MetricError::NonSymmetric { i: 0, j: 1 }
        );
        assert_eq!(
            validate_metric(m(&[&[0, -1], &[-1, 0]])).unwrap_err(),
            MetricError::NegativeEntry { i: 0, j: 1 }
        );
        assert_eq!(
            validate_metric(m(&[&[0, 1], &[1, 2]])).unwrap_err(),
            MetricError::NonzeroDiagonal { i: 1 }
        );
        assert!(matches!(validate_metric(m(&[&[0, 1], &[1]])), Err(MetricError::NotSquare { .. })));
    }

    #[test]
    fn pullback_along_identity_is_identity() {
        let s = validate_metric(m(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]])).unwrap();
        let p = pullback_metric(&s, &Surjection::identity(3)).unwrap();
        assert_eq!(p, s);
    }

    #[test]
    fn pullback_repeats_points_at_distance_zero() {
        let s = validate_metric(m(&[&[0, 1], &[1, 0]])).unwrap();
        let phi = Surjection::new(vec![0, 0, 1], 2).unwrap();
        let p = pullback_metric(&s, &phi).unwrap();
        assert_eq!(p.dist(0, 1), q(0));
        assert_eq!(p.dist(0, 2), q(1));
        assert!(p.is_pseudo());
        assert_eq!(
            pullback_metric(&s, &Surjection::identity(3)).unwrap_err(),
            MetricError::DimensionMismatch { expected: 2, found: 3 }
        );
    }

    #[test]
    fn surjection_rejects_missed_points() {
        assert_eq!(
            Surjection::new(vec![0, 0], 2).unwrap_err(),
            MetricError::NotSurjective { missing: 1, image_size: 2 }
        );
        assert!(matches!(Surjection::new(vec![0, 2], 2), Err(MetricError::IndexOutOfRange { .. })));
    }

    #[test]
    fn distortion_of_isometry_is_zero() {
        let x = validate_metric(m(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]])).unwrap();
        let y = x.permuted(&[2, 0, 1]).unwrap();
        // point i of y is point perm[i] of x, so x's point p sits at position inv[p]
        let inv = [1, 2, 0];
        let t = Tripod::from_pairs(&[(0, inv[0]), (1, inv[1]), (2, inv[2])], 3, 3).unwrap();
        assert_eq!(distortion(&t, &x, &y).unwrap(), q(0));
    }

    #[test]
    fn one_point_tripod_distortion_is_diameter() {
        let x = FiniteMetricSpace::<Exact>::one_point();
        let y = FiniteMetricSpace::equilateral(3, q(5)).unwrap();
        let t = Tripod::from_pairs(&[(0, 0), (0, 1), (0, 2)], 1, 3).unwrap();
        assert_eq!(distortion(&t, &x, &y).unwrap(), q(5));
    }

    #[test]
    fn parses_matrix_and_tripod_files() {
        let text = "# comment\n3\n0 1/2 1\n0.5 0 1\n1 1 0\n";
        let s: FiniteMetricSpace<Exact> = read_metric(text).unwrap();
        assert_eq!(s.dist(0, 1), Exact::from_ratio(1, 2));
        let back: FiniteMetricSpace<Exact> = read_metric(&write_metric(&s)).unwrap();
        assert_eq!(back, s);
        let t = parse_tripod("3\n0 1 2\n0 0 1\n", 3, 2).unwrap();
        assert_eq!(t.pairs(), vec![(0, 0), (1, 0), (2, 1)]);
        assert_eq!(parse_tripod(&t.to_file_string(), 3, 2).unwrap(), t);
        assert!(read_metric::<Exact>("2\n0 1\n").is_err());
        assert!(read_metric::<Exact>("2\n0 x\n1 0\n").is_err());
    }

    #[test]
    fn isometry_search() {
        let x = validate_metric(m(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]])).unwrap();
        let y = x.permuted(&[2, 1, 0]).unwrap();
        assert!(x.isometry_to(&y).is_some());
        let z = validate_metric(m(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]])).unwrap();
        assert!(x.isometry_to(&z).is_none());
        assert_eq!(x.min_bijection_distortion(&y).unwrap().0, q(0));
    }
}
