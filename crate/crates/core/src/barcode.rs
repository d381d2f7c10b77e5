//! Verbose and concise barcodes, their serialization, and the elementary decomposition.

use std::fmt;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::complex::{ComplexError, FilteredComplex};
use crate::metric::FiniteMetricSpace;
use crate::reduce::{reduce, PersistencePairing, ReduceOptions};
use crate::scalar::{Extended, ParseValueError, Real};

/// A barcode point `(birth, death)` with `death` possibly infinite.
pub type Point<T> = (T, Extended<T>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BarcodeError {
    #[error("degree {degree} is out of range (computed up to {max})")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("point ({birth}, {death}) has birth after death")]
    BirthAfterDeath { birth: String, death: String },
    #[error("malformed barcode: {0}")]
    Malformed(String),
    #[error(transparent)]
    Value(#[from] ParseValueError),
}

/// A finite multiset of barcode points in one degree, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Barcode<T> {
    degree: usize,
    points: Vec<Point<T>>,
}

impl<T: Real> Barcode<T> {
    pub fn new(degree: usize, mut points: Vec<Point<T>>) -> Result<Self, BarcodeError> {
        for &(b, d) in &points {
            if Extended::Finite(b) > d || b.is_negative() {
                return Err(BarcodeError::BirthAfterDeath { birth: b.to_string(), death: d.to_string() });
            }
        }
        points.sort();
        Ok(Barcode { degree, points })
    }

    pub fn empty(degree: usize) -> Self {
        Barcode { degree, points: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Multiset union.
    pub fn union(&self, extra: impl IntoIterator<Item = Point<T>>) -> Self {
        let mut points = self.points.clone();
        points.extend(extra);
        points.sort();
        Barcode { degree: self.degree, points }
    }

    /// Drops the diagonal points `death = birth`.
    pub fn concise(&self) -> Self {
        Barcode {
            degree: self.degree,
            points: self.points.iter().copied().filter(|&(b, d)| d != Extended::Finite(b)).collect(),
        }
    }

    /// Finite deaths in descending order.
    pub fn finite_deaths_desc(&self) -> Vec<T> {
        let mut out: Vec<T> = self.points.iter().filter_map(|p| p.1.finite()).collect();
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    /// Multiset equality up to the numeric tolerance of `T`.
    pub fn close(&self, other: &Self) -> bool {
        self.points.len() == other.points.len()
            && self.points.iter().zip(&other.points).all(|(p, q)| p.0.close(q.0) && p.1.close(q.1))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.points.iter().map(|&(b, d)| Value::Array(vec![b.to_json(), d.to_json()])).collect(),
        )
    }

    /// Parses `[[birth, death], ...]` where entries are numbers or strings such as `"1/2"` or `"inf"`.
    pub fn from_json(degree: usize, value: &Value) -> Result<Self, BarcodeError> {
        let items = value.as_array().ok_or_else(|| BarcodeError::Malformed("expected an array".into()))?;
        let mut points = Vec::with_capacity(items.len());
        for item in items {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| BarcodeError::Malformed(format!("expected [birth, death], found {item}")))?;
            let birth = T::parse(&json_token(&pair[0])?)?;
            let death = Extended::parse(&json_token(&pair[1])?)?;
            points.push((birth, death));
        }
        Barcode::new(degree, points)
    }

    pub fn map_values<U: Real>(&self, f: impl Fn(T) -> U) -> Barcode<U> {
        let points = self
            .points
            .iter()
            .map(|&(b, d)| {
                let d = match d {
                    Extended::Finite(v) => Extended::Finite(f(v)),
                    Extended::Infinite => Extended::Infinite,
                };
                (f(b), d)
            })
            .collect();
        Barcode::new(self.degree, points).expect("monotone conversion keeps birth <= death")
    }
}

fn json_token(v: &Value) -> Result<String, BarcodeError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(BarcodeError::Malformed(format!("expected a number or string, found {other}"))),
    }
}

impl<T: Real> fmt::Display for Barcode<T> {
    /// Set notation with multiplicity subscripts, e.g. `{(0,1)_2, (0,∞)}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.points.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("{")?;
        let mut first = true;
        let mut i = 0;
        while i < self.points.len() {
            let p = self.points[i];
            let run = self.points[i..].iter().take_while(|&&q| q == p).count();
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "({},{})", p.0, p.1)?;
            if run > 1 {
                write!(f, "_{run}")?;
            }
            i += run;
        }
        f.write_str("}")
    }
}

/// Barcodes of every degree `0..=max_dim`.
pub type BarcodeFamily<T> = Vec<Barcode<T>>;

/// Degree-`k` verbose barcode of a pairing.
pub fn verbose_barcode<T: Real>(pairing: &PersistencePairing<T>, k: usize) -> Result<Barcode<T>, BarcodeError> {
    if k > pairing.max_dim() {
        return Err(BarcodeError::DegreeOutOfRange { degree: k, max: pairing.max_dim() });
    }
    let mut points: Vec<Point<T>> = pairing
        .pairs(k)
        .iter()
        .map(|&(c, d)| (pairing.level(c), Extended::Finite(pairing.level(d))))
        .collect();
    points.extend(pairing.unpaired(k).iter().map(|&c| (pairing.level(c), Extended::Infinite)));
    Barcode::new(k, points)
}

pub fn concise_barcode<T: Real>(verbose: &Barcode<T>) -> Barcode<T> {
    verbose.concise()
}

/// Options for computing barcodes of a metric space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BarcodeOptions {
    /// Highest degree; `None` means `n - 1`.
    pub max_dim: Option<usize>,
    pub reduce: ReduceOptions,
}

/// Verbose barcodes of the Vietoris-Rips complex of `space` in degrees `0..=max_dim`.
pub fn vr_barcodes<T: Real>(
    space: &FiniteMetricSpace<T>,
    opts: BarcodeOptions,
) -> Result<BarcodeFamily<T>, ComplexError> {
    let max_dim = opts.max_dim.unwrap_or(space.len() - 1);
    let complex = FilteredComplex::build(space, max_dim)?;
    let pairing = reduce(&complex, opts.reduce);
    Ok((0..=max_dim).map(|k| verbose_barcode(&pairing, k).expect("degree within range")).collect())
}

/// Verbose barcode of a single degree, building only what that degree needs.
pub fn vr_barcode<T: Real>(
    space: &FiniteMetricSpace<T>,
    k: usize,
    reduce_opts: ReduceOptions,
) -> Result<Barcode<T>, ComplexError> {
    if k + 1 > space.len() {
        return Ok(Barcode::empty(k));
    }
    let complex = FilteredComplex::build(space, k)?;
    let pairing = reduce(&complex, reduce_opts);
    Ok(verbose_barcode(&pairing, k).expect("degree within range"))
}

/// Expected verbose barcode size of an `n`-point metric space in degree `k`.
pub fn cardinality_check(n: usize, k: usize) -> usize {
    use crate::complex::binomial;
    match k {
        0 => n,
        _ if n >= 2 && k <= n - 2 => binomial(n - 1, k + 1),
        _ => 0,
    }
}

fn pad<T: Real>(family: &[Barcode<T>], k: usize) -> Barcode<T> {
    family.get(k).cloned().unwrap_or_else(|| Barcode::empty(k))
}

/// Filtered chain isomorphism test: verbose barcodes agree in every degree.
pub fn fci_equal<T: Real>(x: &[Barcode<T>], y: &[Barcode<T>]) -> bool {
    (0..x.len().max(y.len())).all(|k| pad(x, k) == pad(y, k))
}

/// Filtered homotopy equivalence test: concise barcodes agree in every degree.
pub fn fhe_equal<T: Real>(x: &[Barcode<T>], y: &[Barcode<T>]) -> bool {
    (0..x.len().max(y.len())).all(|k| pad(x, k).concise() == pad(y, k).concise())
}

/// An elementary summand `E(birth, death, degree)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Elementary<T> {
    pub birth: T,
    pub death: Extended<T>,
    pub degree: usize,
}

impl<T: Real> Elementary<T> {
    /// Dimension of the summand as a chain complex: 1 for infinite bars, else 2.
    pub fn dimension(&self) -> usize {
        if self.death.is_infinite() {
            1
        } else {
            2
        }
    }
}

/// One elementary summand per verbose barcode point, over every degree of the pairing.
pub fn decompose_elementary<T: Real>(pairing: &PersistencePairing<T>) -> Vec<Elementary<T>> {
    let mut out = Vec::new();
    for k in 0..=pairing.max_dim() {
        let bc = verbose_barcode(pairing, k).expect("degree within range");
        out.extend(bc.points().iter().map(|&(birth, death)| Elementary { birth, death, degree: k }));
    }
    out.sort();
    out
}

/// JSON object `{"k": [[birth, death], ...], ...}`.
pub fn family_to_json<T: Real>(family: &[Barcode<T>]) -> Value {
    let mut map = Map::new();
    for bc in family {
        map.insert(bc.degree().to_string(), bc.to_json());
    }
    Value::Object(map)
}

/// Parses either a family object `{"k": [...]}` or a bare point list (taken as `default_degree`).
pub fn family_from_json<T: Real>(value: &Value, default_degree: usize) -> Result<BarcodeFamily<T>, BarcodeError> {
    match value {
        Value::Object(map) => {
            let mut out = Vec::new();
            for (key, pts) in map {
                let degree: usize =
                    key.parse().map_err(|_| BarcodeError::Malformed(format!("bad degree key `{key}`")))?;
                out.push(Barcode::from_json(degree, pts)?);
            }
            out.sort_by_key(Barcode::degree);
            Ok(out)
        }
        Value::Array(_) => Ok(vec![Barcode::from_json(default_degree, value)?]),
        _ => Err(BarcodeError::Malformed("expected an object or an array".into())),
    }
}

/// One line per degree, `k: {(a,b), ...}`.
pub fn family_to_table<T: Real>(family: &[Barcode<T>]) -> String {
    family.iter().map(|bc| format!("{}: {}\n", bc.degree(), bc)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn q(v: i64) -> Exact {
        Exact::from_int(v)
    }

    fn fin(b: i64, d: i64) -> Point<Exact> {
        (q(b), Extended::Finite(q(d)))
    }

    #[test]
    fn one_point_space() {
        let fam = vr_barcodes(&FiniteMetricSpace::<Exact>::one_point(), BarcodeOptions::default()).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].points(), &[(q(0), Extended::Infinite)]);
    }

    #[test]
    fn concise_drops_diagonal() {
        let v = Barcode::new(1, vec![fin(1, 1), fin(2, 2), fin(2, 2)]).unwrap();
        assert!(v.concise().is_empty());
        let w = Barcode::new(1, vec![fin(1, 2), fin(2, 2), fin(2, 2)]).unwrap();
        assert_eq!(w.concise().points(), &[fin(1, 2)]);
        let u = Barcode::new(0, vec![fin(0, 1), (q(0), Extended::Infinite)]).unwrap();
        assert_eq!(u.concise(), u);
    }

    #[test]
    fn table_notation() {
        let b = Barcode::new(0, vec![fin(0, 1), (q(0), Extended::Infinite), fin(0, 1)]).unwrap();
        assert_eq!(b.to_string(), "{(0,1)_2, (0,∞)}");
        assert_eq!(Barcode::<Exact>::empty(2).to_string(), "∅");
    }

    #[test]
    fn json_round_trip() {
        let b = Barcode::new(0, vec![(Exact::from_ratio(1, 2), Extended::Finite(q(1))), (q(0), Extended::Infinite)])
            .unwrap();
        let fam = vec![b];
        let json = family_to_json(&fam);
        assert_eq!(json.to_string(), r#"{"0":[["0","inf"],["1/2","1"]]}"#);
        let back: BarcodeFamily<Exact> = family_from_json(&json, 0).unwrap();
        assert_eq!(back, fam);
    }

    #[test]
    fn rejects_birth_after_death() {
        assert!(Barcode::new(0, vec![fin(2, 1)]).is_err());
    }

    #[test]
    fn cardinalities() {
        assert_eq!(cardinality_check(4, 1), 3);
        assert_eq!(cardinality_check(5, 2), 4);
        assert_eq!(cardinality_check(5, 3), 1);
        assert_eq!(cardinality_check(5, 4), 0);
        assert_eq!(cardinality_check(1, 0), 1);
    }

    #[test]
    fn two_point_decomposition() {
        let s = FiniteMetricSpace::equilateral(2, q(1)).unwrap();
        let c = FilteredComplex::build(&s, 1).unwrap();
        let p = reduce(&c, ReduceOptions::default());
        let e = decompose_elementary(&p);
        assert_eq!(
            e,
            vec![
                Elementary { birth: q(0), death: Extended::Finite(q(1)), degree: 0 },
                Elementary { birth: q(0), death: Extended::Infinite, degree: 0 },
            ]
        );
        assert_eq!(e.iter().map(Elementary::dimension).sum::<usize>(), 3);
    }
}
