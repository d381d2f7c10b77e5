//! Reference checks over the bundled example spaces.
//!
//! Each check recomputes a published value from the bundled inputs and compares it
//! exactly (or within the float tolerance in float mode).

use std::collections::BTreeMap;
use std::path::Path;

use crate::barcode::{cardinality_check, fci_equal, fhe_equal, vr_barcodes, Barcode, BarcodeOptions, Point};
use crate::gh::{gromov_hausdorff_exact, DEFAULT_NODE_BUDGET};
use crate::matching::{bottleneck_distance, di_bounds_check, interleaving_distance};
use crate::metric::{read_metric, validate_metric, FiniteMetricSpace};
use crate::pullback::{
    hatdb_upper_bound, hatdi, pullback_barcode_closed_form, pullback_barcode_direct, stability_chain_check,
    PullbackSpec, SearchOptions,
};
use crate::reduce::ReduceOptions;
use crate::scalar::{Extended, Real};

/// Names of the bundled data files.
pub const DATA_FILES: [&str; 9] =
    ["x4.txt", "y4.txt", "x5.txt", "y5.txt", "z4.txt", "w4.txt", "d0.txt", "d1.txt", "d2.txt"];

/// Raw text of the example inputs, keyed by file name.
#[derive(Debug, Clone)]
pub struct DataSet {
    files: BTreeMap<String, String>,
}

impl DataSet {
    /// The copies compiled into the library.
    pub fn bundled() -> Self {
        let texts = [
            include_str!("../data/x4.txt"),
            include_str!("../data/y4.txt"),
            include_str!("../data/x5.txt"),
            include_str!("../data/y5.txt"),
            include_str!("../data/z4.txt"),
            include_str!("../data/w4.txt"),
            include_str!("../data/d0.txt"),
            include_str!("../data/d1.txt"),
            include_str!("../data/d2.txt"),
        ];
        let files = DATA_FILES.iter().zip(texts).map(|(n, t)| (n.to_string(), t.to_string())).collect();
        DataSet { files }
    }

    /// Reads the same file names from a directory; missing files surface as failed checks.
    pub fn from_dir(dir: &Path) -> Self {
        let files = DATA_FILES
            .iter()
            .filter_map(|n| std::fs::read_to_string(dir.join(n)).ok().map(|t| (n.to_string(), t)))
            .collect();
        DataSet { files }
    }

    fn space<T: Real>(&self, name: &str) -> Result<FiniteMetricSpace<T>, String> {
        let text = self.files.get(name).ok_or_else(|| format!("missing data file {name}"))?;
        read_metric(text).map_err(|e| format!("{name}: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<Vec<String>, String>;

fn val<T: Real>(s: &str) -> T {
    T::parse(s).expect("reference value parses")
}

fn ext<T: Real>(s: &str) -> Extended<T> {
    Extended::parse(s).expect("reference value parses")
}

/// Barcode from `(birth, death, multiplicity)` triples.
fn bc<T: Real>(k: usize, spec: &[(&str, &str, usize)]) -> Barcode<T> {
    let pts: Vec<Point<T>> = spec
        .iter()
        .flat_map(|&(b, d, m)| std::iter::repeat_n((val::<T>(b), ext::<T>(d)), m))
        .collect();
    Barcode::new(k, pts).expect("reference barcode is valid")
}

fn expect_barcode<T: Real>(what: &str, got: &Barcode<T>, want: &Barcode<T>, errs: &mut Vec<String>) {
    if !got.close(want) {
        errs.push(format!("{what}: got {got}, expected {want}"));
    }
}

fn expect_ext<T: Real>(what: &str, got: Extended<T>, want: Extended<T>, errs: &mut Vec<String>) {
    if !got.close(want) {
        errs.push(format!("{what}: got {got}, expected {want}"));
    }
}

fn expect_true(what: &str, ok: bool, errs: &mut Vec<String>) {
    if !ok {
        errs.push(format!("{what}: failed"));
    }
}

fn finish(errs: Vec<String>) -> Outcome {
    if errs.is_empty() {
        Ok(Vec::new())
    } else {
        Err(errs.join("; "))
    }
}

fn family<T: Real>(s: &FiniteMetricSpace<T>) -> Result<Vec<Barcode<T>>, String> {
    vr_barcodes(s, BarcodeOptions::default()).map_err(|e| e.to_string())
}

fn four_point_barcodes<T: Real>(data: &DataSet) -> Outcome {
    let x = data.space::<T>("x4.txt")?;
    let y = data.space::<T>("y4.txt")?;
    let (bx, by) = (family(&x)?, family(&y)?);
    let b0 = [("0", "1", 2), ("0", "2", 1), ("0", "inf", 1)];
    let want_x = [bc(0, &b0), bc(1, &[("1", "1", 1), ("2", "2", 2)]), bc(2, &[("2", "2", 1)]), bc(3, &[])];
    let want_y = [bc(0, &b0), bc(1, &[("2", "2", 3)]), bc(2, &[("2", "2", 1)]), bc(3, &[])];
    let mut errs = Vec::new();
    for k in 0..4 {
        expect_barcode(&format!("X degree {k}"), &bx[k], &want_x[k], &mut errs);
        expect_barcode(&format!("Y degree {k}"), &by[k], &want_y[k], &mut errs);
    }
    expect_true("fci_equal(X, Y) = false", !fci_equal(&bx, &by), &mut errs);
    expect_true("fhe_equal(X, Y) = true", fhe_equal(&bx, &by), &mut errs);
    finish(errs)
}

fn five_point_barcodes<T: Real>(data: &DataSet) -> Outcome {
    let x = data.space::<T>("x5.txt")?;
    let y = data.space::<T>("y5.txt")?;
    let (bx, by) = (family(&x)?, family(&y)?);
    let want = [
        bc(0, &[("0", "0.5", 1), ("0", "1", 2), ("0", "2", 1), ("0", "inf", 1)]),
        bc(1, &[("1", "1", 1), ("2", "2", 5)]),
        bc(2, &[("2", "2", 4)]),
        bc(3, &[("2", "2", 1)]),
    ];
    let mut errs = Vec::new();
    for k in 0..4 {
        expect_barcode(&format!("X degree {k}"), &bx[k], &want[k], &mut errs);
        expect_barcode(&format!("Y degree {k}"), &by[k], &want[k], &mut errs);
    }
    expect_true("fci_equal(X, Y) = true", fci_equal(&bx, &by), &mut errs);
    expect_true("X and Y are not isometric", x.isometry_to(&y).is_none(), &mut errs);
    finish(errs)
}

fn cardinalities<T: Real>(data: &DataSet) -> Outcome {
    let mut errs = Vec::new();
    for name in ["x4.txt", "y4.txt", "x5.txt", "y5.txt", "z4.txt", "w4.txt"] {
        let s = data.space::<T>(name)?;
        for (k, b) in family(&s)?.iter().enumerate() {
            if b.len() != cardinality_check(s.len(), k) {
                errs.push(format!("{name} degree {k}: {} points, expected {}", b.len(), cardinality_check(s.len(), k)));
            }
        }
    }
    finish(errs)
}

fn pullback_extra_copy<T: Real>(data: &DataSet) -> Outcome {
    let x = data.space::<T>("x4.txt")?;
    let y = data.space::<T>("y4.txt")?;
    let want = [
        bc(0, &[("0", "0", 1), ("0", "1", 2), ("0", "2", 1), ("0", "inf", 1)]),
        bc(1, &[("1", "1", 1), ("2", "2", 5)]),
        bc(2, &[("2", "2", 4)]),
        bc(3, &[("2", "2", 1)]),
    ];
    let mut errs = Vec::new();
    for (label, s) in [("X", &x), ("Y", &y)] {
        let spec = PullbackSpec::new(s.clone(), vec![3]).map_err(|e| e.to_string())?;
        let base = family(s)?;
        for k in 0..4 {
            let closed = pullback_barcode_closed_form(&spec, &base[k], k).map_err(|e| e.to_string())?;
            let direct = pullback_barcode_direct(&spec, k, ReduceOptions::default()).map_err(|e| e.to_string())?;
            expect_barcode(&format!("{label} ⊔ {{p3}} closed form degree {k}"), &closed, &want[k], &mut errs);
            expect_barcode(&format!("{label} ⊔ {{p3}} direct degree {k}"), &direct, &want[k], &mut errs);
        }
    }
    let r = hatdi(&x, &y, SearchOptions { max_extra: 1, ..SearchOptions::default() }).map_err(|e| e.to_string())?;
    expect_ext("pullback interleaving bound for (X, Y)", r.bound, ext("0"), &mut errs);
    finish(errs)
}

fn two_point_family<T: Real>(_: &DataSet) -> Outcome {
    let mut errs = Vec::new();
    let x0 = FiniteMetricSpace::<T>::equilateral(2, val("1")).map_err(|e| e.to_string())?;
    for (eps, db) in [("0", "0"), ("1/2", "1/2"), ("2", "3/2")] {
        let xe = FiniteMetricSpace::<T>::equilateral(2, val::<T>("1").add(val(eps))).map_err(|e| e.to_string())?;
        let h = hatdb_upper_bound(&xe, &x0, 0, SearchOptions::default()).map_err(|e| e.to_string())?;
        expect_ext(&format!("hatdb0(X_{eps}, X_0)"), h.bound, ext(eps), &mut errs);
        expect_ext(&format!("d_B(X_{eps}, X_0) degree 0"), h.db_concise, ext(db), &mut errs);
        let gh = gromov_hausdorff_exact(&xe, &x0, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        expect_ext(&format!("2 d_GH(X_{eps}, X_0)"), Extended::Finite(gh.distortion), ext(eps), &mut errs);
    }
    finish(errs)
}

fn one_point_vs_simplex<T: Real>(_: &DataSet) -> Outcome {
    let mut errs = Vec::new();
    let x = FiniteMetricSpace::<T>::one_point();
    for n in [2, 3, 5] {
        for eps in ["1", "3/2"] {
            let y = FiniteMetricSpace::<T>::equilateral(n, val(eps)).map_err(|e| e.to_string())?;
            let what = format!("one point vs Δ_{n}({eps})");
            let h0 = hatdb_upper_bound(&x, &y, 0, SearchOptions::default()).map_err(|e| e.to_string())?;
            expect_ext(&format!("{what} hatdb0"), h0.bound, ext(eps), &mut errs);
            let gh = gromov_hausdorff_exact(&x, &y, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
            expect_ext(&format!("{what} 2 d_GH"), Extended::Finite(gh.distortion), ext(eps), &mut errs);
            let opts = SearchOptions { max_extra: 0, ..SearchOptions::default() };
            let di = hatdi(&x, &y, opts).map_err(|e| e.to_string())?;
            expect_ext(&format!("{what} hatdi"), di.bound, ext(eps), &mut errs);
        }
    }
    finish(errs)
}

/// Order X, Y, Z, W; entries above the diagonal listed row by row.
fn table_check<T: Real>(
    what: &str,
    spaces: &[FiniteMetricSpace<T>; 4],
    upper: [&str; 6],
    f: impl Fn(&FiniteMetricSpace<T>, &FiniteMetricSpace<T>) -> Result<Extended<T>, String>,
    errs: &mut Vec<String>,
) -> Result<(), String> {
    let names = ["X", "Y", "Z", "W"];
    let mut idx = 0;
    for i in 0..4 {
        expect_ext(&format!("{what} ({0},{0})", names[i]), f(&spaces[i], &spaces[i])?, ext("0"), errs);
        for j in i + 1..4 {
            let want = ext(upper[idx]);
            idx += 1;
            expect_ext(&format!("{what} ({},{})", names[i], names[j]), f(&spaces[i], &spaces[j])?, want, errs);
            expect_ext(&format!("{what} ({},{})", names[j], names[i]), f(&spaces[j], &spaces[i])?, want, errs);
        }
    }
    Ok(())
}

fn four_spaces<T: Real>(data: &DataSet) -> Result<[FiniteMetricSpace<T>; 4], String> {
    Ok([data.space("x4.txt")?, data.space("y4.txt")?, data.space("z4.txt")?, data.space("w4.txt")?])
}

fn concise_db<T: Real>(k: usize) -> impl Fn(&FiniteMetricSpace<T>, &FiniteMetricSpace<T>) -> Result<Extended<T>, String> {
    move |a, b| {
        let (fa, fb) = (family(a)?, family(b)?);
        Ok(bottleneck_distance(fa[k].concise().points(), fb[k].concise().points()).cost)
    }
}

fn table_db<T: Real>(data: &DataSet) -> Outcome {
    let s = four_spaces::<T>(data)?;
    let mut errs = Vec::new();
    table_check("d_B degree 0", &s, ["0", "1", "1", "1", "1", "0"], concise_db(0), &mut errs)?;
    table_check("d_B degree 1", &s, ["0", "0", "1/2", "0", "1/2", "1/2"], concise_db(1), &mut errs)?;
    finish(errs)
}

fn table_hatdb<T: Real>(data: &DataSet) -> Outcome {
    let s = four_spaces::<T>(data)?;
    let mut errs = Vec::new();
    for (k, upper) in [(0, ["0", "1", "1", "1", "1", "0"]), (1, ["0", "1", "1", "1", "1", "1"])] {
        let f = |a: &FiniteMetricSpace<T>, b: &FiniteMetricSpace<T>| {
            let r = hatdb_upper_bound(a, b, k, SearchOptions::default()).map_err(|e| e.to_string())?;
            if !r.certified {
                return Err(format!("degree {k} bound {} is not certified (lower bound {})", r.bound, r.lower_bound));
            }
            Ok(r.bound)
        };
        table_check(&format!("hatdb degree {k}"), &s, upper, f, &mut errs)?;
    }
    finish(errs)
}

fn table_gh<T: Real>(data: &DataSet) -> Outcome {
    let s = four_spaces::<T>(data)?;
    let mut errs = Vec::new();
    let f = |a: &FiniteMetricSpace<T>, b: &FiniteMetricSpace<T>| {
        let r = gromov_hausdorff_exact(a, b, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        Ok(Extended::Finite(r.distortion))
    };
    table_check("2 d_GH", &s, ["1"; 6], f, &mut errs)?;
    finish(errs)
}

/// The 3-point space with sides `a ≤ b ≤ c`.
pub fn three_point<T: Real>(a: T, b: T, c: T) -> Result<FiniteMetricSpace<T>, String> {
    let z = T::zero();
    validate_metric(vec![vec![z, a, b], vec![a, z, c], vec![b, c, z]]).map_err(|e| e.to_string())
}

/// Instantiations `(a, b, c1, c2)` of the 3-point pair.
pub const THREE_POINT_CASES: [(&str, &str, &str, &str); 3] = [("1", "2", "2", "3"), ("2", "3", "3", "5"), ("2", "2", "2", "4")];

fn three_point_table<T: Real>(_: &DataSet) -> Outcome {
    let mut errs = Vec::new();
    for (a, b, c1, c2) in THREE_POINT_CASES {
        let x1 = three_point::<T>(val(a), val(b), val(c1))?;
        let x2 = three_point::<T>(val(a), val(b), val(c2))?;
        let gap = val::<T>(c1).abs_diff(val(c2));
        let r = stability_chain_check(&x1, &x2, 1, SearchOptions::default(), DEFAULT_NODE_BUDGET)
            .map_err(|e| e.to_string())?;
        let (db, hat, gh2) = r.row();
        let what = format!("({a},{b},{c1},{c2})");
        expect_ext(&format!("{what} d_B"), db, Extended::Finite(T::zero()), &mut errs);
        expect_ext(&format!("{what} hatdb"), hat, Extended::Finite(gap), &mut errs);
        expect_ext(&format!("{what} 2 d_GH"), Extended::Finite(gh2), Extended::Finite(gap), &mut errs);
        expect_true(&format!("{what} stability chain"), r.passed(), &mut errs);
    }
    finish(errs)
}

fn same_set_bounds<T: Real>(data: &DataSet) -> Outcome {
    let d = [data.space::<T>("d0.txt")?, data.space::<T>("d1.txt")?, data.space::<T>("d2.txt")?];
    let mut errs = Vec::new();
    // (pair, |Δdiam|, d_I, min bijection distortion, sup distance)
    for ((i, j), lower, di, bij, upper) in [((0, 1), "1", "1", "1", "2"), ((1, 2), "0", "1", "1", "1")] {
        let (fa, fb) = (family(&d[i])?, family(&d[j])?);
        let r = di_bounds_check(&d[i], &d[j], &fa, &fb).map_err(|e| e.to_string())?;
        let what = format!("(d{i}, d{j})");
        expect_ext(&format!("{what} |Δdiam|"), Extended::Finite(r.lower), ext(lower), &mut errs);
        expect_ext(&format!("{what} d_I"), r.di, ext(di), &mut errs);
        expect_ext(&format!("{what} ‖d - d'‖∞"), Extended::Finite(r.upper), ext(upper), &mut errs);
        let (dis, _) = d[i].min_bijection_distortion(&d[j]).map_err(|e| e.to_string())?;
        expect_ext(&format!("{what} min bijection distortion"), Extended::Finite(dis), ext(bij), &mut errs);
        expect_true(&format!("{what} bounds hold"), r.holds(), &mut errs);
        expect_true(&format!("{what} d_I ≤ bijection distortion"), r.di.within(Extended::Finite(dis)), &mut errs);
    }
    finish(errs)
}

fn elementary<T: Real>(_: &DataSet) -> Outcome {
    let mut errs = Vec::new();
    let e = |a: &str, k: usize| {
        let mut fam: Vec<Barcode<T>> = (0..k).map(Barcode::empty).collect();
        fam.push(bc(k, &[(a, a, 1)]));
        fam
    };
    expect_ext("E(1,1,1) vs E(5/2,5/2,1)", interleaving_distance(&e("1", 1), &e("5/2", 1)), ext("3/2"), &mut errs);
    expect_ext("E(1,1,0) vs E(1,1,1)", interleaving_distance(&e("1", 0), &e("1", 1)), ext("inf"), &mut errs);
    finish(errs)
}

/// Runs every reference check in numeric mode `T`.
pub fn verify_paper<T: Real>(data: &DataSet) -> Vec<Check> {
    let checks: Vec<(&str, fn(&DataSet) -> Outcome)> = vec![
        ("four-point X, Y: verbose barcodes, fci/fhe", four_point_barcodes::<T>),
        ("five-point X, Y: equal verbose barcodes, not isometric", five_point_barcodes::<T>),
        ("barcode cardinalities of the bundled spaces", cardinalities::<T>),
        ("pullback X ⊔ {x3}, Y ⊔ {y3}: barcodes and zero pullback distance", pullback_extra_copy::<T>),
        ("two-point family: degree-0 pullback distance and 2 d_GH", two_point_family::<T>),
        ("one point vs Δ_n(ε): pullback distances and 2 d_GH", one_point_vs_simplex::<T>),
        ("four-space table: d_B in degrees 0 and 1", table_db::<T>),
        ("four-space table: certified pullback bottleneck in degrees 0 and 1", table_hatdb::<T>),
        ("four-space table: 2 d_GH", table_gh::<T>),
        ("three-point pair table: (d_B, hatdb, 2 d_GH)", three_point_table::<T>),
        ("same vertex set: diameter gap ≤ d_I ≤ sup distance", same_set_bounds::<T>),
        ("elementary complexes: interleaving distance", elementary::<T>),
    ];
    checks
        .into_iter()
        .map(|(name, f)| {
            let (passed, detail) = match f(data) {
                Ok(_) => (true, String::new()),
                Err(e) => (false, e),
            };
            Check { name: name.to_string(), passed, detail }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, Float};

    #[test]
    fn bundled_checks_pass_exact() {
        for c in verify_paper::<Exact>(&DataSet::bundled()) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn bundled_checks_pass_float() {
        for c in verify_paper::<Float>(&DataSet::bundled()) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn tampered_file_fails_by_name() {
        let mut data = DataSet::bundled();
        data.files.insert("z4.txt".into(), "4\n0 1 1 1\n1 0 1 1\n1 1 0 1\n1 1 1 0.5\n".into());
        let failed: Vec<Check> = verify_paper::<Exact>(&data).into_iter().filter(|c| !c.passed).collect();
        assert!(!failed.is_empty());
        assert!(failed.iter().all(|c| c.name.starts_with("four-space") || c.name.starts_with("barcode")));
    }
}
