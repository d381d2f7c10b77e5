mod common;

use common::{mst_weights, q, random_coarse_metric, random_metric, rng, second_reduction, DEFAULT_SEED};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use verbose_ph::barcode::{cardinality_check, decompose_elementary, vr_barcodes, BarcodeOptions};
use verbose_ph::complex::{size_cap, FilteredComplex, TieBreak};
use verbose_ph::field::PrimeField;
use verbose_ph::reduce::{reduce, ReduceOptions};
use verbose_ph::svd_check::{check_svd, DEFAULT_ORACLE_CAP};
use verbose_ph::{Exact, Extended, FiniteMetricSpace};

fn arb_space(max_n: usize) -> impl Strategy<Value = FiniteMetricSpace<Exact>> {
    (1..=max_n, any::<u64>(), any::<bool>()).prop_map(|(n, seed, coarse)| {
        let mut r = rng(seed);
        if coarse {
            random_coarse_metric(&mut r, n)
        } else {
            random_metric(&mut r, n, true)
        }
    })
}

fn subset_diameters(x: &FiniteMetricSpace<Exact>) -> Vec<Exact> {
    (1u32..1 << x.len())
        .map(|mask| {
            let pts: Vec<usize> = (0..x.len()).filter(|&v| mask >> v & 1 == 1).collect();
            x.diameter_of(&pts)
        })
        .collect()
}

#[test]
fn agrees_with_second_reduction() {
    let mut r = rng(DEFAULT_SEED);
    for _ in 0..150 {
        let n = r.gen_range(1..=7);
        let x = if r.gen_bool(0.5) { random_coarse_metric(&mut r, n) } else { random_metric(&mut r, n, true) };
        let ours = vr_barcodes(&x, BarcodeOptions::default()).unwrap();
        let theirs = second_reduction(&x);
        for k in 0..n {
            assert_eq!(ours[k].points(), &theirs[k][..], "degree {k} of {:?}", x.rows());
        }
    }
}

#[test]
fn degree_zero_is_single_linkage() {
    let mut r = rng(DEFAULT_SEED ^ 1);
    for _ in 0..200 {
        let n = r.gen_range(1..=8);
        let x = random_metric(&mut r, n, true);
        let b0 = verbose_ph::barcode::vr_barcode(&x, 0, ReduceOptions::default()).unwrap();
        let mut deaths: Vec<Exact> = b0.points().iter().filter_map(|p| p.1.finite()).collect();
        deaths.sort();
        assert_eq!(deaths, mst_weights(&x));
        assert!(b0.points().iter().all(|p| p.0 == q(0, 1)));
        assert_eq!(b0.points().iter().filter(|p| p.1.is_infinite()).count(), 1);
    }
}

#[test]
fn coefficients_in_other_fields() {
    // Vietoris-Rips complexes of tiny spaces have torsion-free homology, so the field
    // only changes the bases, not the barcodes.
    let mut r = rng(DEFAULT_SEED ^ 2);
    for _ in 0..40 {
        let n = r.gen_range(2..=6);
        let x = random_metric(&mut r, n, false);
        let base = vr_barcodes(&x, BarcodeOptions::default()).unwrap();
        for p in [3, 5, 7] {
            let opts = BarcodeOptions {
                max_dim: None,
                reduce: ReduceOptions { field: PrimeField::new(p).unwrap(), clearing: true },
            };
            assert_eq!(vr_barcodes(&x, opts).unwrap(), base, "p = {p}");
        }
    }
}

#[test]
fn svd_bases_check_out() {
    let mut r = rng(DEFAULT_SEED ^ 3);
    for _ in 0..30 {
        let n = r.gen_range(1..=4);
        let x = random_coarse_metric(&mut r, n);
        let complex = FilteredComplex::build(&x, n - 1).unwrap();
        for (p, clearing) in [(2, true), (2, false), (3, true)] {
            let opts = ReduceOptions { field: PrimeField::new(p).unwrap(), clearing };
            let report = check_svd(&complex, &reduce(&complex, opts), DEFAULT_ORACLE_CAP).unwrap();
            assert!(report.passed(), "{:?}", report.violations);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cardinalities(x in arb_space(7)) {
        let family = vr_barcodes(&x, BarcodeOptions::default()).unwrap();
        for (k, bc) in family.iter().enumerate() {
            prop_assert_eq!(bc.len(), cardinality_check(x.len(), k));
        }
    }

    #[test]
    fn isometry_invariance(x in arb_space(6), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..x.len()).collect();
        perm.shuffle(&mut rng(seed));
        let y = x.permuted(&perm).unwrap();
        prop_assert_eq!(
            vr_barcodes(&x, BarcodeOptions::default()).unwrap(),
            vr_barcodes(&y, BarcodeOptions::default()).unwrap()
        );
    }

    #[test]
    fn order_and_clearing_do_not_matter(x in arb_space(6)) {
        let top = x.len() - 1;
        let lex = FilteredComplex::build_with(&x, top, size_cap(), TieBreak::Lex).unwrap();
        let rev = FilteredComplex::build_with(&x, top, size_cap(), TieBreak::RevLex).unwrap();
        let a = reduce(&lex, ReduceOptions::default());
        let b = reduce(&rev, ReduceOptions { clearing: false, ..ReduceOptions::default() });
        for k in 0..=top {
            prop_assert_eq!(
                verbose_ph::barcode::verbose_barcode(&a, k).unwrap(),
                verbose_ph::barcode::verbose_barcode(&b, k).unwrap()
            );
        }
    }

    #[test]
    fn endpoints_are_subset_diameters(x in arb_space(6)) {
        let diams = subset_diameters(&x);
        for bc in vr_barcodes(&x, BarcodeOptions::default()).unwrap() {
            for &(b, d) in bc.points() {
                prop_assert!(diams.contains(&b));
                if let Extended::Finite(d) = d {
                    prop_assert!(b <= d);
                    prop_assert!(diams.contains(&d));
                }
            }
        }
    }

    #[test]
    fn elementary_dimensions_sum_to_simplex_count(x in arb_space(7)) {
        let n = x.len();
        let complex = FilteredComplex::build(&x, n - 1).unwrap();
        let summands = decompose_elementary(&reduce(&complex, ReduceOptions::default()));
        let total: usize = summands.iter().map(|e| e.dimension()).sum();
        prop_assert_eq!(total, (1 << n) - 1);
        prop_assert_eq!(summands.iter().filter(|e| e.death.is_infinite()).count(), 1);
    }

    #[test]
    fn concise_drops_exactly_the_diagonal(x in arb_space(6)) {
        for bc in vr_barcodes(&x, BarcodeOptions::default()).unwrap() {
            let concise = bc.concise();
            let off: Vec<_> = bc.points().iter().copied().filter(|p| p.1 != Extended::Finite(p.0)).collect();
            prop_assert_eq!(concise.points(), &off[..]);
        }
    }
}
