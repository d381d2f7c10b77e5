mod common;

use common::{q, random_coarse_metric, random_metric, rng, DEFAULT_SEED};
use itertools::Itertools;
use proptest::prelude::*;
use rand::Rng;
use verbose_ph::barcode::{cardinality_check, vr_barcode, vr_barcodes, BarcodeOptions};
use verbose_ph::pullback::{
    hatdb0_spaces, hatdb_search, hatdb_upper_bound, pullback_barcode_closed_form, pullback_barcode_deg1,
    pullback_barcode_direct, PullbackSpec, SearchOptions,
};
use verbose_ph::reduce::ReduceOptions;
use verbose_ph::{Exact, Extended, FiniteMetricSpace};

fn arb_space(max_n: usize) -> impl Strategy<Value = FiniteMetricSpace<Exact>> {
    (1..=max_n, any::<u64>(), any::<bool>()).prop_map(|(n, seed, coarse)| {
        let mut r = rng(seed);
        if coarse {
            random_coarse_metric(&mut r, n)
        } else {
            random_metric(&mut r, n, false)
        }
    })
}

/// Every sorted repeat list of length `m` over `0..n`.
fn repeat_patterns(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..n).combinations_with_replacement(m).collect()
}

#[test]
fn closed_form_matches_reduction_exhaustively() {
    let mut r = rng(DEFAULT_SEED);
    for n in 1..=4 {
        for _ in 0..3 {
            let x = random_metric(&mut r, n, false);
            for m in 0..=3 {
                for repeats in repeat_patterns(n, m) {
                    let spec = PullbackSpec::new(x.clone(), repeats.clone()).unwrap();
                    for k in 0..n + m {
                        let bx = vr_barcode(&x, k, ReduceOptions::default()).unwrap();
                        let closed = pullback_barcode_closed_form(&spec, &bx, k).unwrap();
                        let direct = pullback_barcode_direct(&spec, k, ReduceOptions::default()).unwrap();
                        assert_eq!(closed, direct, "X={:?} repeats={repeats:?} k={k}", x.rows());
                        assert_eq!(closed.len(), cardinality_check(n + m, k));
                    }
                }
            }
        }
    }
}

#[test]
fn degree_one_formula() {
    let mut r = rng(DEFAULT_SEED ^ 1);
    for _ in 0..60 {
        let n = r.gen_range(2..=5);
        let x = random_metric(&mut r, n, false);
        let extra: Vec<usize> = (0..n).map(|_| r.gen_range(0..=2)).collect();
        let spec = PullbackSpec::from_multiplicities(x.clone(), &extra).unwrap();
        let bx = vr_barcode(&x, 1, ReduceOptions::default()).unwrap();
        assert_eq!(
            pullback_barcode_deg1(&x, &bx, &extra).unwrap(),
            pullback_barcode_closed_form(&spec, &bx, 1).unwrap()
        );
    }
}

#[test]
fn degree_zero_formula_matches_search() {
    let mut r = rng(DEFAULT_SEED ^ 2);
    for _ in 0..30 {
        let (nx, ny) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let x = random_metric(&mut r, nx, false);
        let y = random_metric(&mut r, ny, false);
        let opts = SearchOptions { max_extra: 2, ..SearchOptions::default() };
        let searched = hatdb_search(&x, &y, 0, opts).unwrap();
        assert_eq!(searched.bound, Extended::Finite(hatdb0_spaces(&x, &y).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn concise_barcode_survives_pullback(x in arb_space(4), seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.gen_range(0..=3);
        let repeats: Vec<usize> = (0..m).map(|_| r.gen_range(0..x.len())).sorted().collect();
        let spec = PullbackSpec::new(x.clone(), repeats).unwrap();
        let z = spec.space();
        let fx = vr_barcodes(&x, BarcodeOptions::default()).unwrap();
        let fz = vr_barcodes(&z, BarcodeOptions::default()).unwrap();
        for (k, bz) in fz.iter().enumerate() {
            let cx = fx.get(k).map(|b| b.concise()).unwrap_or_else(|| verbose_ph::Barcode::empty(k));
            prop_assert_eq!(bz.concise(), cx);
            prop_assert_eq!(bz.len(), cardinality_check(x.len() + m, k));
        }
    }

    #[test]
    fn search_is_monotone_and_sandwiched(x in arb_space(3), y in arb_space(3), k in 0usize..=1) {
        let mut last = Extended::Infinite;
        for max_extra in 0..=2 {
            let opts = SearchOptions { max_extra, ..SearchOptions::default() };
            let rep = hatdb_search(&x, &y, k, opts).unwrap();
            prop_assert!(rep.bound <= last);
            prop_assert!(rep.db_concise <= rep.bound);
            prop_assert!(rep.lower_bound <= rep.bound);
            last = rep.bound;
        }
        let upper = hatdb_upper_bound(&x, &y, k, SearchOptions::default()).unwrap();
        prop_assert!(upper.db_concise <= upper.bound);
    }

    #[test]
    fn distance_to_itself_is_zero(x in arb_space(4), k in 0usize..=2) {
        let rep = hatdb_upper_bound(&x, &x, k, SearchOptions::default()).unwrap();
        prop_assert_eq!(rep.bound, Extended::Finite(q(0, 1)));
        prop_assert!(rep.certified);
    }
}
