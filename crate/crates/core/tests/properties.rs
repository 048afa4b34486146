mod common;

use bincdf::baselines::{BinnedEcdf, EstimatorReport, Method};
use bincdf::binned::{bin_sample, validate_table, RawTable};
use bincdf::mics::{hyman_filter, MonotoneCubicCdf};
use bincdf::sim::{paired_differences, Metric, TrueValues};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spline_from_seed(seed: u64) -> MonotoneCubicCdf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MonotoneCubicCdf::fit(&random_curve(&mut rng, 12)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spline_interpolates_nodes(seed in any::<u64>()) {
        prop_assert!(interpolation_error(&spline_from_seed(seed)) <= 1e-12);
    }

    #[test]
    fn spline_is_monotone(seed in any::<u64>()) {
        prop_assert!(min_grid_derivative(&spline_from_seed(seed), 2001) >= -1e-12);
    }

    #[test]
    fn spline_is_c1(seed in any::<u64>()) {
        prop_assert!(c1_mismatch(&spline_from_seed(seed)) <= 1e-10);
    }

    #[test]
    fn quantile_inverts_cdf(seed in any::<u64>()) {
        prop_assert!(roundtrip_error(&spline_from_seed(seed)) <= 1e-8);
    }

    #[test]
    fn quantile_is_leftmost(seed in any::<u64>(), q in 0.0f64..=1.0) {
        let s = spline_from_seed(seed);
        let tau = s.quantile(q).unwrap();
        let below = tau - 1e-7 * (s.upper() - s.lower());
        prop_assert!(below < s.lower() || s.cdf(below) < q + 1e-10);
    }

    #[test]
    fn monotone_region_after_filter(seed in any::<u64>()) {
        let s = spline_from_seed(seed);
        for (j, &m) in s.gradients().iter().enumerate() {
            prop_assert!(s.slopes()[j] >= 0.0 && s.slopes()[j + 1] >= 0.0);
            if m > 0.0 {
                prop_assert!(s.slopes()[j] <= 3.0 * m && s.slopes()[j + 1] <= 3.0 * m);
            } else {
                prop_assert!(s.slopes()[j] == 0.0 && s.slopes()[j + 1] == 0.0);
            }
        }
    }

    #[test]
    fn filter_is_idempotent(
        grads in prop::collection::vec(0.0f64..5.0, 1..10),
        raw in prop::collection::vec(-10.0f64..10.0, 11),
    ) {
        let slopes = &raw[..grads.len() + 1];
        let once = hyman_filter(slopes, &grads);
        prop_assert_eq!(hyman_filter(&once, &grads), once);
    }

    #[test]
    fn linear_curves_are_reproduced(n in 2usize..12, lo in -10.0f64..10.0, w in 0.1f64..5.0) {
        let taus: Vec<f64> = (0..n).map(|i| lo + w * i as f64).collect();
        let probs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let s = MonotoneCubicCdf::fit(&bincdf::binned::CumulativeCurve::new(taus, probs).unwrap()).unwrap();
        prop_assert!(s.quadratic().iter().chain(s.cubic()).all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn binning_ignores_order(mut xs in prop::collection::vec(0.0f64..=10.0, 1..200), seed in any::<u64>()) {
        let edges = [0.0, 1.5, 4.0, 7.0, 10.0];
        let a = bin_sample(&xs, &edges).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(xs.as_mut_slice(), &mut rng);
        prop_assert_eq!(bin_sample(&xs, &edges).unwrap(), a);
    }

    #[test]
    fn binned_ecdf_matches_sample_ecdf_at_edges(xs in prop::collection::vec(0.0f64..=10.0, 1..200)) {
        let edges = [0.0, 1.5, 4.0, 7.0, 10.0];
        let e = BinnedEcdf::new(&validate_table(bin_sample(&xs, &edges).unwrap()).unwrap()).unwrap();
        for &t in &edges {
            let direct = xs.iter().filter(|&&x| x <= t).count() as f64 / xs.len() as f64;
            prop_assert!((e.cdf(t) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn differences_round_trip(
        truth in prop::collection::vec(-100.0f64..100.0, 5),
        est in prop::collection::vec(-100.0f64..100.0, 5),
    ) {
        let levels = [0.25, 0.5, 0.75];
        let tv = TrueValues { levels: levels.to_vec(), quantiles: truth[..3].to_vec(), mean: truth[3], sd: truth[4] };
        let mut report = EstimatorReport::build(Method::Spline, &levels, |q| Ok(est[(q * 4.0) as usize - 1]), est[3], est[4]).unwrap();
        report.iqr = 0.0;
        let d = paired_differences(&tv, &report).unwrap();
        for (i, (metric, delta)) in d.iter().enumerate() {
            let back = truth[i] - delta;
            prop_assert!((back - est[i]).abs() <= 1e-12 * (1.0 + est[i].abs() + truth[i].abs()), "{metric}");
        }
        prop_assert_eq!(&d[3].0, &Metric::Mean);
    }
}

#[test]
fn percent_rounding_slack() {
    assert!(validate_table(RawTable::percent(vec![0.0, 1.0, 2.0], vec![50.3, 50.1])).is_ok());
    assert!(validate_table(RawTable::percent(vec![0.0, 1.0, 2.0], vec![50.3, 50.3])).is_err());
}
