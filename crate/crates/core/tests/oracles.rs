mod common;

use bincdf::baselines::{check_levels, linear_quantile, Method};
use bincdf::binned::{bin_sample, to_cumulative, validate_table};
use bincdf::cli::fit_spline;
use bincdf::datasets::{commute_table, delay_table, Commute, TrainCategory, Workers};
use bincdf::distributions::DistributionSpec;
use bincdf::mics::MonotoneCubicCdf;
use bincdf::sim::{binned_reports, make_edges, run_study, summarize, Execution, Metric, SimConfig};
use common::*;

fn january_spline() -> MonotoneCubicCdf {
    let table = delay_table("Jan", TrainCategory::LongDistance, 180.0).unwrap();
    fit_spline(&table, &[(300.0, 1.0)]).unwrap()
}

#[test]
fn january_mean_matches_riemann_sum() {
    let s = january_spline();
    let (mean, sd) = s.moments().unwrap();
    let n = 1_000_000;
    let (lo, hi) = (s.lower(), s.upper());
    let h = (hi - lo) / n as f64;
    let (mut m1, mut m2) = (0.0, 0.0);
    for i in 0..n {
        let tau = lo + (i as f64 + 0.5) * h;
        let w = s.pdf(tau) * h;
        m1 += tau * w;
        m2 += tau * tau * w;
    }
    assert!((mean - m1).abs() / m1 <= 1e-6, "{mean} vs {m1}");
    assert!((sd - (m2 - m1 * m1).sqrt()).abs() / sd <= 1e-6);
}

#[test]
fn density_integrates_to_one() {
    for s in [
        january_spline(),
        MonotoneCubicCdf::fit(&to_cumulative(&commute_table(Commute::Distance, Workers::All).unwrap())).unwrap(),
    ] {
        let pieces: f64 = s
            .knots()
            .windows(2)
            .map(|w| integrate(&|t| s.pdf(t), w[0], w[1], 1e-13))
            .sum();
        assert!((pieces - 1.0).abs() <= 1e-9, "{pieces}");
        assert_eq!(s.cdf(s.lower()), 0.0);
        assert_eq!(s.cdf(s.upper()), 1.0);
    }
}

#[test]
fn gamma_binned_spline_round_trip() {
    let spec = DistributionSpec::gamma(1.0, 2.0, (0.0, 8.0)).unwrap();
    let xs = spec.sample(1000, 99);
    let table = validate_table(bin_sample(&xs, &make_edges(&spec, 6).unwrap()).unwrap()).unwrap();
    let s = MonotoneCubicCdf::fit(&to_cumulative(&table)).unwrap();
    for i in 1..100 {
        let q = i as f64 / 100.0;
        assert!((s.cdf(s.quantile(q).unwrap()) - q).abs() <= 1e-8);
    }
}

#[test]
fn monte_carlo_functionals() {
    let n = 10_000_000;
    for (spec, mean, sd) in [
        (DistributionSpec::gumbel(1.0, 2.0, (-40.0, 80.0)).unwrap(), 1.0 + 2.0 * 0.5772156649015329, 2.0 * std::f64::consts::PI / 6f64.sqrt()),
        (DistributionSpec::triangular(0.0, 1.0, 0.5, (0.0, 1.0)).unwrap(), 0.5, (1.0f64 / 24.0).sqrt()),
    ] {
        let xs = spec.sample_untruncated(n, 2024);
        let m = xs.iter().sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
        let se = sd / (n as f64).sqrt();
        assert!((spec.mean() - mean).abs() < 1e-12 && (spec.sd() - sd).abs() < 1e-12);
        assert!((m - mean).abs() < 6.0 * se, "{spec}: mean {m}");
        assert!((v.sqrt() - sd).abs() < 0.002 * sd, "{spec}: sd {}", v.sqrt());
        let mut sorted = xs;
        sorted.sort_by(f64::total_cmp);
        let median = sorted[n / 2];
        assert!((median - spec.quantile(0.5).unwrap()).abs() < 0.01 * sd);
    }
}

#[test]
fn commute_time_median_by_interpolation() {
    let t = commute_table(Commute::Time, Workers::All).unwrap();
    let hand = 10.0 + (50.0 - 21.4) / 50.9 * 20.0;
    assert!((linear_quantile(&t, 0.5).unwrap() - hand).abs() < 1e-9);
    assert!((hand - 21.238).abs() < 1e-3);
}

#[test]
fn binned_quantiles_ordered_and_in_range() {
    let levels = [0.05, 0.25, 0.5, 0.75, 0.95];
    check_levels(&levels).unwrap();
    for (d, spec) in DistributionSpec::study_defaults().iter().enumerate() {
        let edges = make_edges(spec, 6).unwrap();
        for rep in 0..20 {
            let xs = spec.sample(100, 1000 * d as u64 + rep);
            let table = validate_table(bin_sample(&xs, &edges).unwrap()).unwrap();
            for r in binned_reports(&table, &levels).unwrap() {
                assert!(r.quantiles.windows(2).all(|w| w[0] <= w[1]), "{spec} {}", r.method);
                assert!(
                    r.quantiles.iter().all(|&q| q >= edges[0] && q <= *edges.last().unwrap()),
                    "{spec} {} {:?}",
                    r.method,
                    r.quantiles
                );
            }
        }
    }
}

#[test]
fn normal_study_median_direction() {
    let config = SimConfig {
        distributions: vec![DistributionSpec::normal(3.0, 1.0, (0.0, 10.0)).unwrap()],
        sample_sizes: vec![1000],
        replicates: 1000,
        master_seed: 5,
        ..SimConfig::default()
    };
    let summary = summarize(&run_study(&config, Execution::Parallel).unwrap()).unwrap();
    let label = config.distributions[0].to_string();
    let med = |m| summary.cell(&label, 1000, m, &Metric::quantile(0.5)).unwrap().summary.median.abs();
    assert!(med(Method::Spline) < med(Method::Ecdf));
    assert!(med(Method::Spline) < med(Method::Kernel));
    for c in &summary.cells {
        assert_eq!(c.deltas.len(), 1000);
    }
}
