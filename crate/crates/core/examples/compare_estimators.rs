//! Spline, heuristic, eCDF, kernel and linear-CDF estimates for the
//! bundled commuting tables.

use bincdf::baselines::{
    ecdf_estimator, heuristic_stats, kernel_estimator, pareto_tail, rcfp_estimator, spline_report,
    HeuristicOptions, KernelOptions,
};
use bincdf::binned::to_cumulative;
use bincdf::datasets::{commute_table, Commute, Workers};
use bincdf::mics::MonotoneCubicCdf;

fn main() -> bincdf::Result<()> {
    let levels = [0.25, 0.5, 0.75];
    for (measure, unit) in [(Commute::Distance, "km"), (Commute::Time, "min")] {
        for group in [Workers::All, Workers::SelfEmployed, Workers::Employees] {
            let table = commute_table(measure, group)?;
            let curve = to_cumulative(&table);
            let spline = MonotoneCubicCdf::fit(&curve)?;
            let reports = [
                spline_report(&spline, &levels)?,
                heuristic_stats(&table, &levels, HeuristicOptions::default())?,
                ecdf_estimator(&table, &levels)?,
                kernel_estimator(&table, &levels, KernelOptions::default())?,
                rcfp_estimator(&curve, &levels)?,
            ];
            println!("{measure:?} ({unit}), {group:?}");
            println!("  m      Q1      Q2      Q3    mean      sd");
            for r in &reports {
                println!(
                    "  {} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7.3}",
                    r.method, r.quantiles[0], r.quantiles[1], r.quantiles[2], r.mean, r.sd
                );
            }
        }
    }

    // treat the last distance class as open-ended
    let open = commute_table(Commute::Distance, Workers::All)?.with_upper(f64::INFINITY)?;
    let tail = pareto_tail(&open)?;
    println!(
        "open top class: gamma {:.4}, robust Pareto midpoint {:.2} km",
        tail.gamma_hat, tail.rpme_point
    );
    let h = heuristic_stats(&open, &levels, HeuristicOptions::default())?;
    println!("heuristic mean with Pareto tail {:.3} km", h.mean);
    Ok(())
}
