//! Monthly delay characteristics of long-distance trains, closing the
//! tables at 180 minutes with a pseudo node at (300, 1) for the spline.

use bincdf::baselines::{ecdf_estimator, heuristic_stats, kernel_estimator, spline_report, HeuristicOptions, KernelOptions};
use bincdf::cli::fit_spline;
use bincdf::datasets::{delay_table, TrainCategory, DEFAULT_DELAY_LIMIT, DELAY_PSEUDO_NODE, MONTHS};

fn main() -> bincdf::Result<()> {
    let levels = [0.25, 0.5, 0.75];
    println!("month   S mean (IQR)     H mean (IQR)     E mean (IQR)     K mean (IQR)");
    let mut totals = [(0.0, 0.0); 4];
    for month in MONTHS {
        let table = delay_table(month, TrainCategory::LongDistance, DEFAULT_DELAY_LIMIT)?;
        let spline = fit_spline(&table, &[DELAY_PSEUDO_NODE])?;
        let reports = [
            spline_report(&spline, &levels)?,
            heuristic_stats(&table, &levels, HeuristicOptions::default())?,
            ecdf_estimator(&table, &levels)?,
            kernel_estimator(&table, &levels, KernelOptions::default())?,
        ];
        print!("{month:<5}");
        for (r, t) in reports.iter().zip(totals.iter_mut()) {
            print!("  {:>6.2} ({:>5.2})  ", r.mean, r.iqr);
            t.0 += r.mean / 12.0;
            t.1 += r.iqr / 12.0;
        }
        println!();
    }
    print!("avg  ");
    for (m, i) in totals {
        print!("  {m:>6.2} ({i:>5.2})  ");
    }
    println!();

    let jan = delay_table("Jan", TrainCategory::LongDistance, DEFAULT_DELAY_LIMIT)?;
    let spline = fit_spline(&jan, &[DELAY_PSEUDO_NODE])?;
    println!("January: S(6) = {}, median {:.3} min", spline.cdf(6.0), spline.quantile(0.5)?);
    Ok(())
}
