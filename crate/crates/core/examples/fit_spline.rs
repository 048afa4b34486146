//! Fit the monotone cubic CDF to a count table and inspect it.

use bincdf::binned::{to_cumulative, validate_table, RawTable};
use bincdf::mics::MonotoneCubicCdf;

fn main() -> bincdf::Result<()> {
    let table = validate_table(RawTable::counts(
        vec![0.0, 10.0, 20.0, 40.0, 60.0, 100.0],
        vec![12.0, 35.0, 28.0, 17.0, 8.0],
    ))?;
    let spline = MonotoneCubicCdf::fit(&to_cumulative(&table))?;

    println!("knot      F        slope");
    for ((t, f), b) in spline.knots().iter().zip(spline.values()).zip(spline.slopes()) {
        println!("{t:>5} {f:>8.4} {b:>10.6}");
    }

    for q in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let tau = spline.quantile(q)?;
        println!("Q({q}) = {tau:.4}  S(Q) = {:.10}", spline.cdf(tau));
    }
    let (mean, sd) = spline.moments()?;
    println!("mean {mean:.4}  sd {sd:.4}  iqr {:.4}", spline.iqr()?);

    // density on a coarse grid
    for s in spline.sample_grid(11) {
        println!("{:>6.1} {:.4} {:.5}", s.tau, s.cdf, s.pdf);
    }
    Ok(())
}
