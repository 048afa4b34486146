//! Building tables: binning raw values, percent tables, cumulative input
//! and the validation errors they can raise.

use bincdf::binned::{augment_curve, bin_sample, to_cumulative, validate_table, RawTable, TerminalMode, UpperLimit};
use bincdf::distributions::DistributionSpec;

fn main() -> bincdf::Result<()> {
    let spec = DistributionSpec::normal(3.0, 1.0, (0.0, 10.0))?;
    let sample = spec.sample(500, 3);
    let edges = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0];
    let table = validate_table(bin_sample(&sample, &edges)?)?;
    println!("counts {:?}, n = {:?}", table.weights(), table.n());
    println!("cumulative {:?}", table.cumulative());

    // values on a threshold fall into the lower bin
    let t = bin_sample(&[0.0, 1.0, 1.5, 2.0], &[0.0, 1.0, 2.0])?;
    println!("edge handling: {:?}", t.weights);

    let pct = validate_table(RawTable::percent(vec![0.0, 10.0, 30.0, 60.0, 90.0], vec![21.4, 50.9, 22.7, 5.0]))?;
    println!("percent table normalized to {:?}", pct.proportions());

    let cum = RawTable::from_cumulative_percent(&[0.0, 6.0, 16.0], &[0.0, 80.9, 92.2], Some(180.0))?;
    let delays = validate_table(cum)?;
    let curve = to_cumulative(&delays);
    let extended = augment_curve(&curve, &[(300.0, 1.0)], None)?;
    let moved = augment_curve(&curve, &[], Some(UpperLimit { tau: 60.0, mode: TerminalMode::Move }))?;
    println!("nodes {:?}", extended.points().collect::<Vec<_>>());
    println!("moved {:?}", moved.points().collect::<Vec<_>>());

    let failures = [
        RawTable::percent(vec![0.0, 5.0, 10.0, 25.0, 50.0, 100.0], vec![27.5, 22.6]),
        RawTable::counts(vec![0.0, 2.0, 1.0], vec![1.0, 1.0]),
        RawTable::counts(vec![0.0, 1.0, 2.0], vec![1.0, -1.0]),
        RawTable::proportions(vec![0.0, 1.0, 2.0], vec![0.3, 0.3]),
    ];
    for raw in failures {
        println!("rejected: {}", validate_table(raw).unwrap_err());
    }
    Ok(())
}
