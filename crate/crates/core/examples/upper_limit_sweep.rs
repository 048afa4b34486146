//! How the choice of the unknown upper limit moves the July estimates.

use bincdf::cli::{sweep_csv, sweep_upper, EstimateOptions};
use bincdf::datasets::{delay_input, TrainCategory};

fn main() -> bincdf::Result<()> {
    let input = delay_input("Jul", TrainCategory::LongDistance)?;
    let rows = sweep_upper(&input, &[30.0, 60.0, 120.0, 180.0], &EstimateOptions::default())?;
    print!("{}", sweep_csv(&rows));

    for method in ["S", "H", "E", "K"] {
        let means: Vec<String> = rows
            .iter()
            .filter(|r| r.method.to_string() == method && r.metric == "mean")
            .map(|r| format!("{:.2}", r.value))
            .collect();
        println!("{method} means: {}", means.join(" < "));
    }
    Ok(())
}
