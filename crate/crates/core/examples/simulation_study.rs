//! A small seeded run of the Monte-Carlo comparison.
//!
//! The full study uses 1000 replicates and n in {100, 1000}; see
//! `data/study_defaults.toml` and the `simulate` command.

use bincdf::baselines::Method;
use bincdf::cli::median_table;
use bincdf::sim::{run_study, summarize, Execution, Metric, SimConfig};

const REPLICATES: usize = 50;

fn main() -> bincdf::Result<()> {
    let config = SimConfig {
        sample_sizes: vec![1000],
        replicates: REPLICATES,
        master_seed: 7,
        ..SimConfig::default()
    };
    let results = run_study(&config, Execution::Parallel)?;
    let summary = summarize(&results)?;
    print!("{}", median_table(&summary));

    let gamma = &results.labels[1];
    let median = Metric::quantile(0.5);
    for method in [Method::Spline, Method::Heuristic, Method::Ecdf, Method::Kernel] {
        let cell = summary.cell(gamma, 1000, method, &median).expect("cell");
        println!("{gamma} {method}: median |dQ2| = {:.4}", cell.median_abs);
    }

    let serial = run_study(&config, Execution::Serial)?;
    assert_eq!(serial, results);
    println!("serial and parallel runs agree");
    Ok(())
}
