//! Truncated generators used by the simulation and their exact functionals.

use bincdf::distributions::{DistributionSpec, Functional};

fn main() -> bincdf::Result<()> {
    for spec in DistributionSpec::study_defaults() {
        let xs = spec.sample(100_000, 42);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        println!(
            "{spec:<28} mean {:.4} (sample {mean:.4})  sd {:.4}  median {:.4}  mass outside range {:.5}",
            spec.mean(),
            spec.sd(),
            spec.quantile(0.5)?,
            spec.truncated_mass()
        );
    }

    let custom: DistributionSpec = "triangular:0,10,2@0:10".parse()?;
    println!("{custom}: Q3 = {:.4}", custom.theoretical(Functional::Quantile(0.75))?);
    for bad in ["gev:1,2,0.3@-4:35", "normal:0,-1@-5:5"] {
        if let Err(e) = bad.parse::<DistributionSpec>() {
            println!("{bad}: {e}");
        }
    }
    Ok(())
}
