//! Default experiment: vanilla PS, naive PS and warmPref-PS on the same draws.

use prefbandit::harness::{run_experiment, ExperimentConfig};

fn main() -> prefbandit::Result<()> {
    let cfg = ExperimentConfig {
        seeds: 10,
        ..ExperimentConfig::default()
    };
    let res = run_experiment(&cfg)?;
    for c in res.curves.values() {
        println!("{:<12} {:>8.3} ± {:.3}", c.agent.name(), c.final_mean(), c.final_std());
    }
    let dir = std::env::temp_dir().join("prefbandit-simulate");
    prefbandit::harness::write_experiment(&res, &dir)?;
    println!("csv files in {}", dir.display());
    Ok(())
}
