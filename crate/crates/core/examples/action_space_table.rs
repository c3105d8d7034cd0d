//! Regret across arm dimension and correlation.

use prefbandit::harness::{run_action_space_study, write_table1_csv, ExperimentConfig};

fn main() -> prefbandit::Result<()> {
    let base = ExperimentConfig {
        seeds: 5,
        ..ExperimentConfig::default()
    };
    let rows = run_action_space_study(&base)?;
    write_table1_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
