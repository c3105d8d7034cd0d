//! Offline labels from a rater that always picks its believed-better arm.

use prefbandit::harness::{run_experiment, ExperimentConfig};
use prefbandit::offline_data::PolicyKind;

fn main() -> prefbandit::Result<()> {
    let cfg = ExperimentConfig {
        true_lambda: 10.0,
        expert_policy: PolicyKind::DeterministicGreedy,
        seeds: 10,
        ..ExperimentConfig::default()
    };
    for c in run_experiment(&cfg)?.curves.values() {
        println!("{:<12} {:.3} ± {:.3}", c.agent.name(), c.final_mean(), c.final_std());
    }
    Ok(())
}
