//! Sample-complexity and regret-bound quantities for the default setting.

use prefbandit::harness::{report_inputs, ExperimentConfig};
use prefbandit::theory::bound_report;

fn main() -> prefbandit::Result<()> {
    let inputs = report_inputs(&ExperimentConfig::default())?;
    print!("{}", bound_report(&inputs).to_json());

    // Tβ ≤ 1 leaves δ undefined.
    let weak = ExperimentConfig {
        true_beta: 0.001,
        ..ExperimentConfig::default()
    };
    let r = bound_report(&report_inputs(&weak)?);
    println!("weak rater delta: {}", r.to_json_value()["delta"]);
    Ok(())
}
