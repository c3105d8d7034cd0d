//! Final regret of warmPref-PS as the rater's knowledgeability grows.

use prefbandit::agents::AgentKind;
use prefbandit::harness::{nonincreasing_with_tolerance, run_sweep, ExperimentConfig, SweepParam, SweepSpec};

fn main() -> prefbandit::Result<()> {
    let spec = SweepSpec {
        parameter: SweepParam::Lambda,
        values: vec![1.0, 10.0, 100.0],
        base: ExperimentConfig {
            seeds: 10,
            agents: vec![AgentKind::VanillaPs, AgentKind::WarmPrefPs],
            ..ExperimentConfig::default()
        },
    };
    let table = run_sweep(&spec)?;
    for r in &table.rows {
        println!("lambda={:<6} {:<12} {:.3} ± {:.3}", r.value, r.agent.name(), r.mean, r.std);
    }
    let series = table.series(AgentKind::WarmPrefPs);
    println!("nonincreasing: {}", nonincreasing_with_tolerance(&series));
    Ok(())
}
