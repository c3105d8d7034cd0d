//! The agent assumes a knowledgeability different from the rater's.

use prefbandit::agents::AgentKind;
use prefbandit::harness::{run_experiment, AgentLambda, ExperimentConfig};

fn main() -> prefbandit::Result<()> {
    for assumed in [1.0, 10.0, 100.0] {
        let cfg = ExperimentConfig {
            true_lambda: 10.0,
            agent_lambda: AgentLambda::Value(assumed),
            agents: vec![AgentKind::VanillaPs, AgentKind::WarmPrefPs],
            seeds: 10,
            ..ExperimentConfig::default()
        };
        let res = run_experiment(&cfg)?;
        let v = res.curve(AgentKind::VanillaPs).unwrap().final_mean();
        let w = res.curve(AgentKind::WarmPrefPs).unwrap().final_mean();
        println!("agent lambda {assumed:>5}: warmpref {w:.3}  vanilla {v:.3}");
    }
    Ok(())
}
