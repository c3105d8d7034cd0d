//! warmTSOF buys comparisons between its top two arms; the cost changes the
//! bill, not the decisions.

use prefbandit::agents::{AgentKind, EpsilonRule, TsofConfig};
use prefbandit::harness::{run_experiment, ExperimentConfig};

fn main() -> prefbandit::Result<()> {
    for cost in [0.0, 0.01, 0.1] {
        let cfg = ExperimentConfig {
            agents: vec![AgentKind::WarmPrefPs, AgentKind::WarmTsof],
            tsof: TsofConfig {
                cost,
                epsilon_rule: EpsilonRule::Constant(0.1),
            },
            seeds: 10,
            ..ExperimentConfig::default()
        };
        let res = run_experiment(&cfg)?;
        let w = res.curve(AgentKind::WarmPrefPs).unwrap();
        let t = res.curve(AgentKind::WarmTsof).unwrap();
        let runs = res.tsof_runs.as_ref().unwrap();
        let queries = runs.iter().map(|r| r.queries).sum::<usize>() as f64 / runs.len() as f64;
        println!(
            "c={cost:<5} warmtsof {:.3} ± {:.3}  warmpref {:.3}  queries/run {queries:.1}",
            t.final_mean(),
            t.final_std(),
            w.final_mean()
        );
    }
    Ok(())
}
