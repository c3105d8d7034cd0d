//! Running warmPref-PS with β estimated from the offline data.

use prefbandit::agents::AgentKind;
use prefbandit::estimation::BetaMethod;
use prefbandit::harness::{run_experiment, AgentBeta, ExperimentConfig};

fn main() -> prefbandit::Result<()> {
    let choices = [
        ("true beta", AgentBeta::Matched),
        ("mle", AgentBeta::Estimated(BetaMethod::Mle)),
        ("entropy", AgentBeta::Estimated(BetaMethod::Entropy)),
    ];
    for (label, agent_beta) in choices {
        let cfg = ExperimentConfig {
            true_lambda: 1e4,
            agent_beta,
            agents: vec![AgentKind::WarmPrefPs],
            seeds: 10,
            ..ExperimentConfig::default()
        };
        let res = run_experiment(&cfg)?;
        let c = res.curve(AgentKind::WarmPrefPs).unwrap();
        let betas: Vec<String> = res.agent_beta.iter().map(|b| format!("{b:.2}")).collect();
        println!("{label:<10} regret {:.3} ± {:.3}  beta used [{}]", c.final_mean(), c.final_std(), betas.join(" "));
    }
    Ok(())
}
