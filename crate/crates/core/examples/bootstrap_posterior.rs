//! Perturbed-MAP draws with no preference data against the exact conjugate
//! posterior.

use nalgebra::DVector;
use prefbandit::agents::{sample_perturbations, ConjugateState, OnlineHistory, SurrogateLoss};
use prefbandit::environment::{build_action_set, GaussianPrior};
use prefbandit::offline_data::{OfflineDataset, SamplingDistribution};
use prefbandit::optimizer::SolveSettings;
use prefbandit::rng::substream;
use rand::Rng;

fn main() -> prefbandit::Result<()> {
    let mut rng = substream(7, "example");
    let actions = build_action_set(5, 2, 0.1, &mut rng)?;
    let prior = GaussianPrior::standard(2)?;
    let theta = DVector::from_vec(vec![1.0, -0.5]);
    let mut history = OnlineHistory::new();
    let mut exact = ConjugateState::from_prior(&prior);
    for i in 0..40 {
        let a = actions.get(i % 5).clone();
        let r = a.dot(&theta) + rng.random::<f64>() - 0.5;
        exact.observe(&a, r, 1.0);
        history.push(a, r);
    }
    let d0 = OfflineDataset::empty(SamplingDistribution::uniform(5)?);
    let loss = SurrogateLoss::new(&actions, &history, &d0, 0.0, f64::INFINITY, &prior)?;
    let draws: Vec<DVector<f64>> = (0..2000)
        .map(|_| {
            let p = sample_perturbations(history.len() + 1, 0, f64::INFINITY, &prior, &mut rng);
            loss.solve_map(&p, None, &SolveSettings::default()).map(|m| m.theta_hat)
        })
        .collect::<prefbandit::Result<_>>()?;
    let mean = draws.iter().fold(DVector::zeros(2), |acc, x| acc + x) / draws.len() as f64;
    println!("bootstrap mean {:.4?}", mean.as_slice());
    println!("exact mean     {:.4?}", exact.mean()?.as_slice());
    Ok(())
}
