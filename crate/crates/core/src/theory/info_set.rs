//! The data-measurable arm subset `U_{D₀}` and its Monte-Carlo diagnostics.

use std::collections::BTreeSet;

use rand::Rng;

use super::bounds::bound_constants;
use crate::environment::{sample_environment, ActionSet, GaussianPrior};
use crate::error::{Error, Result};
use crate::offline_data::{generate_dataset, sample_rater, OfflineDataset, PolicyKind, RaterCompetence, SamplingDistribution};

/// Arms that are absent from the data or never lost a comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoSet {
    pub member_indices: BTreeSet<usize>,
}

impl InfoSet {
    pub fn contains(&self, arm: usize) -> bool {
        self.member_indices.contains(&arm)
    }

    pub fn len(&self) -> usize {
        self.member_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_indices.is_empty()
    }
}

/// Builds `U = (A \ U_N) ∪ W_{U_N}`. Self-comparisons are neither wins nor
/// losses, but they do count as an appearance.
pub fn build_info_set(d0: &OfflineDataset, k: usize) -> InfoSet {
    let mut lost = vec![false; k];
    for t in d0.tuples() {
        if !t.is_self_comparison() {
            lost[t.loser()] = true;
        }
    }
    InfoSet {
        member_indices: (0..k).filter(|&a| !lost[a]).collect(),
    }
}

/// Inputs for [`informativeness_check`].
#[derive(Debug, Clone)]
pub struct InformativenessSetup {
    pub actions: ActionSet,
    pub prior: GaussianPrior,
    pub competence: RaterCompetence,
    pub policy: PolicyKind,
    pub sampling: SamplingDistribution,
    pub n: usize,
    /// Horizon used in the analytic constants.
    pub horizon: usize,
    /// `μ_min` used in the analytic constants.
    pub mu_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformativenessReport {
    pub trials: usize,
    pub empirical_miss_rate: f64,
    pub empirical_mean_card: f64,
    pub f1: f64,
    pub f2: f64,
    /// `miss_rate ≤ f₁ + 3` binomial standard deviations.
    pub miss_within_bound: bool,
    /// `mean_card ≤ f₂ + 3` standard errors.
    pub card_within_bound: bool,
}

/// Draws fresh `(θ, ϑ, D₀)` per trial and compares how often `A* ∉ U` and the
/// average `|U|` with the analytic `f₁` and `f₂`.
pub fn informativeness_check<R: Rng + ?Sized>(
    setup: &InformativenessSetup,
    n_trials: usize,
    rng: &mut R,
) -> Result<InformativenessReport> {
    if n_trials < 100 {
        return Err(Error::config("informativeness check needs at least 100 trials"));
    }
    let k = setup.actions.len();
    if setup.sampling.len() != k {
        return Err(Error::config("sampling distribution size differs from K"));
    }
    let constants = bound_constants(
        setup.n,
        k,
        setup.horizon,
        setup.competence.beta,
        setup.competence.knowledge.lambda(),
        setup.actions.dim(),
        setup.mu_min,
    )?;
    let mut misses = 0usize;
    let mut cards = Vec::with_capacity(n_trials);
    for _ in 0..n_trials {
        let env = sample_environment(&setup.prior, &setup.actions, rng)?;
        let rater = sample_rater(&env, setup.competence, setup.policy, rng)?;
        let d0 = generate_dataset(&setup.actions, &rater, &setup.sampling, setup.n, rng)?;
        let u = build_info_set(&d0, k);
        if !u.contains(env.optimal_index()) {
            misses += 1;
        }
        cards.push(u.len() as f64);
    }
    let nt = n_trials as f64;
    let miss_rate = misses as f64 / nt;
    let mean_card = cards.iter().sum::<f64>() / nt;
    let var = cards.iter().map(|c| (c - mean_card).powi(2)).sum::<f64>() / (nt - 1.0);
    let p = constants.f1.clamp(0.0, 1.0);
    let miss_sd = (p * (1.0 - p) / nt).sqrt();
    let card_se = (var / nt).sqrt();
    Ok(InformativenessReport {
        trials: n_trials,
        empirical_miss_rate: miss_rate,
        empirical_mean_card: mean_card,
        f1: constants.f1,
        f2: constants.f2,
        miss_within_bound: miss_rate <= constants.f1 + 3.0 * miss_sd,
        card_within_bound: mean_card <= constants.f2 + 3.0 * card_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::build_action_set;
    use crate::offline_data::{Knowledge, PreferenceTuple};
    use crate::rng::substream;

    fn ds(k: usize, tuples: &[(usize, usize, u8)]) -> OfflineDataset {
        let t = tuples.iter().map(|&(a, b, y)| PreferenceTuple::new(a, b, y).unwrap()).collect();
        OfflineDataset::new(t, SamplingDistribution::uniform(k).unwrap()).unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn hand_traced_sets() {
        assert_eq!(build_info_set(&ds(5, &[]), 5).member_indices, set(&[0, 1, 2, 3, 4]));
        assert_eq!(build_info_set(&ds(3, &[(0, 1, 0)]), 3).member_indices, set(&[0, 2]));
        let round_robin = ds(4, &[(0, 1, 0), (2, 0, 1), (0, 3, 0)]);
        assert_eq!(build_info_set(&round_robin, 4).member_indices, set(&[0]));
        assert_eq!(build_info_set(&ds(3, &[(1, 1, 0), (2, 2, 1)]), 3).member_indices, set(&[0, 1, 2]));
    }

    #[test]
    fn zero_data_keeps_every_arm() {
        let mut rng = substream(0, "info");
        let actions = build_action_set(5, 3, 0.1, &mut rng).unwrap();
        let setup = InformativenessSetup {
            actions,
            prior: GaussianPrior::standard(3).unwrap(),
            competence: RaterCompetence::new(10.0, Knowledge::Finite(10.0)).unwrap(),
            policy: PolicyKind::BradleyTerry,
            sampling: SamplingDistribution::uniform(5).unwrap(),
            n: 0,
            horizon: 300,
            mu_min: 0.04,
        };
        let r = informativeness_check(&setup, 200, &mut rng).unwrap();
        assert_eq!(r.empirical_miss_rate, 0.0);
        assert_eq!(r.empirical_mean_card, 5.0);
    }

    #[test]
    fn near_noiseless_expert_never_misses() {
        let mut rng = substream(1, "info");
        let actions = build_action_set(5, 3, 0.1, &mut rng).unwrap();
        let setup = InformativenessSetup {
            actions,
            prior: GaussianPrior::standard(3).unwrap(),
            competence: RaterCompetence::new(1e6, Knowledge::Exact).unwrap(),
            policy: PolicyKind::BradleyTerry,
            sampling: SamplingDistribution::uniform(5).unwrap(),
            n: 200,
            horizon: 300,
            mu_min: 0.04,
        };
        let r = informativeness_check(&setup, 200, &mut rng).unwrap();
        assert!(r.empirical_miss_rate <= 0.01, "{r:?}");
        assert!(r.miss_within_bound);
        // At this β the analytic f₂ drops below 1 while |U| cannot.
        assert!(r.f2 < 1.0 && !r.card_within_bound);
    }
}
