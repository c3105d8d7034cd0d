use nalgebra::DVector;

use super::loss::{sample_perturbations, MapEstimate, OnlineHistory, PerturbationSet, SurrogateLoss};
use super::{draw_reward, Agent, AgentKind, StepOutcome};
use crate::environment::{ActionSet, Environment, GaussianPrior};
use crate::error::{Error, Result};
use crate::offline_data::OfflineDataset;
use crate::optimizer::SolveSettings;

/// Bootstrapped posterior sampling warm-started with offline preferences.
///
/// Constructed with `beta = 0` (see [`WarmPrefPs::naive`]) the offline term is
/// constant and the agent reduces to the naive baseline.
#[derive(Debug, Clone)]
pub struct WarmPrefPs {
    pub(super) kind: AgentKind,
    pub(super) actions: ActionSet,
    pub(super) prior: GaussianPrior,
    pub(super) d0: OfflineDataset,
    pub(super) beta: f64,
    pub(super) lambda: f64,
    pub(super) noise_std: f64,
    pub(super) settings: SolveSettings,
    pub(super) history: OnlineHistory,
    pub(super) last: Option<MapEstimate>,
}

impl WarmPrefPs {
    pub fn new(
        actions: ActionSet,
        prior: GaussianPrior,
        d0: OfflineDataset,
        beta: f64,
        lambda: f64,
        noise_std: f64,
        settings: SolveSettings,
    ) -> Result<Self> {
        settings.validate()?;
        if !(noise_std > 0.0 && noise_std.is_finite()) {
            return Err(Error::config(format!("noise std must be positive, got {noise_std}")));
        }
        let history = OnlineHistory::new();
        // Validates dimensions and parameters once up front.
        SurrogateLoss::new(&actions, &history, &d0, beta, lambda, &prior)?;
        Ok(Self {
            kind: AgentKind::WarmPrefPs,
            actions,
            prior,
            d0,
            beta,
            lambda,
            noise_std,
            settings,
            history,
            last: None,
        })
    }

    /// The same agent with the preference term switched off (`β = 0`).
    pub fn naive(
        actions: ActionSet,
        prior: GaussianPrior,
        d0: OfflineDataset,
        lambda: f64,
        noise_std: f64,
        settings: SolveSettings,
    ) -> Result<Self> {
        let mut agent = Self::new(actions, prior, d0, 0.0, lambda, noise_std, settings)?;
        agent.kind = AgentKind::NaivePs;
        Ok(agent)
    }

    pub fn history(&self) -> &OnlineHistory {
        &self.history
    }

    pub fn dataset(&self) -> &OfflineDataset {
        &self.d0
    }

    pub fn last_estimate(&self) -> Option<&MapEstimate> {
        self.last.as_ref()
    }

    pub(super) fn loss(&self) -> SurrogateLoss<'_> {
        SurrogateLoss {
            actions: &self.actions,
            history: &self.history,
            d0: &self.d0,
            beta: self.beta,
            lambda: self.lambda,
            prior: &self.prior,
        }
    }

    pub(super) fn perturb(&self, rng: &mut dyn rand::RngCore) -> PerturbationSet {
        sample_perturbations(self.history.len() + 1, self.d0.len(), self.lambda, &self.prior, rng)
    }

    /// Solves the perturbed MAP, warm-started from the previous round.
    pub(super) fn solve(&mut self, p: &PerturbationSet) -> Result<MapEstimate> {
        let start = self.last.as_ref().map(|m| (&m.theta_hat, &m.vartheta_hat));
        let est = self.loss().solve_map(p, start, &self.settings)?;
        self.last = Some(est.clone());
        Ok(est)
    }

    pub(super) fn play(&mut self, env: &Environment, theta_hat: &DVector<f64>, rng: &mut dyn rand::RngCore) -> (usize, f64) {
        let arm = self.actions.best_arm(theta_hat);
        let action = self.actions.get(arm).clone();
        let reward = draw_reward(env, &action, self.noise_std, rng);
        self.history.push(action, reward);
        (arm, reward)
    }

    /// One round: perturb, solve, act greedily on `θ̂_t`, record.
    pub fn warmpref_step(&mut self, env: &Environment, rng: &mut dyn rand::RngCore) -> Result<(usize, MapEstimate)> {
        let p = self.perturb(rng);
        let est = self.solve(&p)?;
        let (arm, _) = self.play(env, &est.theta_hat.clone(), rng);
        Ok((arm, est))
    }
}

impl Agent for WarmPrefPs {
    fn kind(&self) -> AgentKind {
        self.kind
    }

    fn step(&mut self, env: &Environment, rng: &mut dyn rand::RngCore) -> Result<StepOutcome> {
        let (arm, _) = self.warmpref_step(env, rng)?;
        let reward = self.history.steps().last().expect("just pushed").1;
        Ok(StepOutcome {
            arm,
            reward,
            cost: 0.0,
            queried: false,
        })
    }
}
