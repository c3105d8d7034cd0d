use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{draw_reward, Agent, AgentKind, StepOutcome};
use crate::environment::{cholesky, standard_normal_vector, ActionSet, Environment, GaussianPrior};
use crate::error::{Error, Result};

/// Gaussian posterior in natural parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateState {
    /// `Σ_t⁻¹`.
    pub precision: DMatrix<f64>,
    /// `Σ₀⁻¹μ₀ + σ⁻² Σ A_s R_s`.
    pub shift: DVector<f64>,
}

impl ConjugateState {
    pub fn from_prior(prior: &GaussianPrior) -> Self {
        Self {
            precision: prior.precision().clone(),
            shift: prior.precision() * prior.mean(),
        }
    }

    /// Rank-one update with one observation.
    pub fn observe(&mut self, action: &DVector<f64>, reward: f64, noise_std: f64) {
        let w = 1.0 / (noise_std * noise_std);
        self.precision.ger(w, action, action, 1.0);
        self.shift.axpy(w * reward, action, 1.0);
    }

    pub fn mean(&self) -> Result<DVector<f64>> {
        Ok(cholesky(&self.precision, "posterior precision")?.solve(&self.shift))
    }

    pub fn covariance(&self) -> Result<DMatrix<f64>> {
        Ok(cholesky(&self.precision, "posterior precision")?.inverse())
    }

    /// `θ̃ ~ N(P⁻¹ s, P⁻¹)` via `P = LLᵀ`, `θ̃ = mean + L⁻ᵀ z`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DVector<f64>> {
        let ch = cholesky(&self.precision, "posterior precision")?;
        let mean = ch.solve(&self.shift);
        let z = standard_normal_vector(self.shift.len(), rng);
        let offset = ch
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .ok_or_else(|| Error::numeric("singular posterior factor"))?;
        Ok(mean + offset)
    }
}

/// Posterior sampling that ignores the offline data.
#[derive(Debug, Clone)]
pub struct VanillaPs {
    actions: ActionSet,
    noise_std: f64,
    state: ConjugateState,
}

impl VanillaPs {
    pub fn new(actions: ActionSet, prior: &GaussianPrior, noise_std: f64) -> Result<Self> {
        if prior.dim() != actions.dim() {
            return Err(Error::config("prior and action dimensions differ"));
        }
        if !(noise_std > 0.0 && noise_std.is_finite()) {
            return Err(Error::config(format!("noise std must be positive, got {noise_std}")));
        }
        Ok(Self {
            actions,
            noise_std,
            state: ConjugateState::from_prior(prior),
        })
    }

    pub fn state(&self) -> &ConjugateState {
        &self.state
    }
}

impl Agent for VanillaPs {
    fn kind(&self) -> AgentKind {
        AgentKind::VanillaPs
    }

    fn step(&mut self, env: &Environment, rng: &mut dyn rand::RngCore) -> Result<StepOutcome> {
        let theta = self.state.sample(rng)?;
        let arm = self.actions.best_arm(&theta);
        let action = self.actions.get(arm).clone();
        let reward = draw_reward(env, &action, self.noise_std, rng);
        self.state.observe(&action, reward, self.noise_std);
        Ok(StepOutcome {
            arm,
            reward,
            cost: 0.0,
            queried: false,
        })
    }
}
