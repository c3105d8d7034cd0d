//! Online agents and the surrogate-loss machinery they share.

pub mod loss;
mod tsof;
mod vanilla;
mod warmpref;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::environment::Environment;
use crate::error::{Error, Result};

pub use loss::{sample_perturbations, MapEstimate, OnlineHistory, PerturbationSet, SurrogateLoss};
pub use tsof::{get_epsilon, EpsilonRule, TsofConfig, WarmTsof};
pub use vanilla::{ConjugateState, VanillaPs};
pub use warmpref::WarmPrefPs;

/// What happened in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub arm: usize,
    /// Noisy reward observed for `arm`.
    pub reward: f64,
    /// Feedback cost charged this round (warmTSOF only).
    pub cost: f64,
    pub queried: bool,
}

/// A sequential decision maker over a fixed action set.
pub trait Agent {
    fn kind(&self) -> AgentKind;

    /// Plays round `t` (the number of completed rounds plus one).
    fn step(&mut self, env: &Environment, rng: &mut dyn rand::RngCore) -> Result<StepOutcome>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentKind {
    VanillaPs,
    NaivePs,
    WarmPrefPs,
    WarmTsof,
}

impl AgentKind {
    pub const ALL: [AgentKind; 4] = [
        AgentKind::VanillaPs,
        AgentKind::NaivePs,
        AgentKind::WarmPrefPs,
        AgentKind::WarmTsof,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::VanillaPs => "vanilla_ps",
            AgentKind::NaivePs => "naive_ps",
            AgentKind::WarmPrefPs => "warmpref_ps",
            AgentKind::WarmTsof => "warmtsof",
        }
    }

    /// Random-stream role for this agent.
    pub fn stream_role(self) -> String {
        format!("agent:{}", self.name())
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AgentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown agent `{s}`")))
    }
}

pub(crate) fn draw_reward<R: Rng + ?Sized>(
    env: &Environment,
    action: &nalgebra::DVector<f64>,
    noise_std: f64,
    rng: &mut R,
) -> f64 {
    let z: f64 = rng.sample(rand_distr::StandardNormal);
    action.dot(env.theta()) + noise_std * z
}
