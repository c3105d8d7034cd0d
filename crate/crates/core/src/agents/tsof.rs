use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use super::warmpref::WarmPrefPs;
use super::{Agent, AgentKind, StepOutcome};
use crate::environment::{top_two, Environment};
use crate::error::{Error, Result};
use crate::offline_data::{PreferenceTuple, Rater};

/// Threshold schedule for asking the rater.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonRule {
    Constant(f64),
    /// `c₀ / √t`.
    InverseSqrt(f64),
}

impl fmt::Display for EpsilonRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonRule::Constant(e) => write!(f, "constant:{e}"),
            EpsilonRule::InverseSqrt(c) => write!(f, "inverse_sqrt:{c}"),
        }
    }
}

impl FromStr for EpsilonRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::config(format!("epsilon rule `{s}` is not `constant:<x>` or `inverse_sqrt:<c0>`")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad epsilon value `{value}`")))?;
        let rule = match kind.trim() {
            "constant" => EpsilonRule::Constant(v),
            "inverse_sqrt" => EpsilonRule::InverseSqrt(v),
            other => return Err(Error::config(format!("unknown epsilon rule `{other}`"))),
        };
        Ok(rule)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsofConfig {
    /// Price `c` of one preference query.
    pub cost: f64,
    pub epsilon_rule: EpsilonRule,
}

impl Default for TsofConfig {
    fn default() -> Self {
        Self {
            cost: 0.0,
            epsilon_rule: EpsilonRule::Constant(0.1),
        }
    }
}

impl TsofConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cost >= 0.0 && self.cost.is_finite()) {
            return Err(Error::config(format!("feedback cost must be finite and >= 0, got {}", self.cost)));
        }
        match self.epsilon_rule {
            EpsilonRule::Constant(e) if e >= 0.0 && !e.is_nan() => Ok(()),
            EpsilonRule::InverseSqrt(c) if c > 0.0 && c.is_finite() => Ok(()),
            r => Err(Error::config(format!("invalid epsilon rule {r}"))),
        }
    }
}

/// `ε_t` for round `t ≥ 1`.
pub fn get_epsilon(cfg: &TsofConfig, t: usize) -> f64 {
    assert!(t >= 1, "rounds are numbered from 1");
    match cfg.epsilon_rule {
        EpsilonRule::Constant(e) => e,
        EpsilonRule::InverseSqrt(c0) => c0 / (t as f64).sqrt(),
    }
}

/// warmPref-PS that may buy a comparison between its two leading arms.
#[derive(Debug, Clone)]
pub struct WarmTsof {
    inner: WarmPrefPs,
    cfg: TsofConfig,
    rater: Rater,
    queries: usize,
}

impl WarmTsof {
    pub fn new(inner: WarmPrefPs, cfg: TsofConfig, rater: Rater) -> Result<Self> {
        cfg.validate()?;
        if inner.actions.len() < 2 {
            return Err(Error::config("warmTSOF needs at least two arms"));
        }
        let mut inner = inner;
        inner.kind = AgentKind::WarmTsof;
        Ok(Self {
            inner,
            cfg,
            rater,
            queries: 0,
        })
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn dataset_len(&self) -> usize {
        self.inner.d0.len()
    }

    /// One round. Returns the arm played, the cost charged and the tuple
    /// bought, if any.
    pub fn tsof_step(
        &mut self,
        env: &Environment,
        rng: &mut dyn rand::RngCore,
    ) -> Result<(usize, f64, Option<PreferenceTuple>)> {
        let t = self.inner.history.len() + 1;
        let mut p = self.inner.perturb(rng);
        let est = self.inner.solve(&p)?;
        let scores: Vec<f64> = self.inner.actions.iter().map(|a| a.dot(&est.theta_hat)).collect();
        let (first, second) = top_two(&scores);
        let eps = get_epsilon(&self.cfg, t);
        if (scores[first] - scores[second]).abs() < eps {
            let y = self
                .rater
                .judge(self.inner.actions.get(first), self.inner.actions.get(second), rng);
            let tuple = PreferenceTuple::new(first, second, y)?;
            self.inner.d0.push(tuple)?;
            p.omega.push(rng.random_bool(0.5));
            let refreshed = self.inner.solve(&p)?;
            let (arm, _) = self.inner.play(env, &refreshed.theta_hat, rng);
            self.queries += 1;
            Ok((arm, self.cfg.cost, Some(tuple)))
        } else {
            let theta_hat = est.theta_hat;
            let (arm, _) = self.inner.play(env, &theta_hat, rng);
            debug_assert_eq!(arm, first);
            Ok((arm, 0.0, None))
        }
    }
}

impl Agent for WarmTsof {
    fn kind(&self) -> AgentKind {
        AgentKind::WarmTsof
    }

    fn step(&mut self, env: &Environment, rng: &mut dyn rand::RngCore) -> Result<StepOutcome> {
        let (arm, cost, tuple) = self.tsof_step(env, rng)?;
        let reward = self.inner.history.steps().last().expect("just pushed").1;
        Ok(StepOutcome {
            arm,
            reward,
            cost,
            queried: tuple.is_some(),
        })
    }
}
