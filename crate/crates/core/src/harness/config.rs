use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::agents::{AgentKind, EpsilonRule, TsofConfig};
use crate::environment::GaussianPrior;
use crate::error::{Error, Result};
use crate::estimation::{BetaClamp, BetaMethod};
use crate::offline_data::{EntropyOver, PolicyKind, SamplingDistribution};
use crate::optimizer::{Method, SolveSettings};

/// Deliberateness handed to the warm-started agents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentBeta {
    /// Use `true_beta`.
    Matched,
    Value(f64),
    /// Estimate from the offline data.
    Estimated(BetaMethod),
}

/// Knowledgeability handed to the warm-started agents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentLambda {
    Matched,
    Value(f64),
}

/// Where the theory report takes `θ₀` from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta0Source {
    /// The environment draw of the first seed.
    Environment,
    PriorMean,
}

impl fmt::Display for Theta0Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theta0Source::Environment => "environment",
            Theta0Source::PriorMean => "prior_mean",
        })
    }
}

/// All scalars and shapes of one experiment.
///
/// Defaults: K=10, d=4, T=300, N=20, β=10, λ=100, σ=1, ρ=0.1, 5 seeds, the
/// three non-feedback agents.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub k: usize,
    pub d: usize,
    pub horizon: usize,
    pub n: usize,
    pub true_beta: f64,
    /// `f64::INFINITY` makes the rater exact.
    pub true_lambda: f64,
    pub agent_beta: AgentBeta,
    pub agent_lambda: AgentLambda,
    pub sigma: f64,
    pub rho: f64,
    /// `None` means zeros.
    pub prior_mean: Option<Vec<f64>>,
    /// Row-major `d×d`; `None` means identity.
    pub prior_cov: Option<Vec<f64>>,
    /// `None` means uniform.
    pub sampling: Option<Vec<f64>>,
    pub expert_policy: PolicyKind,
    pub agents: Vec<AgentKind>,
    pub tsof: TsofConfig,
    pub seeds: usize,
    pub base_seed: u64,
    pub eps: f64,
    pub c1: Option<f64>,
    /// `None` means `(min_k μ_k)²`.
    pub bound_mu_min: Option<f64>,
    pub theory_theta0: Theta0Source,
    pub entropy_over: EntropyOver,
    /// `None` means `ln K`.
    pub entropy_c: Option<f64>,
    pub beta_clamp_lo: f64,
    pub beta_clamp_hi: f64,
    pub solver: Method,
    pub grad_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let clamp = BetaClamp::default();
        let solve = SolveSettings::default();
        Self {
            k: 10,
            d: 4,
            horizon: 300,
            n: 20,
            true_beta: 10.0,
            true_lambda: 100.0,
            agent_beta: AgentBeta::Matched,
            agent_lambda: AgentLambda::Matched,
            sigma: 1.0,
            rho: 0.1,
            prior_mean: None,
            prior_cov: None,
            sampling: None,
            expert_policy: PolicyKind::BradleyTerry,
            agents: vec![AgentKind::VanillaPs, AgentKind::NaivePs, AgentKind::WarmPrefPs],
            tsof: TsofConfig::default(),
            seeds: 5,
            base_seed: 0,
            eps: 0.1,
            c1: None,
            bound_mu_min: None,
            theory_theta0: Theta0Source::Environment,
            entropy_over: EntropyOver::Winners,
            entropy_c: None,
            beta_clamp_lo: clamp.lo,
            beta_clamp_hi: clamp.hi,
            solver: solve.method,
            grad_tolerance: solve.grad_tolerance,
            max_iterations: solve.max_iterations,
        }
    }
}

const KEYS: &[&str] = &[
    "K",
    "d",
    "T",
    "N",
    "true_beta",
    "true_lambda",
    "agent_beta",
    "agent_lambda",
    "sigma",
    "rho",
    "prior_mean",
    "prior_cov",
    "sampling",
    "expert_policy",
    "agents",
    "tsof_cost",
    "tsof_epsilon",
    "seeds",
    "base_seed",
    "eps",
    "c1",
    "bound_mu_min",
    "theory_theta0",
    "entropy_over",
    "entropy_c",
    "beta_clamp_lo",
    "beta_clamp_hi",
    "solver",
    "grad_tolerance",
    "max_iterations",
];

fn num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("`{key}` expects a number, got `{v}`"))
}

fn list(key: &str, v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',').map(|x| num(key, x.trim())).collect()
}

fn auto_or(key: &str, v: &str) -> std::result::Result<Option<f64>, String> {
    if v == "auto" {
        Ok(None)
    } else {
        num(key, v).map(Some)
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn auto_str(v: Option<f64>) -> String {
    v.map_or_else(|| "auto".into(), |x| x.to_string())
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Newton => "newton",
        Method::GradientDescent => "gradient_descent",
    }
}

impl ExperimentConfig {
    /// Parses the `key = value` format. Unset keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if seen.contains(&key) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            seen.push(key);
            cfg.set(key, value).map_err(err)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key from its textual value, without validation.
    pub fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        match key {
            "K" => self.k = num(key, v)?,
            "d" => self.d = num(key, v)?,
            "T" => self.horizon = num(key, v)?,
            "N" => self.n = num(key, v)?,
            "true_beta" => self.true_beta = num(key, v)?,
            "true_lambda" => self.true_lambda = num(key, v)?,
            "agent_beta" => {
                self.agent_beta = match v {
                    "matched" => AgentBeta::Matched,
                    "mle" | "entropy" => AgentBeta::Estimated(v.parse().map_err(|e: Error| e.to_string())?),
                    _ => AgentBeta::Value(num(key, v)?),
                }
            }
            "agent_lambda" => {
                self.agent_lambda = match v {
                    "matched" => AgentLambda::Matched,
                    _ => AgentLambda::Value(num(key, v)?),
                }
            }
            "sigma" => self.sigma = num(key, v)?,
            "rho" => self.rho = num(key, v)?,
            "prior_mean" => self.prior_mean = if v == "zeros" { None } else { Some(list(key, v)?) },
            "prior_cov" => self.prior_cov = if v == "identity" { None } else { Some(list(key, v)?) },
            "sampling" => self.sampling = if v == "uniform" { None } else { Some(list(key, v)?) },
            "expert_policy" => self.expert_policy = v.parse().map_err(|e: Error| e.to_string())?,
            "agents" => {
                self.agents = v
                    .split(',')
                    .map(|a| a.trim().parse::<AgentKind>().map_err(|e| e.to_string()))
                    .collect::<std::result::Result<_, _>>()?
            }
            "tsof_cost" => self.tsof.cost = num(key, v)?,
            "tsof_epsilon" => self.tsof.epsilon_rule = v.parse::<EpsilonRule>().map_err(|e| e.to_string())?,
            "seeds" => self.seeds = num(key, v)?,
            "base_seed" => self.base_seed = num(key, v)?,
            "eps" => self.eps = num(key, v)?,
            "c1" => self.c1 = auto_or(key, v)?,
            "bound_mu_min" => self.bound_mu_min = auto_or(key, v)?,
            "theory_theta0" => {
                self.theory_theta0 = match v {
                    "environment" => Theta0Source::Environment,
                    "prior_mean" => Theta0Source::PriorMean,
                    _ => return Err(format!("`theory_theta0` must be environment or prior_mean, got `{v}`")),
                }
            }
            "entropy_over" => self.entropy_over = v.parse().map_err(|e: Error| e.to_string())?,
            "entropy_c" => self.entropy_c = auto_or(key, v)?,
            "beta_clamp_lo" => self.beta_clamp_lo = num(key, v)?,
            "beta_clamp_hi" => self.beta_clamp_hi = num(key, v)?,
            "solver" => {
                self.solver = match v {
                    "newton" => Method::Newton,
                    "gradient_descent" => Method::GradientDescent,
                    _ => return Err(format!("`solver` must be newton or gradient_descent, got `{v}`")),
                }
            }
            "grad_tolerance" => self.grad_tolerance = num(key, v)?,
            "max_iterations" => self.max_iterations = num(key, v)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Every key, in a fixed order; [`ExperimentConfig::parse`] reads it back unchanged.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("K", self.k.to_string());
        put("d", self.d.to_string());
        put("T", self.horizon.to_string());
        put("N", self.n.to_string());
        put("true_beta", self.true_beta.to_string());
        put("true_lambda", self.true_lambda.to_string());
        put(
            "agent_beta",
            match self.agent_beta {
                AgentBeta::Matched => "matched".into(),
                AgentBeta::Value(b) => b.to_string(),
                AgentBeta::Estimated(m) => m.to_string(),
            },
        );
        put(
            "agent_lambda",
            match self.agent_lambda {
                AgentLambda::Matched => "matched".into(),
                AgentLambda::Value(l) => l.to_string(),
            },
        );
        put("sigma", self.sigma.to_string());
        put("rho", self.rho.to_string());
        put("prior_mean", self.prior_mean.as_deref().map_or_else(|| "zeros".into(), join));
        put("prior_cov", self.prior_cov.as_deref().map_or_else(|| "identity".into(), join));
        put("sampling", self.sampling.as_deref().map_or_else(|| "uniform".into(), join));
        put("expert_policy", self.expert_policy.to_string());
        put("agents", self.agents.iter().map(|a| a.name()).collect::<Vec<_>>().join(","));
        put("tsof_cost", self.tsof.cost.to_string());
        put("tsof_epsilon", self.tsof.epsilon_rule.to_string());
        put("seeds", self.seeds.to_string());
        put("base_seed", self.base_seed.to_string());
        put("eps", self.eps.to_string());
        put("c1", auto_str(self.c1));
        put("bound_mu_min", auto_str(self.bound_mu_min));
        put("theory_theta0", self.theory_theta0.to_string());
        put("entropy_over", self.entropy_over.to_string());
        put("entropy_c", auto_str(self.entropy_c));
        put("beta_clamp_lo", self.beta_clamp_lo.to_string());
        put("beta_clamp_hi", self.beta_clamp_hi.to_string());
        put("solver", method_name(self.solver).into());
        put("grad_tolerance", self.grad_tolerance.to_string());
        put("max_iterations", self.max_iterations.to_string());
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::config(m));
        if self.k < 2 {
            return bad(format!("K must be >= 2, got {}", self.k));
        }
        if self.d < 1 || self.horizon < 1 || self.seeds < 1 || self.max_iterations < 1 {
            return bad("d, T, seeds and max_iterations must be >= 1".into());
        }
        if !(self.true_beta >= 0.0 && self.true_beta.is_finite()) {
            return bad(format!("true_beta must be finite and >= 0, got {}", self.true_beta));
        }
        if !(self.true_lambda > 0.0) {
            return bad(format!("true_lambda must be positive or inf, got {}", self.true_lambda));
        }
        if let AgentBeta::Value(b) = self.agent_beta {
            if !(b >= 0.0 && b.is_finite()) {
                return bad(format!("agent_beta must be finite and >= 0, got {b}"));
            }
        }
        if let AgentLambda::Value(l) = self.agent_lambda {
            if !(l > 0.0) {
                return bad(format!("agent_lambda must be positive or inf, got {l}"));
            }
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return bad(format!("rho must lie in [0, 1), got {}", self.rho));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        for (name, v) in [("c1", self.c1), ("bound_mu_min", self.bound_mu_min), ("entropy_c", self.entropy_c)] {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return bad(format!("{name} must be positive and finite, got {x}"));
                }
            }
        }
        if !(self.grad_tolerance > 0.0 && self.grad_tolerance.is_finite()) {
            return bad(format!("grad_tolerance must be positive, got {}", self.grad_tolerance));
        }
        if self.agents.is_empty() {
            return bad("agent set is empty".into());
        }
        for (i, a) in self.agents.iter().enumerate() {
            if self.agents[..i].contains(a) {
                return bad(format!("agent `{a}` listed twice"));
            }
        }
        self.tsof.validate()?;
        self.beta_clamp()?;
        self.prior()?;
        self.sampling_distribution()?;
        Ok(())
    }

    pub fn prior(&self) -> Result<GaussianPrior> {
        let d = self.d;
        let mean = match &self.prior_mean {
            None => DVector::zeros(d),
            Some(m) if m.len() == d => DVector::from_column_slice(m),
            Some(m) => return Err(Error::config(format!("prior_mean has {} entries, need d={d}", m.len()))),
        };
        let cov = match &self.prior_cov {
            None => DMatrix::identity(d, d),
            Some(c) if c.len() == d * d => DMatrix::from_row_slice(d, d, c),
            Some(c) => return Err(Error::config(format!("prior_cov has {} entries, need d*d={}", c.len(), d * d))),
        };
        GaussianPrior::new(mean, cov)
    }

    pub fn sampling_distribution(&self) -> Result<SamplingDistribution> {
        match &self.sampling {
            None => SamplingDistribution::uniform(self.k),
            Some(w) if w.len() == self.k => SamplingDistribution::new(w.clone()),
            Some(w) => Err(Error::config(format!("sampling has {} weights, need K={}", w.len(), self.k))),
        }
    }

    pub fn beta_clamp(&self) -> Result<BetaClamp> {
        BetaClamp::new(self.beta_clamp_lo, self.beta_clamp_hi)
    }

    pub fn solve_settings(&self) -> SolveSettings {
        SolveSettings {
            grad_tolerance: self.grad_tolerance,
            max_iterations: self.max_iterations,
            method: self.solver,
            ..SolveSettings::default()
        }
    }

    /// `λ` the warm-started agents assume.
    pub fn resolved_agent_lambda(&self) -> f64 {
        match self.agent_lambda {
            AgentLambda::Matched => self.true_lambda,
            AgentLambda::Value(l) => l,
        }
    }

    pub fn entropy_constant(&self) -> f64 {
        self.entropy_c.unwrap_or_else(|| (self.k as f64).ln())
    }

    /// `μ_min` used in the analytic constants.
    pub fn resolved_mu_min(&self) -> Result<f64> {
        match self.bound_mu_min {
            Some(m) => Ok(m),
            None if self.sampling.is_none() => Ok(1.0 / (self.k * self.k) as f64),
            None => Ok(self.sampling_distribution()?.mu_min().powi(2)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = cfg.serialize();
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.serialize(), text);
    }

    #[test]
    fn custom_values_round_trip() {
        let text = "K = 3\nd = 2\n# comment\ntrue_lambda = inf  # exact\nagent_beta = mle\nagent_lambda = 0.1\nprior_mean = 1,-0.5\nprior_cov = 2,0.5,0.5,1\nsampling = 0.2,0.3,0.5\nexpert_policy = greedy\nagents = warmtsof,vanilla_ps\ntsof_epsilon = inverse_sqrt:0.7\nc1 = 3\nsolver = gradient_descent\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.true_lambda, f64::INFINITY);
        assert_eq!(cfg.agent_beta, AgentBeta::Estimated(BetaMethod::Mle));
        assert_eq!(cfg.agents, vec![AgentKind::WarmTsof, AgentKind::VanillaPs]);
        let again = ExperimentConfig::parse(&cfg.serialize()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        let e = ExperimentConfig::parse("K = 10\nfoo = 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        assert!(ExperimentConfig::parse("K = 1").is_err());
        assert!(ExperimentConfig::parse("K = 10\nK = 11").is_err());
        assert!(ExperimentConfig::parse("agents = ").is_err());
        assert!(ExperimentConfig::parse("prior_mean = 1,2").is_err());
        assert!(ExperimentConfig::parse("sigma = nan").is_err());
        assert!(ExperimentConfig::parse("K 10").is_err());
    }
}
