//! Closed-form sample-complexity and regret-bound quantities.

mod bounds;
mod coupon;
mod info_set;
mod normal;
mod sample_complexity;

use nalgebra::DVector;
use serde_json::{Map, Number, Value};

use crate::environment::{top_two, ActionSet, GaussianPrior};
use crate::error::{Error, Result};

pub use bounds::{bound_constants, general_ps_bound, warmpref_bound, BoundConstants, WarmPrefBound};
pub use coupon::{coupon_all_prob, expected_collection_time};
pub use info_set::{build_info_set, informativeness_check, InfoSet, InformativenessReport, InformativenessSetup};
pub use normal::std_normal_cdf;
pub use sample_complexity::{lemma_a2_n0, prior_margin, theorem1_n0, two_action_n0, two_action_posterior};

/// A report entry: a number, or the reason it could not be computed.
pub type Field = std::result::Result<f64, String>;

/// Everything the report needs.
#[derive(Debug, Clone)]
pub struct ReportInputs {
    pub actions: ActionSet,
    pub prior: GaussianPrior,
    pub theta0: DVector<f64>,
    /// Where `θ₀` came from, e.g. `environment` or `prior_mean`.
    pub theta0_source: String,
    pub n: usize,
    pub horizon: usize,
    pub beta: f64,
    /// `f64::INFINITY` for an exact rater.
    pub lambda: f64,
    pub eps: f64,
    pub mu_min: f64,
    /// User-supplied reward range; `None` selects the heuristic default.
    pub c1: Option<f64>,
}

/// `2·max‖a‖₂·(‖μ₀‖₂ + 3√λ_max(Σ₀))`.
pub fn default_c1(actions: &ActionSet, prior: &GaussianPrior) -> f64 {
    let top = prior
        .covariance()
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(0.0_f64, f64::max);
    2.0 * actions.max_norm() * (prior.mean().norm() + 3.0 * top.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub delta: Field,
    pub alpha1: Field,
    pub alpha2: Field,
    pub f1_tilde: Field,
    pub f1: Field,
    pub f2: Field,
    pub two_action_n0: Field,
    pub theorem1_n0: Field,
    pub k_max: Field,
    pub general_ps_bound: Field,
    pub warmpref_bound: Field,
    pub c1: f64,
    pub appendix_variant_f2: Field,
    pub warmpref_bound_clamped: bool,
    pub c1_heuristic: bool,
    pub theta0_source: String,
    /// Arms used for the two-arm sample size: the two best under `θ₀`.
    pub two_action_pair: (usize, usize),
    pub eps: f64,
    pub mu_min: f64,
}

fn reason(e: Error) -> String {
    match e {
        Error::Domain(m) | Error::Numeric(m) | Error::Config(m) => m,
        other => other.to_string(),
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(reason)
}

/// Evaluates every bound for one configuration.
pub fn bound_report(inp: &ReportInputs) -> BoundReport {
    let k = inp.actions.len();
    let d = inp.actions.dim();
    let constants = lift(bound_constants(inp.n, k, inp.horizon, inp.beta, inp.lambda, d, inp.mu_min));
    let pick = |f: fn(&BoundConstants) -> f64| constants.as_ref().map(f).map_err(Clone::clone);

    let scores: Vec<f64> = inp.actions.iter().map(|a| a.dot(&inp.theta0)).collect();
    let pair = top_two(&scores);
    let two = lift(two_action_n0(
        inp.actions.get(pair.0),
        inp.actions.get(pair.1),
        &inp.prior,
        &inp.theta0,
        inp.beta,
        inp.eps,
    ));
    let thm1 = lift(theorem1_n0(&inp.actions, &inp.prior, &inp.theta0, inp.beta, inp.eps, inp.mu_min));

    let (c1, c1_heuristic) = match inp.c1 {
        Some(c) => (c, false),
        None => (default_c1(&inp.actions, &inp.prior), true),
    };
    let general = constants
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|c| lift(general_ps_bound(c.f2, c.f1, k, inp.horizon, c1)));
    let warm = constants
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|c| lift(warmpref_bound(c, k, inp.horizon)));

    BoundReport {
        delta: pick(|c| c.delta),
        alpha1: pick(|c| c.alpha1),
        alpha2: pick(|c| c.alpha2),
        f1_tilde: pick(|c| c.f1_tilde),
        f1: pick(|c| c.f1),
        f2: pick(|c| c.f2),
        two_action_n0: two,
        theorem1_n0: thm1.clone().map(|(n0, _)| n0),
        k_max: thm1.map(|(_, km)| km),
        general_ps_bound: general,
        warmpref_bound_clamped: warm.as_ref().map(|w| w.clamped).unwrap_or(false),
        warmpref_bound: warm.map(|w| w.value),
        c1,
        appendix_variant_f2: pick(|c| c.appendix_variant_f2),
        c1_heuristic,
        theta0_source: inp.theta0_source.clone(),
        two_action_pair: pair,
        eps: inp.eps,
        mu_min: inp.mu_min,
    }
}

fn field_value(f: &Field) -> Value {
    match f {
        Ok(v) => Number::from_f64(*v).map(Value::Number).unwrap_or_else(|| Value::String(format!("undefined: non-finite value {v}"))),
        Err(reason) => Value::String(format!("undefined: {reason}")),
    }
}

impl BoundReport {
    /// Flat JSON object; fields that could not be computed read
    /// `"undefined: <reason>"`.
    pub fn to_json_value(&self) -> Value {
        let mut m = Map::new();
        let numeric = [
            ("delta", &self.delta),
            ("alpha1", &self.alpha1),
            ("alpha2", &self.alpha2),
            ("f1_tilde", &self.f1_tilde),
            ("f1", &self.f1),
            ("f2", &self.f2),
            ("two_action_n0", &self.two_action_n0),
            ("theorem1_n0", &self.theorem1_n0),
            ("k_max", &self.k_max),
            ("general_ps_bound", &self.general_ps_bound),
            ("warmpref_bound", &self.warmpref_bound),
        ];
        for (name, f) in numeric {
            m.insert(name.into(), field_value(f));
        }
        m.insert("c1".into(), field_value(&Ok(self.c1)));
        m.insert("appendix_variant_f2".into(), field_value(&self.appendix_variant_f2));
        m.insert("warmpref_bound_clamped".into(), Value::Bool(self.warmpref_bound_clamped));
        m.insert("c1_heuristic".into(), Value::Bool(self.c1_heuristic));
        m.insert("theta0_source".into(), Value::String(self.theta0_source.clone()));
        m.insert(
            "two_action_pair".into(),
            Value::Array(vec![self.two_action_pair.0.into(), self.two_action_pair.1.into()]),
        );
        m.insert("eps".into(), field_value(&Ok(self.eps)));
        m.insert("mu_min".into(), field_value(&Ok(self.mu_min)));
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("plain JSON values");
        s.push('\n');
        s
    }
}
