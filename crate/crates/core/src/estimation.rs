//! Recovering an unknown rater deliberateness `β` from the offline data.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::agents::{OnlineHistory, PerturbationSet, SurrogateLoss};
use crate::environment::{ActionSet, GaussianPrior};
use crate::error::{Error, Result};
use crate::offline_data::{dataset_entropy, softplus, EntropyOver, OfflineDataset};
use crate::optimizer::SolveSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaMethod {
    Mle,
    Entropy,
}

impl fmt::Display for BetaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaMethod::Mle => "mle",
            BetaMethod::Entropy => "entropy",
        })
    }
}

impl FromStr for BetaMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" => Ok(BetaMethod::Mle),
            "entropy" => Ok(BetaMethod::Entropy),
            other => Err(Error::config(format!("unknown beta estimator `{other}` (expected mle or entropy)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaDiagnostics {
    Mle { log_likelihood: f64, rounds: usize },
    Entropy { entropy: f64, c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaEstimate {
    pub value: f64,
    pub method: BetaMethod,
    pub diagnostics: BetaDiagnostics,
}

/// Admissible range for `β̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaClamp {
    pub lo: f64,
    pub hi: f64,
}

impl Default for BetaClamp {
    fn default() -> Self {
        Self { lo: 1e-3, hi: 1e3 }
    }
}

impl BetaClamp {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::config(format!("need 0 < beta_lo < beta_hi < inf, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn apply(&self, beta: f64) -> f64 {
        if beta.is_nan() {
            return self.lo;
        }
        beta.clamp(self.lo, self.hi)
    }
}

/// Bradley–Terry negative log-likelihood of `d0` at `β` for belief `ϑ`.
pub fn preference_nll(d0: &OfflineDataset, actions: &ActionSet, vartheta: &DVector<f64>, beta: f64) -> f64 {
    d0.tuples()
        .iter()
        .map(|t| {
            let v = actions.get(t.loser()) - actions.get(t.winner());
            softplus(beta * v.dot(vartheta))
        })
        .sum()
}

const MLE_ROUNDS: usize = 10;
const GOLDEN_ITERS: usize = 200;

/// Alternates a MAP solve for `(θ, ϑ)` at the current `β` with a
/// golden-section search of the preference likelihood over `ln β`, until `β`
/// moves by less than 1% or ten rounds have run.
pub fn estimate_beta_mle(
    d0: &OfflineDataset,
    actions: &ActionSet,
    prior: &GaussianPrior,
    lambda: f64,
    clamp: BetaClamp,
    settings: &SolveSettings,
) -> Result<BetaEstimate> {
    if d0.is_empty() {
        return Err(Error::domain("cannot estimate beta from an empty dataset"));
    }
    let history = OnlineHistory::new();
    let zero = PerturbationSet::zero(0, d0.len(), actions.dim());
    let mut beta = clamp.apply(1.0);
    let mut vartheta = prior.mean().clone();
    let mut rounds = 0;
    while rounds < MLE_ROUNDS {
        rounds += 1;
        let loss = SurrogateLoss::new(actions, &history, d0, beta, lambda, prior)?;
        let map = loss.solve_map(&zero, None, settings)?;
        vartheta = map.vartheta_hat;
        let next = golden_log_beta(|b| preference_nll(d0, actions, &vartheta, b), clamp);
        let moved = (next - beta).abs() / beta;
        beta = next;
        if moved < 0.01 {
            break;
        }
    }
    let value = clamp.apply(beta);
    Ok(BetaEstimate {
        value,
        method: BetaMethod::Mle,
        diagnostics: BetaDiagnostics::Mle {
            log_likelihood: -preference_nll(d0, actions, &vartheta, value),
            rounds,
        },
    })
}

/// Minimizes `f(β)` over `ln β ∈ [ln lo, ln hi]`; the bracket endpoints are
/// also candidates and ties go to the smaller `β`.
fn golden_log_beta<F: Fn(f64) -> f64>(f: F, clamp: BetaClamp) -> f64 {
    let g = |u: f64| f(u.exp());
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (clamp.lo.ln(), clamp.hi.ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..GOLDEN_ITERS {
        if (b - a).abs() < 1e-9 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d);
        }
    }
    let interior = 0.5 * (a + b);
    let mut best = (clamp.lo, f(clamp.lo));
    for beta in [interior.exp(), clamp.hi] {
        let v = f(beta);
        if v < best.1 {
            best = (beta, v);
        }
    }
    clamp.apply(best.0)
}

/// `β̂ = c / max(H, 10⁻⁶)`, clamped; `H` is the entropy of the chosen
/// empirical arm distribution.
pub fn estimate_beta_entropy(d0: &OfflineDataset, k: usize, c: f64, over: EntropyOver, clamp: BetaClamp) -> Result<BetaEstimate> {
    if d0.is_empty() {
        return Err(Error::domain("cannot estimate beta from an empty dataset"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::config(format!("entropy constant c must be positive, got {c}")));
    }
    let h = dataset_entropy(d0, k, over)?;
    Ok(BetaEstimate {
        value: clamp.apply(c / h.max(1e-6)),
        method: BetaMethod::Entropy,
        diagnostics: BetaDiagnostics::Entropy { entropy: h, c },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{build_action_set, sample_environment};
    use crate::offline_data::{generate_dataset, sample_rater, Knowledge, PolicyKind, PreferenceTuple, RaterCompetence, SamplingDistribution};
    use crate::rng::substream;
    use rand::Rng;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    #[test]
    fn flat_data_gives_lower_clamp() {
        let actions = ActionSet::from_vectors(vec![dv(&[0.0, 0.0]), dv(&[0.0, 0.0]), dv(&[1.0, 0.0])]).unwrap();
        let mut rng = substream(0, "coin");
        let tuples = (0..200).map(|_| PreferenceTuple::new(0, 1, rng.random_range(0..2)).unwrap()).collect();
        let d0 = OfflineDataset::new(tuples, SamplingDistribution::uniform(3).unwrap()).unwrap();
        let prior = GaussianPrior::standard(2).unwrap();
        let est = estimate_beta_mle(&d0, &actions, &prior, 10.0, BetaClamp::default(), &SolveSettings::default()).unwrap();
        assert_eq!(est.value, 1e-3);
    }

    #[test]
    fn separable_data_hits_upper_clamp() {
        let actions = ActionSet::from_vectors(vec![dv(&[1.0]), dv(&[0.0])]).unwrap();
        let tuples = (0..50).map(|i| PreferenceTuple::new(i % 2, 1 - i % 2, (i % 2) as u8).unwrap()).collect();
        let d0 = OfflineDataset::new(tuples, SamplingDistribution::uniform(2).unwrap()).unwrap();
        let prior = GaussianPrior::standard(1).unwrap();
        let est = estimate_beta_mle(&d0, &actions, &prior, 10.0, BetaClamp::default(), &SolveSettings::default()).unwrap();
        assert_eq!(est.value, 1e3);
    }

    #[test]
    fn entropy_estimator_cases() {
        let clamp = BetaClamp::default();
        let one = OfflineDataset::new(vec![PreferenceTuple::new(0, 1, 0).unwrap(); 5], SamplingDistribution::uniform(3).unwrap()).unwrap();
        let e = estimate_beta_entropy(&one, 3, 3f64.ln(), EntropyOver::Winners, clamp).unwrap();
        assert_eq!(e.value, 1e3);
        // Ten distinct winners once each: H = ln 10.
        let tuples = (0..10).map(|i| PreferenceTuple::new(i, (i + 1) % 10, 0).unwrap()).collect();
        let spread = OfflineDataset::new(tuples, SamplingDistribution::uniform(10).unwrap()).unwrap();
        let e = estimate_beta_entropy(&spread, 10, 10f64.ln(), EntropyOver::Winners, clamp).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let empty = OfflineDataset::empty(SamplingDistribution::uniform(3).unwrap());
        assert!(estimate_beta_entropy(&empty, 3, 1.0, EntropyOver::Winners, clamp).is_err());
    }

    #[test]
    fn likelihood_in_log_beta_has_one_basin() {
        // Scanning a fine grid never shows two separated local minima.
        let mut rng = substream(1, "concave");
        for trial in 0..200 {
            let actions = build_action_set(4, 2, 0.2, &mut rng).unwrap();
            let vt = crate::environment::standard_normal_vector(2, &mut rng);
            let tuples = (0..rng.random_range(1..40))
                .map(|_| PreferenceTuple::new(rng.random_range(0..4), rng.random_range(0..4), rng.random_range(0..2)).unwrap())
                .collect();
            let d0 = OfflineDataset::new(tuples, SamplingDistribution::uniform(4).unwrap()).unwrap();
            let vals: Vec<f64> = (0..400)
                .map(|i| preference_nll(&d0, &actions, &vt, (-6.9 + 13.8 * i as f64 / 399.0).exp()))
                .collect();
            // Differences at rounding level are treated as ties.
            let tol = |v: f64| 1e-12 * (1.0 + v.abs());
            let minima = (1..399)
                .filter(|&i| vals[i] < vals[i - 1] - tol(vals[i]) && vals[i] < vals[i + 1] - tol(vals[i]))
                .count();
            assert!(minima <= 1, "trial {trial}");
        }
    }

    #[test]
    fn mle_is_roughly_consistent() {
        let mut estimates = Vec::new();
        for seed in 0..20 {
            let mut rng = substream(seed, "env");
            let actions = build_action_set(5, 4, 0.1, &mut rng).unwrap();
            let prior = GaussianPrior::standard(4).unwrap();
            let env = sample_environment(&prior, &actions, &mut rng).unwrap();
            let rater = sample_rater(&env, RaterCompetence::new(10.0, Knowledge::Exact).unwrap(), PolicyKind::BradleyTerry, &mut rng).unwrap();
            let d0 = generate_dataset(&actions, &rater, &SamplingDistribution::uniform(5).unwrap(), 500, &mut rng).unwrap();
            let est = estimate_beta_mle(&d0, &actions, &prior, f64::INFINITY, BetaClamp::default(), &SolveSettings::default()).map_err(|e| format!("seed {seed}: {e}")).unwrap();
            estimates.push(est.value);
        }
        estimates.sort_by(f64::total_cmp);
        let median = 0.5 * (estimates[9] + estimates[10]);
        assert!((5.0..=20.0).contains(&median), "median {median}");
    }
}
