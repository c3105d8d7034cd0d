//! How much offline data pins down the optimal arm.

use nalgebra::DVector;
use rand::Rng;

use super::normal::ln_std_normal_cdf;
use crate::environment::{standard_normal_vector, ActionSet, GaussianPrior};
use crate::error::{Error, Result};
use crate::offline_data::{logistic, softplus, Knowledge, OfflineDataset};

/// Standardized prior margin `x = (a₀−a₁)ᵀμ₀ / √((a₀−a₁)ᵀΣ₀(a₀−a₁))`.
pub fn prior_margin(a0: &DVector<f64>, a1: &DVector<f64>, prior: &GaussianPrior) -> Result<f64> {
    let diff = a0 - a1;
    let var = diff.dot(&(prior.covariance() * &diff));
    if !(var > 0.0) {
        return Err(Error::domain("zero prior variance along a0-a1"));
    }
    Ok(diff.dot(prior.mean()) / var.sqrt())
}

/// `ln((1/Φ(x) − 1))` computed as `ln Φ(−x) − ln Φ(x)`.
fn ln_inverse_odds(x: f64) -> f64 {
    ln_std_normal_cdf(-x) - ln_std_normal_cdf(x)
}

/// Two-arm sample size `N₀ = ln((1/ε−1)(1/Φ(x)−1)) / (β⟨a₀−a₁, θ₀⟩)`.
///
/// Signed; callers take the ceiling.
pub fn two_action_n0(
    a0: &DVector<f64>,
    a1: &DVector<f64>,
    prior: &GaussianPrior,
    theta0: &DVector<f64>,
    beta: f64,
    eps: f64,
) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::domain("beta must be positive"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain("eps must lie in (0,1)"));
    }
    let gap = (a0 - a1).dot(theta0);
    if gap == 0.0 {
        return Err(Error::domain("non-identifiable pair"));
    }
    let x = prior_margin(a0, a1, prior)?;
    let numerator = (1.0 / eps - 1.0).ln() + ln_inverse_odds(x);
    Ok(numerator / (beta * gap))
}

/// `(N₀, k_max)` for the singleton information set over `K ≥ 3` arms.
///
/// `k_max` runs over ordered pairs with strictly positive gap under `θ₀` and
/// is floored at 1.
pub fn theorem1_n0(
    actions: &ActionSet,
    prior: &GaussianPrior,
    theta0: &DVector<f64>,
    beta: f64,
    eps: f64,
    mu_min: f64,
) -> Result<(f64, f64)> {
    let k = actions.len();
    if k < 3 {
        return Err(Error::domain("K<3"));
    }
    if !(beta > 0.0) {
        return Err(Error::domain("beta must be positive"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain("eps must lie in (0,1)"));
    }
    if !(mu_min > 0.0 && mu_min <= 1.0) {
        return Err(Error::domain("mu_min must lie in (0,1]"));
    }
    let kf = k as f64;
    let lead = (2.0 * kf * kf / eps - 1.0).ln();
    let mut best: Option<f64> = None;
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let (ai, aj) = (actions.get(i), actions.get(j));
            let gap = (ai - aj).dot(theta0);
            if !(gap > 0.0) {
                continue;
            }
            let x = prior_margin(ai, aj, prior)?;
            let term = (lead + ln_inverse_odds(x)) / (beta * gap);
            best = Some(best.map_or(term, |b: f64| b.max(term)));
        }
    }
    let raw = best.ok_or_else(|| Error::domain("all gaps zero"))?;
    let k_max = raw.max(1.0);
    let n0 = (kf.ln() + (k_max - 1.0) * kf.ln().ln()) / (mu_min * mu_min * eps);
    Ok((n0, k_max))
}

/// Posterior probability that `a₀` (arm `pair.0`) is optimal given
/// comparisons between exactly the two arms of `pair`.
///
/// With finite `λ` the rater belief is integrated out by Monte Carlo over
/// `ϑ ~ N(θ₀, I/λ²)`; with exact knowledge the odds are
/// `exp(β N_eff ⟨a₀−a₁, θ₀⟩)·Φ(x)/(1−Φ(x))`.
#[allow(clippy::too_many_arguments)]
pub fn two_action_posterior<R: Rng + ?Sized>(
    d0: &OfflineDataset,
    actions: &ActionSet,
    pair: (usize, usize),
    prior: &GaussianPrior,
    theta0: &DVector<f64>,
    beta: f64,
    knowledge: Knowledge,
    mc_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let (i0, i1) = pair;
    if i0 == i1 || i0 >= actions.len() || i1 >= actions.len() {
        return Err(Error::domain("pair must name two distinct arms"));
    }
    let mut wins0 = 0usize;
    for t in d0.tuples() {
        let same = (t.idx0 == i0 && t.idx1 == i1) || (t.idx0 == i1 && t.idx1 == i0);
        if !same {
            return Err(Error::domain(format!(
                "tuple ({}, {}) is not over the pair ({i0}, {i1})",
                t.idx0, t.idx1
            )));
        }
        if t.winner() == i0 {
            wins0 += 1;
        }
    }
    let n = d0.len();
    let wins1 = n - wins0;
    let (a0, a1) = (actions.get(i0), actions.get(i1));
    let x = prior_margin(a0, a1, prior)?;
    let prior_log_odds = ln_std_normal_cdf(x) - ln_std_normal_cdf(-x);
    let diff = a0 - a1;

    let likelihood_log_odds = match knowledge {
        Knowledge::Exact => {
            let n_eff = wins0 as f64 - wins1 as f64;
            beta * n_eff * diff.dot(theta0)
        }
        Knowledge::Finite(lambda) => {
            if mc_samples == 0 {
                return Err(Error::domain("mc_samples must be positive"));
            }
            let mut log_i0 = Vec::with_capacity(mc_samples);
            let mut log_i1 = Vec::with_capacity(mc_samples);
            for _ in 0..mc_samples {
                let vartheta = theta0 + standard_normal_vector(theta0.len(), rng) / lambda;
                let s = beta * diff.dot(&vartheta);
                let lp0 = -softplus(-s);
                let lp1 = -softplus(s);
                log_i0.push(wins0 as f64 * lp0 + wins1 as f64 * lp1);
                log_i1.push(wins0 as f64 * lp1 + wins1 as f64 * lp0);
            }
            log_sum_exp(&log_i0) - log_sum_exp(&log_i1)
        }
    };
    Ok(logistic(likelihood_log_odds + prior_log_odds))
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Offline sample size that makes the information set a singleton with
/// probability `1 − ε` under noiseless comparisons.
///
/// `uniform`: `K² ln K / ε`. Otherwise `H_{C(K,2)} / (μ_min² ε)` with `H_m`
/// the `m`-th harmonic number.
pub fn lemma_a2_n0(k: usize, eps: f64, mu_min: f64, uniform: bool) -> Result<f64> {
    if k < 2 {
        return Err(Error::domain("K<2"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain("eps must lie in (0,1)"));
    }
    let kf = k as f64;
    if uniform {
        return Ok(kf * kf * kf.ln() / eps);
    }
    if !(mu_min > 0.0 && mu_min < 1.0) {
        return Err(Error::domain("mu_min must lie in (0,1)"));
    }
    let pairs = k * (k - 1) / 2;
    let harmonic: f64 = (1..=pairs).rev().map(|i| 1.0 / i as f64).sum();
    Ok(harmonic / (mu_min * mu_min * eps))
}
