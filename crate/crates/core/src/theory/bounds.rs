//! Dataset-quality constants and the two regret bounds.

use crate::error::{Error, Result};
use crate::offline_data::softplus;

/// `Δ, α₁, α₂, f̃₁, f₁, f₂` for one problem size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub delta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub f1_tilde: f64,
    pub f1: f64,
    pub f2: f64,
    /// `f₂` before the outer `min(·, K)`.
    pub f2_unclamped: f64,
    /// The appendix's alternative expression for `E|U|`.
    pub appendix_variant_f2: f64,
}

/// Evaluates the constants for `N` tuples, `K` arms, horizon `T`, rater
/// `(β, λ)` in dimension `d` with least sampling weight `μ_min`.
///
/// `λ = ∞` is accepted and gives `α₂ = 0`.
pub fn bound_constants(n: usize, k: usize, t: usize, beta: f64, lambda: f64, d: usize, mu_min: f64) -> Result<BoundConstants> {
    if t < 2 {
        return Err(Error::domain("T<2"));
    }
    if k < 1 || d < 1 {
        return Err(Error::domain("K and d must be positive"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain("beta must be positive and finite"));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain("lambda must be positive"));
    }
    if !(mu_min > 0.0 && mu_min < 1.0) {
        return Err(Error::domain("mu_min must lie in (0,1)"));
    }
    let (nf, kf, tf, df) = (n as f64, k as f64, t as f64, d as f64);
    let t_beta = tf * beta;
    if t_beta <= 1.0 {
        return Err(Error::domain("Tbeta<=1"));
    }
    let delta = t_beta.ln() / beta;
    let m = delta.min(1.0);
    let alpha1 = kf * m;
    let alpha2 = (2.0 * (2.0 * df.sqrt() * tf).ln()).sqrt() / lambda;

    // (1 − 1/(1+eᶻ))ᴺ = σ(z)ᴺ = exp(−N softplus(−z)).
    let z = beta * (m + alpha2 - alpha1);
    let first = (-nf * softplus(-z)).exp();
    let second = (2.0 * nf * (-mu_min).ln_1p()).exp();
    let f1_tilde = first + second;
    let f1 = f1_tilde + 1.0 / tf;

    let sig = |x: f64| (-softplus(-x)).exp();
    let scale = nf * kf / t_beta;
    let f2_unclamped = alpha1 * alpha1 + scale * sig(beta * alpha2 - alpha1) + 2.0 / tf;
    let f2 = f2_unclamped.min(kf);

    let appendix_inner = kf * (t_beta.ln().powi(2) / (2.0 * beta * beta)).min(1.0)
        + scale * sig(beta * alpha2 - (kf - 1.0) * m)
        + 1.0 / tf;
    let appendix_variant_f2 = appendix_inner.min(kf);

    Ok(BoundConstants {
        delta,
        alpha1,
        alpha2,
        f1_tilde,
        f1,
        f2,
        f2_unclamped,
        appendix_variant_f2,
    })
}

/// `√(T·E|U|·ln E|U| + ε ln(K/ε)) + C₁Tε`.
pub fn general_ps_bound(expected_card: f64, eps: f64, k: usize, t: usize, c1: f64) -> Result<f64> {
    if !(expected_card >= 1.0) {
        return Err(Error::domain("E|U|<1"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain("eps must lie in (0,1)"));
    }
    if k < 1 {
        return Err(Error::domain("K<1"));
    }
    let tf = t as f64;
    let inner = tf * expected_card * expected_card.ln() + eps * (k as f64 / eps).ln();
    Ok(inner.max(0.0).sqrt() + c1 * tf * eps)
}

/// Value of the warmPref-PS bound and whether the `ln f₂ < 0` clamp fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarmPrefBound {
    pub value: f64,
    pub clamped: bool,
}

/// `√(T f₂ (ln f₂ + f₁ ln(K/f₁))) + 2√(2 ln K)·T·(f̃₁ + 1/T)`.
///
/// If the bracket is negative (only possible with `f₂ < 1`) it is clamped to
/// zero and `clamped` is set.
pub fn warmpref_bound(c: &BoundConstants, k: usize, t: usize) -> Result<WarmPrefBound> {
    if k < 2 {
        return Err(Error::domain("K<2"));
    }
    if !(c.f1 > 0.0) {
        return Err(Error::domain("f1<=0"));
    }
    let (kf, tf) = (k as f64, t as f64);
    let bracket = c.f2.ln() + c.f1 * (kf / c.f1).ln();
    let clamped = bracket < 0.0;
    let main = (tf * c.f2 * bracket.max(0.0)).sqrt();
    let tail = 2.0 * (2.0 * kf.ln()).sqrt() * tf * (c.f1_tilde + 1.0 / tf);
    Ok(WarmPrefBound {
        value: main + tail,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use rand::Rng;

    #[test]
    fn default_config_hand_values() {
        let c = bound_constants(20, 10, 300, 10.0, 100.0, 4, 0.01).unwrap();
        assert!((c.delta - 3000f64.ln() / 10.0).abs() < 1e-15);
        assert!((c.alpha1 - 10.0 * c.delta).abs() < 1e-14);
        assert!((c.alpha2 - (2.0 * 1200f64.ln()).sqrt() / 100.0).abs() < 1e-15);
        assert!((c.f1_tilde - 0.99f64.powi(40)).abs() < 1e-12);
        assert!((c.f1 - c.f1_tilde - 1.0 / 300.0).abs() < 1e-15);
        assert_eq!(c.f2, 10.0);
    }

    #[test]
    fn huge_dataset_drives_f1_tilde_to_zero() {
        let c = bound_constants(1_000_000, 10, 300, 10.0, 100.0, 4, 0.01).unwrap();
        assert!(c.f1_tilde <= 1e-6);
    }

    #[test]
    fn f2_never_exceeds_k() {
        let mut rng = substream(0, "f2");
        for _ in 0..1000 {
            let k = rng.random_range(2..30);
            let t = rng.random_range(2..2000);
            let beta = 10f64.powf(rng.random_range(-0.2..6.0));
            let lambda = 10f64.powf(rng.random_range(-2.0..6.0));
            let n = rng.random_range(0..10_000);
            let c = bound_constants(n, k, t, beta, lambda, rng.random_range(1..20), rng.random_range(1e-4..0.99)).unwrap();
            assert!(c.f2 <= k as f64);
            assert!(c.appendix_variant_f2 <= k as f64);
            assert!([c.delta, c.alpha1, c.alpha2, c.f1_tilde, c.f1, c.f2].iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn extreme_parameters_stay_finite() {
        for beta in [0.01, 1.0, 1e3, 1e6] {
            for lambda in [1e-3, 1.0, 1e6] {
                let c = bound_constants(50, 10, 300, beta, lambda, 4, 0.05).unwrap();
                let b = warmpref_bound(&c, 10, 300).unwrap();
                assert!(b.value.is_finite());
                assert!(c.f1_tilde.is_finite() && c.f2_unclamped.is_finite());
            }
        }
    }

    #[test]
    fn t_beta_at_most_one_is_rejected() {
        let e = bound_constants(20, 10, 10, 0.1, 100.0, 4, 0.01).unwrap_err();
        assert!(matches!(e, Error::Domain(ref m) if m == "Tbeta<=1"));
    }

    #[test]
    fn monotone_in_n() {
        let mut last = bound_constants(0, 10, 300, 2.0, 1.0, 4, 0.05).unwrap();
        for n in 1..200 {
            let c = bound_constants(n, 10, 300, 2.0, 1.0, 4, 0.05).unwrap();
            assert!(c.f1_tilde < last.f1_tilde);
            assert!(c.f2_unclamped > last.f2_unclamped);
            last = c;
        }
    }

    #[test]
    fn general_bound_cases() {
        let tiny = general_ps_bound(1.0, 1e-12, 10, 300, 2.0).unwrap();
        assert!(tiny < 1e-4);
        let mut prev = 0.0;
        for t in [10, 100, 1000, 10_000] {
            let v = general_ps_bound(3.0, 0.1, 10, t, 2.0).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(general_ps_bound(0.5, 0.1, 10, 10, 1.0).is_err());
    }

    #[test]
    fn warmpref_bound_hand_substitution() {
        let t = 300usize;
        let c = BoundConstants {
            delta: 0.0,
            alpha1: 0.0,
            alpha2: 0.0,
            f1_tilde: 0.0,
            f1: 1.0 / t as f64,
            f2: 1.0,
            f2_unclamped: 1.0,
            appendix_variant_f2: 1.0,
        };
        let b = warmpref_bound(&c, 10, t).unwrap();
        let want = (3000f64).ln().sqrt() + 2.0 * (2.0 * 10f64.ln()).sqrt();
        assert!((b.value - want).abs() < 1e-12);
        assert!(!b.clamped);
        assert!(warmpref_bound(&c, 1, t).is_err());
    }

    #[test]
    fn warmpref_bound_nonincreasing_in_n() {
        let mut prev = f64::INFINITY;
        for n in [5, 20, 50, 200] {
            let c = bound_constants(n, 10, 300, 10.0, 100.0, 4, 0.01).unwrap();
            let v = warmpref_bound(&c, 10, 300).unwrap().value;
            assert!(v <= prev, "{n}: {v} > {prev}");
            prev = v;
        }
    }
}
