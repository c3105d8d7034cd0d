//! Deterministic smooth convex minimization.
//!
//! Two descent directions share one Armijo backtracking line search:
//! steepest descent ([`minimize`]) and damped Newton ([`minimize_newton`]).
//! The bandit losses couple `θ` and `ϑ` through a `λ²` term, so their
//! Hessians have condition numbers of order `λ²`; the agents use the Newton
//! variant, which converges in a handful of iterations regardless.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// Which search direction [`solve`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    GradientDescent,
    #[default]
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveSettings {
    /// Stop once `‖∇f‖₂` falls to this value.
    pub grad_tolerance: f64,
    pub max_iterations: usize,
    /// First trial step of gradient descent.
    pub initial_step: f64,
    /// Backtracking contraction factor, in `(0, 1)`.
    pub shrink: f64,
    /// Expansion of the trial step when no curvature estimate is available.
    pub growth: f64,
    /// Armijo sufficient-decrease parameter.
    pub armijo: f64,
    pub method: Method,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            grad_tolerance: 1e-8,
            max_iterations: 5000,
            initial_step: 1.0,
            shrink: 0.5,
            growth: 2.0,
            armijo: 0.25,
            method: Method::Newton,
        }
    }
}

impl SolveSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tolerance > 0.0) {
            return Err(Error::config("grad_tolerance must be positive"));
        }
        if self.max_iterations < 1 {
            return Err(Error::config("max_iterations must be at least 1"));
        }
        if !(self.initial_step > 0.0) {
            return Err(Error::config("initial_step must be positive"));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0 && self.growth > 1.0) {
            return Err(Error::config("need 0 < shrink < 1 < growth"));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(Error::config("armijo parameter must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_grad_norm: f64,
    pub final_value: f64,
    pub converged: bool,
    /// Objective after each accepted step, starting with the value at `x0`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: DVector<f64>,
    pub report: SolveReport,
}

const MAX_BACKTRACKS: usize = 200;
const ROUNDING: f64 = 1e-13;

/// Gradient descent with Armijo backtracking.
///
/// The trial step is the Barzilai–Borwein estimate `sᵀs / sᵀy` from the last
/// accepted move when that is positive, otherwise the previous step scaled by
/// `growth`.
pub fn minimize<F, G>(objective: F, gradient: G, x0: &DVector<f64>, settings: &SolveSettings) -> Solution
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut x = x0.clone();
    let mut f = objective(&x);
    let mut g = gradient(&x);
    let mut values = vec![f];
    let mut step = settings.initial_step;
    let mut last: Option<(DVector<f64>, DVector<f64>)> = None;

    for iter in 0..settings.max_iterations {
        let gnorm = g.norm();
        if gnorm <= settings.grad_tolerance {
            return finish(x, f, gnorm, iter, true, values);
        }
        let mut t = match &last {
            Some((s, y)) => {
                let sy = s.dot(y);
                if sy > 0.0 {
                    s.norm_squared() / sy
                } else {
                    step * settings.growth
                }
            }
            None => step,
        };
        let g2 = gnorm * gnorm;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate = &x - &g * t;
            let fc = objective(&candidate);
            if fc.is_finite() && fc <= f - settings.armijo * t * g2 {
                accepted = Some((candidate, fc));
                break;
            }
            t *= settings.shrink;
        }
        let Some((xn, fnew)) = accepted else {
            return finish(x, f, gnorm, iter, false, values);
        };
        let gn = gradient(&xn);
        last = Some((&xn - &x, &gn - &g));
        step = t;
        x = xn;
        f = fnew;
        g = gn;
        values.push(f);
    }
    let gnorm = g.norm();
    let converged = gnorm <= settings.grad_tolerance;
    finish(x, f, gnorm, settings.max_iterations, converged, values)
}

/// Damped Newton with the same Armijo backtracking (full step tried first).
///
/// If the Hessian is not numerically positive definite a growing multiple of
/// the identity is added until the factorization succeeds.
pub fn minimize_newton<F, G, H>(
    objective: F,
    gradient: G,
    hessian: H,
    x0: &DVector<f64>,
    settings: &SolveSettings,
) -> Solution
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
    H: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    let mut x = x0.clone();
    let mut f = objective(&x);
    let mut g = gradient(&x);
    let mut values = vec![f];

    for iter in 0..settings.max_iterations {
        let gnorm = g.norm();
        if gnorm <= settings.grad_tolerance {
            return finish(x, f, gnorm, iter, true, values);
        }
        let hess = hessian(&x);
        let Some(direction) = newton_direction(&hess, &g) else {
            return finish(x, f, gnorm, iter, false, values);
        };
        let slope = g.dot(&direction);
        let (direction, slope) = if slope < 0.0 {
            (direction, slope)
        } else {
            (-&g, -gnorm * gnorm)
        };
        let mut t = 1.0;
        let mut accepted = None;
        for attempt in 0..MAX_BACKTRACKS {
            let candidate = &x + &direction * t;
            let fc = objective(&candidate);
            if fc.is_finite() && fc <= f + settings.armijo * t * slope {
                accepted = Some((candidate, fc, None));
                break;
            }
            // Near the optimum the predicted decrease can fall below the
            // rounding of f; then accept the full step if the gradient shrinks.
            if attempt == 0 && fc.is_finite() && (fc - f).abs() <= ROUNDING * (1.0 + f.abs()) {
                let gc = gradient(&candidate);
                if gc.norm() < gnorm {
                    accepted = Some((candidate, fc.min(f), Some(gc)));
                    break;
                }
            }
            t *= settings.shrink;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            return finish(x, f, gnorm, iter, false, values);
        };
        x = xn;
        f = fnew;
        g = gnew.unwrap_or_else(|| gradient(&x));
        values.push(f);
    }
    let gnorm = g.norm();
    let converged = gnorm <= settings.grad_tolerance;
    finish(x, f, gnorm, settings.max_iterations, converged, values)
}

/// Dispatches on `settings.method`.
pub fn solve<F, G, H>(
    objective: F,
    gradient: G,
    hessian: H,
    x0: &DVector<f64>,
    settings: &SolveSettings,
) -> Solution
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
    H: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    match settings.method {
        Method::GradientDescent => minimize(objective, gradient, x0, settings),
        Method::Newton => minimize_newton(objective, gradient, hessian, x0, settings),
    }
}

fn newton_direction(hess: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = Cholesky::new(hess.clone()) {
        return Some(-ch.solve(g));
    }
    let n = hess.nrows();
    let mut tau = 1e-10 * hess.amax().max(1.0);
    for _ in 0..40 {
        let shifted = hess + DMatrix::identity(n, n) * tau;
        if let Some(ch) = Cholesky::new(shifted) {
            return Some(-ch.solve(g));
        }
        tau *= 10.0;
    }
    None
}

fn finish(
    x: DVector<f64>,
    f: f64,
    gnorm: f64,
    iterations: usize,
    converged: bool,
    values: Vec<f64>,
) -> Solution {
    Solution {
        x,
        report: SolveReport {
            iterations,
            final_grad_norm: gnorm,
            final_value: f,
            converged,
            values,
        },
    }
}

/// Largest coordinate-wise disagreement between `gradient` and central
/// differences of `objective`, relative to `max(1, |analytic|)`.
pub fn check_gradient<F, G>(objective: F, gradient: G, x: &DVector<f64>, h: f64) -> f64
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    assert!(h > 0.0, "finite-difference step must be positive");
    let analytic = gradient(x);
    let mut worst = 0.0_f64;
    let mut probe = x.clone();
    for i in 0..x.len() {
        let orig = probe[i];
        probe[i] = orig + h;
        let up = objective(&probe);
        probe[i] = orig - h;
        let down = objective(&probe);
        probe[i] = orig;
        let fd = (up - down) / (2.0 * h);
        let err = (analytic[i] - fd).abs() / analytic[i].abs().max(1.0);
        worst = worst.max(err);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[allow(clippy::type_complexity)]
    fn quad(a: DMatrix<f64>, b: DVector<f64>) -> (impl Fn(&DVector<f64>) -> f64, impl Fn(&DVector<f64>) -> DVector<f64>) {
        let a2 = a.clone();
        let b2 = b.clone();
        (
            move |x: &DVector<f64>| 0.5 * x.dot(&(&a * x)) - b.dot(x),
            move |x: &DVector<f64>| &a2 * x - &b2,
        )
    }

    fn gd() -> SolveSettings {
        SolveSettings {
            method: Method::GradientDescent,
            ..SolveSettings::default()
        }
    }

    #[test]
    fn recovers_center_of_isotropic_quadratic() {
        let c = DVector::from_vec(vec![1.5, -2.0, 0.25]);
        let (f, g) = quad(DMatrix::identity(3, 3), c.clone());
        let sol = minimize(f, g, &DVector::from_vec(vec![10.0, 10.0, -7.0]), &gd());
        assert!(sol.report.converged);
        assert!((sol.x - c).amax() < 1e-7);
    }

    #[test]
    fn ill_conditioned_quadratic_converges_monotonically() {
        let a = DMatrix::from_row_slice(2, 2, &[1000.0, 0.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![3.0, -1.0]);
        let exact = DVector::from_vec(vec![3.0 / 1000.0, -1.0]);
        let (f, g) = quad(a, b);
        let sol = minimize(f, g, &DVector::from_vec(vec![5.0, 5.0]), &gd());
        assert!(sol.report.converged, "{:?}", sol.report.iterations);
        assert!((sol.x - exact).norm() < 1e-8);
        assert!(sol.report.values.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn already_optimal_start() {
        let c = DVector::from_vec(vec![0.5, 0.5]);
        let (f, g) = quad(DMatrix::identity(2, 2), c.clone());
        let sol = minimize(f, g, &c, &gd());
        assert!(sol.report.converged);
        assert!(sol.report.iterations <= 1);
    }

    #[test]
    fn newton_solves_quadratic_in_one_step() {
        let a = DMatrix::from_row_slice(2, 2, &[1e6, 3.0, 3.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let exact = a.clone().cholesky().unwrap().solve(&b);
        let (f, g) = quad(a.clone(), b);
        let sol = minimize_newton(f, g, |_| a.clone(), &DVector::zeros(2), &SolveSettings::default());
        assert!(sol.report.converged);
        assert!(sol.report.iterations <= 2);
        assert!((sol.x - exact).norm() < 1e-9);
    }

    #[test]
    fn non_convergence_is_reported() {
        let (f, g) = quad(DMatrix::from_row_slice(2, 2, &[1e4, 0.0, 0.0, 1.0]), DVector::from_vec(vec![1.0, 1.0]));
        let settings = SolveSettings {
            max_iterations: 3,
            ..gd()
        };
        let sol = minimize(f, g, &DVector::from_vec(vec![9.0, -9.0]), &settings);
        assert!(!sol.report.converged);
        assert_eq!(sol.report.iterations, 3);
    }

    #[test]
    fn determinism() {
        let (f, g) = quad(DMatrix::from_row_slice(2, 2, &[50.0, 1.0, 1.0, 2.0]), DVector::from_vec(vec![1.0, -1.0]));
        let x0 = DVector::from_vec(vec![3.0, 4.0]);
        let a = minimize(&f, &g, &x0, &gd());
        let b = minimize(&f, &g, &x0, &gd());
        assert_eq!(a, b);
    }

    #[test]
    fn gradient_checker_exact_on_linear() {
        let w = DVector::from_vec(vec![1.0, -2.0, 3.5]);
        let w2 = w.clone();
        let err = check_gradient(move |x| w.dot(x), move |_| w2.clone(), &DVector::from_vec(vec![0.3, 0.1, -4.0]), 1e-5);
        assert!(err <= 1e-10);
    }

    #[test]
    fn gradient_checker_detects_corruption() {
        let f = |x: &DVector<f64>| x.map(|v| v.exp()).sum();
        let g = |x: &DVector<f64>| {
            let mut out = x.map(|v| v.exp());
            out[1] *= 1.1;
            out
        };
        let err = check_gradient(f, g, &DVector::from_vec(vec![0.2, 1.0, -0.5]), 1e-5);
        assert!(err >= 1e-2);
    }

    #[test]
    fn settings_validation() {
        assert!(SolveSettings::default().validate().is_ok());
        let bad = SolveSettings {
            shrink: 1.5,
            ..SolveSettings::default()
        };
        assert!(bad.validate().is_err());
    }
}
