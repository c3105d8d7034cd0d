//! The joint surrogate loss over `(θ, ϑ)`, its perturbed form, derivatives
//! and the MAP solve that every warm-started agent runs once per round.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::environment::{standard_normal_vector, ActionSet, GaussianPrior};
use crate::error::{Error, Result};
use crate::offline_data::{logistic, softplus, OfflineDataset};
use crate::optimizer::{solve, SolveSettings};

/// Online observations `H_t`, oldest first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OnlineHistory {
    steps: Vec<(DVector<f64>, f64)>,
}

impl OnlineHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, action: DVector<f64>, reward: f64) {
        self.steps.push((action, reward));
    }

    pub fn steps(&self) -> &[(DVector<f64>, f64)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// One round's bootstrap noise.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSet {
    /// Additive reward noise, one per online step.
    pub zeta: Vec<f64>,
    /// Bernoulli mask, one per offline tuple.
    pub omega: Vec<bool>,
    pub theta_prime: DVector<f64>,
    pub vartheta_prime: DVector<f64>,
}

impl PerturbationSet {
    /// The perturbation under which the perturbed loss equals the plain one.
    pub fn zero(history_len: usize, n: usize, d: usize) -> Self {
        Self {
            zeta: vec![0.0; history_len],
            omega: vec![true; n],
            theta_prime: DVector::zeros(d),
            vartheta_prime: DVector::zeros(d),
        }
    }
}

/// Draws `P_t` for round `t` (1-based): `ζ ~ N(0,1)` per past step,
/// `ω ~ Bern(½)` per tuple, `θ′ ~ N(μ₀, Σ₀)`, `ϑ′ ~ N(μ₀, I/λ²)`.
///
/// With `λ = ∞` the coupling is a hard constraint, so `ϑ′` is fixed at `μ₀`
/// and no draws are spent on it.
pub fn sample_perturbations<R: Rng + ?Sized>(
    t: usize,
    n: usize,
    lambda: f64,
    prior: &GaussianPrior,
    rng: &mut R,
) -> PerturbationSet {
    assert!(t >= 1, "rounds are numbered from 1");
    let d = prior.dim();
    let zeta = standard_normal_vector(t - 1, rng).as_slice().to_vec();
    let omega = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let theta_prime = prior.sample(rng);
    let vartheta_prime = if lambda.is_finite() {
        prior.mean() + standard_normal_vector(d, rng) / lambda
    } else {
        prior.mean().clone()
    };
    PerturbationSet {
        zeta,
        omega,
        theta_prime,
        vartheta_prime,
    }
}

/// Point estimate returned by one MAP solve.
#[derive(Debug, Clone, PartialEq)]
pub struct MapEstimate {
    pub theta_hat: DVector<f64>,
    pub vartheta_hat: DVector<f64>,
    pub final_gradient_norm: f64,
    pub iterations: usize,
}

/// Everything the loss depends on besides the point and the perturbation.
///
/// `lambda` may be `f64::INFINITY`, in which case `ϑ ≡ θ` and the coupling
/// term disappears; the loss is then `+∞` off the diagonal.
#[derive(Debug, Clone, Copy)]
pub struct SurrogateLoss<'a> {
    pub actions: &'a ActionSet,
    pub history: &'a OnlineHistory,
    pub d0: &'a OfflineDataset,
    pub beta: f64,
    pub lambda: f64,
    pub prior: &'a GaussianPrior,
}

impl<'a> SurrogateLoss<'a> {
    pub fn new(
        actions: &'a ActionSet,
        history: &'a OnlineHistory,
        d0: &'a OfflineDataset,
        beta: f64,
        lambda: f64,
        prior: &'a GaussianPrior,
    ) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::config(format!("beta must be finite and non-negative, got {beta}")));
        }
        if !(lambda > 0.0) {
            return Err(Error::config(format!("lambda must be positive, got {lambda}")));
        }
        if prior.dim() != actions.dim() {
            return Err(Error::numeric(format!(
                "prior dimension {} does not match action dimension {}",
                prior.dim(),
                actions.dim()
            )));
        }
        if d0.num_arms() != actions.len() {
            return Err(Error::numeric(format!(
                "dataset indexes {} arms, action set has {}",
                d0.num_arms(),
                actions.len()
            )));
        }
        if let Some((a, _)) = history.steps().iter().find(|(a, _)| a.len() != actions.dim()) {
            return Err(Error::numeric(format!(
                "history action of dimension {} in a {}-dimensional problem",
                a.len(),
                actions.dim()
            )));
        }
        Ok(Self {
            actions,
            history,
            d0,
            beta,
            lambda,
            prior,
        })
    }

    pub fn dim(&self) -> usize {
        self.actions.dim()
    }

    pub fn is_exact(&self) -> bool {
        self.lambda.is_infinite()
    }

    /// `a_loser − a_winner` per tuple; the L₂ term is `softplus(β⟨v, ϑ⟩)`.
    fn loser_minus_winner(&self, n: usize) -> DVector<f64> {
        let tuple = &self.d0.tuples()[n];
        self.actions.get(tuple.loser()) - self.actions.get(tuple.winner())
    }

    fn check(&self, theta: &DVector<f64>, vartheta: &DVector<f64>, p: &PerturbationSet) -> Result<()> {
        let d = self.dim();
        for (name, v) in [
            ("theta", theta),
            ("vartheta", vartheta),
            ("theta_prime", &p.theta_prime),
            ("vartheta_prime", &p.vartheta_prime),
        ] {
            if v.len() != d {
                return Err(Error::numeric(format!("{name} has dimension {}, expected {d}", v.len())));
            }
        }
        if p.zeta.len() != self.history.len() {
            return Err(Error::numeric(format!(
                "{} reward perturbations for {} online steps",
                p.zeta.len(),
                self.history.len()
            )));
        }
        if p.omega.len() != self.d0.len() {
            return Err(Error::numeric(format!(
                "{} tuple weights for {} offline tuples",
                p.omega.len(),
                self.d0.len()
            )));
        }
        Ok(())
    }

    /// Unperturbed `L₁ + L₂ + L₃`.
    pub fn surrogate_loss(&self, theta: &DVector<f64>, vartheta: &DVector<f64>) -> Result<f64> {
        let zero = PerturbationSet::zero(self.history.len(), self.d0.len(), self.dim());
        self.perturbed_loss(theta, vartheta, &zero)
    }

    /// `L₁′ + L₂′ + L₃′`.
    pub fn perturbed_loss(&self, theta: &DVector<f64>, vartheta: &DVector<f64>, p: &PerturbationSet) -> Result<f64> {
        self.check(theta, vartheta, p)?;
        if self.is_exact() {
            if theta != vartheta {
                return Ok(f64::INFINITY);
            }
            return Ok(self.online_term(theta, p) + self.offline_term(theta, p) + self.prior_term(theta, p));
        }
        let coupling = theta - vartheta + &p.vartheta_prime;
        Ok(self.online_term(theta, p)
            + self.offline_term(vartheta, p)
            + 0.5 * self.lambda * self.lambda * coupling.norm_squared()
            + self.prior_term(theta, p))
    }

    fn online_term(&self, theta: &DVector<f64>, p: &PerturbationSet) -> f64 {
        self.history
            .steps()
            .iter()
            .zip(&p.zeta)
            .map(|((a, r), z)| {
                let e = r + z - a.dot(theta);
                0.5 * e * e
            })
            .sum()
    }

    fn offline_term(&self, vartheta: &DVector<f64>, p: &PerturbationSet) -> f64 {
        (0..self.d0.len())
            .filter(|&n| p.omega[n])
            .map(|n| softplus(self.beta * self.loser_minus_winner(n).dot(vartheta)))
            .sum()
    }

    fn prior_term(&self, theta: &DVector<f64>, p: &PerturbationSet) -> f64 {
        let r = theta - self.prior.mean() - &p.theta_prime;
        0.5 * r.dot(&(self.prior.precision() * &r))
    }

    /// `(∂L′/∂θ, ∂L′/∂ϑ)`. Requires finite `λ`; see [`Self::collapsed_gradient`].
    pub fn loss_gradient(
        &self,
        theta: &DVector<f64>,
        vartheta: &DVector<f64>,
        p: &PerturbationSet,
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        self.check(theta, vartheta, p)?;
        if self.is_exact() {
            return Err(Error::numeric("joint gradient is undefined for lambda = inf"));
        }
        let coupling = (theta - vartheta + &p.vartheta_prime) * (self.lambda * self.lambda);
        let g_theta = self.online_gradient(theta, p) + &coupling + self.prior_gradient(theta, p);
        let g_vartheta = self.offline_gradient(vartheta, p) - coupling;
        Ok((g_theta, g_vartheta))
    }

    fn online_gradient(&self, theta: &DVector<f64>, p: &PerturbationSet) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim());
        for ((a, r), z) in self.history.steps().iter().zip(&p.zeta) {
            g -= a * (r + z - a.dot(theta));
        }
        g
    }

    fn offline_gradient(&self, vartheta: &DVector<f64>, p: &PerturbationSet) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim());
        if self.beta == 0.0 {
            return g;
        }
        for n in (0..self.d0.len()).filter(|&n| p.omega[n]) {
            let v = self.loser_minus_winner(n);
            let s = logistic(self.beta * v.dot(vartheta));
            g += v * (self.beta * s);
        }
        g
    }

    fn prior_gradient(&self, theta: &DVector<f64>, p: &PerturbationSet) -> DVector<f64> {
        self.prior.precision() * (theta - self.prior.mean() - &p.theta_prime)
    }

    fn online_curvature(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut h = DMatrix::zeros(d, d);
        for (a, _) in self.history.steps() {
            h.ger(1.0, a, a, 1.0);
        }
        h
    }

    fn offline_curvature(&self, vartheta: &DVector<f64>, p: &PerturbationSet) -> DMatrix<f64> {
        let d = self.dim();
        let mut h = DMatrix::zeros(d, d);
        if self.beta == 0.0 {
            return h;
        }
        for n in (0..self.d0.len()).filter(|&n| p.omega[n]) {
            let v = self.loser_minus_winner(n);
            let s = logistic(self.beta * v.dot(vartheta));
            let w = self.beta * self.beta * s * (1.0 - s);
            if w > 0.0 {
                h.ger(w, &v, &v, 1.0);
            }
        }
        h
    }

    /// `2d × 2d` Hessian in `(θ, ϑ)` block order. Requires finite `λ`.
    pub fn loss_hessian(&self, theta: &DVector<f64>, vartheta: &DVector<f64>, p: &PerturbationSet) -> Result<DMatrix<f64>> {
        self.check(theta, vartheta, p)?;
        if self.is_exact() {
            return Err(Error::numeric("joint Hessian is undefined for lambda = inf"));
        }
        let d = self.dim();
        let l2 = self.lambda * self.lambda;
        let eye = DMatrix::<f64>::identity(d, d);
        let mut h = DMatrix::zeros(2 * d, 2 * d);
        h.view_mut((0, 0), (d, d))
            .copy_from(&(self.online_curvature() + &eye * l2 + self.prior.precision()));
        h.view_mut((0, d), (d, d)).copy_from(&(&eye * -l2));
        h.view_mut((d, 0), (d, d)).copy_from(&(&eye * -l2));
        h.view_mut((d, d), (d, d))
            .copy_from(&(self.offline_curvature(vartheta, p) + &eye * l2));
        Ok(h)
    }

    /// Loss restricted to `ϑ = θ` (the `λ = ∞` problem).
    pub fn collapsed_loss(&self, theta: &DVector<f64>, p: &PerturbationSet) -> Result<f64> {
        self.check(theta, theta, p)?;
        Ok(self.online_term(theta, p) + self.offline_term(theta, p) + self.prior_term(theta, p))
    }

    pub fn collapsed_gradient(&self, theta: &DVector<f64>, p: &PerturbationSet) -> Result<DVector<f64>> {
        self.check(theta, theta, p)?;
        Ok(self.online_gradient(theta, p) + self.offline_gradient(theta, p) + self.prior_gradient(theta, p))
    }

    pub fn collapsed_hessian(&self, theta: &DVector<f64>, p: &PerturbationSet) -> Result<DMatrix<f64>> {
        self.check(theta, theta, p)?;
        Ok(self.online_curvature() + self.offline_curvature(theta, p) + self.prior.precision())
    }

    /// Gradient tolerance actually enforced: the configured value scaled by
    /// the loss's magnitude so that it stays above the floating-point floor.
    pub fn effective_tolerance(&self, settings: &SolveSettings) -> f64 {
        let coupling = if self.is_exact() { 0.0 } else { self.lambda * self.lambda };
        settings.grad_tolerance * (1.0 + coupling + self.beta + self.history.len() as f64)
    }

    /// Minimizes the perturbed loss from `start` (or `(μ₀, μ₀)`).
    ///
    /// Fails with a numeric error carrying the solver diagnostics when the
    /// gradient tolerance is not reached.
    pub fn solve_map(
        &self,
        p: &PerturbationSet,
        start: Option<(&DVector<f64>, &DVector<f64>)>,
        settings: &SolveSettings,
    ) -> Result<MapEstimate> {
        let d = self.dim();
        let mu = self.prior.mean();
        let (t0, v0) = start.unwrap_or((mu, mu));
        self.check(t0, v0, p)?;
        let mut local = *settings;
        local.grad_tolerance = self.effective_tolerance(settings);

        if self.is_exact() {
            let sol = solve(
                |x| self.collapsed_loss(x, p).unwrap_or(f64::INFINITY),
                |x| self.collapsed_gradient(x, p).expect("dimensions checked"),
                |x| self.collapsed_hessian(x, p).expect("dimensions checked"),
                t0,
                &local,
            );
            return finish(sol, d, &local, true);
        }

        let split = |x: &DVector<f64>| (x.rows(0, d).into_owned(), x.rows(d, d).into_owned());
        let mut x0 = DVector::zeros(2 * d);
        x0.rows_mut(0, d).copy_from(t0);
        x0.rows_mut(d, d).copy_from(v0);
        let sol = solve(
            |x| {
                let (t, v) = split(x);
                self.perturbed_loss(&t, &v, p).unwrap_or(f64::INFINITY)
            },
            |x| {
                let (t, v) = split(x);
                let (gt, gv) = self.loss_gradient(&t, &v, p).expect("dimensions checked");
                let mut g = DVector::zeros(2 * d);
                g.rows_mut(0, d).copy_from(&gt);
                g.rows_mut(d, d).copy_from(&gv);
                g
            },
            |x| {
                let (t, v) = split(x);
                self.loss_hessian(&t, &v, p).expect("dimensions checked")
            },
            &x0,
            &local,
        );
        finish(sol, d, &local, false)
    }
}

fn finish(sol: crate::optimizer::Solution, d: usize, settings: &SolveSettings, exact: bool) -> Result<MapEstimate> {
    let r = &sol.report;
    if !r.converged || !r.final_value.is_finite() {
        return Err(Error::numeric(format!(
            "MAP solve did not converge: {} iterations, gradient norm {:.3e} > tolerance {:.3e}, objective {:.6e}",
            r.iterations, r.final_grad_norm, settings.grad_tolerance, r.final_value
        )));
    }
    let (theta_hat, vartheta_hat) = if exact {
        (sol.x.clone(), sol.x.clone())
    } else {
        (sol.x.rows(0, d).into_owned(), sol.x.rows(d, d).into_owned())
    };
    Ok(MapEstimate {
        theta_hat,
        vartheta_hat,
        final_gradient_norm: r.final_grad_norm,
        iterations: r.iterations,
    })
}
