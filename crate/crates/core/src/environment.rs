//! The K-armed linear bandit instance: Gaussian prior, action set, the
//! sampled environment parameter and noisy rewards.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Draws a vector of i.i.d. standard normals.
pub fn standard_normal_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Index of the largest entry; ties resolve to the lowest index.
pub fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Index of the largest and second-largest score; ties go to the lower index.
pub fn top_two(scores: &[f64]) -> (usize, usize) {
    let first = argmax(scores.iter().copied());
    let second = argmax(
        scores
            .iter()
            .enumerate()
            .map(|(i, &s)| if i == first { f64::NEG_INFINITY } else { s }),
    );
    (first, second)
}

/// Cholesky factor of a symmetric matrix, reporting the first leading minor
/// that is not positive definite.
pub(crate) fn cholesky(m: &DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    if let Some(ch) = Cholesky::new(m.clone()) {
        return Ok(ch);
    }
    let n = m.nrows();
    let failing = (1..=n)
        .find(|&k| Cholesky::new(m.view((0, 0), (k, k)).into_owned()).is_none())
        .unwrap_or(n);
    Err(Error::numeric(format!(
        "{what} is not positive definite: leading minor of order {failing} fails"
    )))
}

/// Gaussian prior `N(mean, covariance)` over the environment parameter.
#[derive(Debug, Clone)]
pub struct GaussianPrior {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    lower: DMatrix<f64>,
    precision: DMatrix<f64>,
}

impl GaussianPrior {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::config("prior dimension must be at least 1"));
        }
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::numeric(format!(
                "prior covariance is {}x{}, expected {d}x{d}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(Error::numeric("prior contains non-finite entries"));
        }
        let scale = covariance.amax().max(f64::MIN_POSITIVE);
        for i in 0..d {
            for j in 0..i {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::numeric(format!(
                        "prior covariance is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let ch = cholesky(&covariance, "prior covariance")?;
        let precision = ch.inverse();
        let lower = ch.unpack();
        Ok(Self {
            mean,
            covariance,
            lower,
            precision,
        })
    }

    /// Standard prior `N(0, I_d)`.
    pub fn standard(d: usize) -> Result<Self> {
        Self::new(DVector::zeros(d), DMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Lower Cholesky factor `L` with `L Lᵀ = Σ₀`.
    pub fn cholesky_lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    /// `Σ₀⁻¹`.
    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    /// `μ₀ + L z` for a given standard-normal vector `z`.
    pub fn transform(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.mean + &self.lower * z
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = standard_normal_vector(self.dim(), rng);
        self.transform(&z)
    }
}

/// Finite action set with every pairwise L1 distance at most 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSet {
    actions: Vec<DVector<f64>>,
    correlation_target: f64,
}

impl ActionSet {
    /// Wraps explicit action vectors, shrinking them globally if any pair is
    /// further than 1 apart in L1.
    pub fn from_vectors(actions: Vec<DVector<f64>>) -> Result<Self> {
        Self::with_correlation(actions, 0.0)
    }

    fn with_correlation(mut actions: Vec<DVector<f64>>, correlation_target: f64) -> Result<Self> {
        if actions.len() < 2 {
            return Err(Error::config(format!(
                "action set needs at least 2 arms, got {}",
                actions.len()
            )));
        }
        let d = actions[0].len();
        if d == 0 {
            return Err(Error::config("actions must have dimension at least 1"));
        }
        if actions.iter().any(|a| a.len() != d) {
            return Err(Error::numeric("actions have inconsistent dimensions"));
        }
        if actions.iter().any(|a| a.iter().any(|v| !v.is_finite())) {
            return Err(Error::numeric("actions contain non-finite entries"));
        }
        let spread = max_pairwise_l1(&actions);
        if spread > 1.0 {
            for a in &mut actions {
                *a /= spread;
            }
        }
        Ok(Self {
            actions,
            correlation_target,
        })
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.actions[0].len()
    }

    pub fn get(&self, k: usize) -> &DVector<f64> {
        &self.actions[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &DVector<f64>> {
        self.actions.iter()
    }

    pub fn as_slice(&self) -> &[DVector<f64>] {
        &self.actions
    }

    pub fn correlation_target(&self) -> f64 {
        self.correlation_target
    }

    pub fn max_pairwise_l1(&self) -> f64 {
        max_pairwise_l1(&self.actions)
    }

    /// Arm with the highest inner product with `direction` (lowest index on ties).
    pub fn best_arm(&self, direction: &DVector<f64>) -> usize {
        argmax(self.actions.iter().map(|a| a.dot(direction)))
    }

    /// Largest Euclidean norm over the arms.
    pub fn max_norm(&self) -> f64 {
        self.actions.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

fn max_pairwise_l1(actions: &[DVector<f64>]) -> f64 {
    let mut best = 0.0_f64;
    for i in 0..actions.len() {
        for j in (i + 1)..actions.len() {
            best = best.max((&actions[i] - &actions[j]).lp_norm(1));
        }
    }
    best
}

/// Generates `k` arms in `ℝᵈ` whose expected pairwise cosine similarity is `rho`.
///
/// Each arm is `√ρ·u + √(1−ρ)·v_k` with `u` a random unit vector and `v_k`
/// independent random unit vectors orthogonal to `u`, so every arm has unit
/// norm and `E[cos(a_i, a_j)] = ρ`. In one dimension the orthogonal
/// complement is empty and the private parts are plain standard normals.
/// The whole set is then rescaled so the largest pairwise L1 distance is 1.
pub fn build_action_set<R: Rng + ?Sized>(
    k: usize,
    d: usize,
    rho: f64,
    rng: &mut R,
) -> Result<ActionSet> {
    if k < 2 {
        return Err(Error::config(format!("K must be at least 2, got {k}")));
    }
    if d < 1 {
        return Err(Error::config("d must be at least 1"));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::config(format!("rho must lie in [0, 1), got {rho}")));
    }
    let shared = unit_vector(d, rng);
    let (ws, wp) = (rho.sqrt(), (1.0 - rho).sqrt());
    let mut actions = Vec::with_capacity(k);
    for _ in 0..k {
        let private = if d == 1 {
            standard_normal_vector(1, rng)
        } else {
            loop {
                let mut v = standard_normal_vector(d, rng);
                let along = v.dot(&shared);
                v.axpy(-along, &shared, 1.0);
                let n = v.norm();
                if n > 1e-12 {
                    break v / n;
                }
            }
        };
        actions.push(&shared * ws + private * wp);
    }
    let spread = max_pairwise_l1(&actions);
    if spread <= 0.0 {
        return Err(Error::numeric("generated arms coincide"));
    }
    for a in &mut actions {
        *a /= spread;
    }
    ActionSet::with_correlation(actions, rho)
}

fn unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = standard_normal_vector(d, rng);
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// A sampled environment: the parameter and its optimal arm.
#[derive(Debug, Clone)]
pub struct Environment {
    theta: DVector<f64>,
    means: Vec<f64>,
    optimal_index: usize,
    optimal_value: f64,
}

impl Environment {
    pub fn new(theta: DVector<f64>, actions: &ActionSet) -> Result<Self> {
        if theta.len() != actions.dim() {
            return Err(Error::numeric(format!(
                "theta has dimension {}, actions have {}",
                theta.len(),
                actions.dim()
            )));
        }
        let means: Vec<f64> = actions.iter().map(|a| a.dot(&theta)).collect();
        let optimal_index = argmax(means.iter().copied());
        let optimal_value = means[optimal_index];
        Ok(Self {
            theta,
            means,
            optimal_index,
            optimal_value,
        })
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn optimal_index(&self) -> usize {
        self.optimal_index
    }

    pub fn optimal_value(&self) -> f64 {
        self.optimal_value
    }

    /// Mean reward `⟨a_k, θ⟩` of arm `k`.
    pub fn mean_reward(&self, k: usize) -> f64 {
        self.means[k]
    }

    pub fn num_arms(&self) -> usize {
        self.means.len()
    }

    /// Noise-free gap of arm `k`; exactly zero on the optimal arm.
    pub fn arm_regret(&self, k: usize) -> f64 {
        self.optimal_value - self.means[k]
    }
}

/// Draws `θ = μ₀ + L z` and locates the optimal arm.
pub fn sample_environment<R: Rng + ?Sized>(
    prior: &GaussianPrior,
    actions: &ActionSet,
    rng: &mut R,
) -> Result<Environment> {
    if prior.dim() != actions.dim() {
        return Err(Error::numeric(format!(
            "prior dimension {} does not match action dimension {}",
            prior.dim(),
            actions.dim()
        )));
    }
    Environment::new(prior.sample(rng), actions)
}

/// Gaussian observation noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardModel {
    noise_std: f64,
}

impl RewardModel {
    pub fn new(noise_std: f64) -> Result<Self> {
        if !(noise_std > 0.0 && noise_std.is_finite()) {
            return Err(Error::config(format!(
                "noise std must be positive and finite, got {noise_std}"
            )));
        }
        Ok(Self { noise_std })
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    /// `⟨action, θ⟩ + σ z` for a supplied standard-normal draw `z`.
    pub fn reward_with_noise(&self, env: &Environment, action: &DVector<f64>, z: f64) -> Result<f64> {
        if action.len() != env.theta.len() {
            return Err(Error::numeric(format!(
                "action has dimension {}, environment has {}",
                action.len(),
                env.theta.len()
            )));
        }
        Ok(action.dot(&env.theta) + self.noise_std * z)
    }
}

/// Noisy reward of playing `action`.
pub fn reward<R: Rng + ?Sized>(
    env: &Environment,
    action: &DVector<f64>,
    model: &RewardModel,
    rng: &mut R,
) -> Result<f64> {
    let z: f64 = rng.sample(StandardNormal);
    model.reward_with_noise(env, action, z)
}

/// `⟨A*, θ⟩ − ⟨action, θ⟩`.
pub fn instant_regret(env: &Environment, action: &DVector<f64>) -> f64 {
    env.optimal_value - action.dot(&env.theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    #[test]
    fn two_scalar_arms_are_unit_apart() {
        let mut rng = substream(3, "env");
        let set = build_action_set(2, 1, 0.0, &mut rng).unwrap();
        let gap = (set.get(0)[0] - set.get(1)[0]).abs();
        assert!((gap - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_single_arm() {
        let mut rng = substream(0, "env");
        assert!(matches!(build_action_set(1, 4, 0.1, &mut rng), Err(Error::Config(_))));
        assert!(matches!(build_action_set(3, 0, 0.1, &mut rng), Err(Error::Config(_))));
        assert!(matches!(build_action_set(3, 2, 1.0, &mut rng), Err(Error::Config(_))));
    }

    #[test]
    fn mean_pairwise_cosine_matches_target() {
        let mut rng = substream(11, "env");
        let reps = 1000;
        let mut total = 0.0;
        for _ in 0..reps {
            let set = build_action_set(10, 4, 0.8, &mut rng).unwrap();
            let mut sum = 0.0;
            let mut count = 0.0;
            for i in 0..10 {
                for j in (i + 1)..10 {
                    let (a, b) = (set.get(i), set.get(j));
                    sum += a.dot(b) / (a.norm() * b.norm());
                    count += 1.0;
                }
            }
            total += sum / count;
        }
        let mean = total / reps as f64;
        assert!((mean - 0.8).abs() <= 0.05, "mean cosine {mean}");
    }

    #[test]
    fn generated_sets_respect_l1_scale() {
        let mut rng = substream(5, "env");
        for _ in 0..50 {
            let set = build_action_set(7, 3, 0.3, &mut rng).unwrap();
            assert!((set.max_pairwise_l1() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_draw_breaks_tie_at_lowest_index() {
        let prior = GaussianPrior::standard(1).unwrap();
        let actions = ActionSet::from_vectors(vec![dv(&[0.3]), dv(&[-0.2]), dv(&[0.1])]).unwrap();
        let theta = prior.transform(&dv(&[0.0]));
        assert_eq!(theta[0], 0.0);
        let env = Environment::new(theta, &actions).unwrap();
        assert_eq!(env.optimal_index(), 0);
    }

    #[test]
    fn near_degenerate_prior_picks_mean_direction() {
        let prior = GaussianPrior::new(dv(&[1.0, 0.0]), DMatrix::identity(2, 2) * 1e-12).unwrap();
        let actions = ActionSet::from_vectors(vec![dv(&[1.0, 0.0]), dv(&[0.0, 1.0])]).unwrap();
        let mut rng = substream(1, "env");
        let env = sample_environment(&prior, &actions, &mut rng).unwrap();
        assert_eq!(env.optimal_index(), 0);
    }

    #[test]
    fn theta_sample_mean_converges() {
        let prior = GaussianPrior::new(dv(&[0.5, -1.0]), DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5])).unwrap();
        let mut rng = substream(2, "env");
        let n = 10_000;
        let mut acc = DVector::zeros(2);
        for _ in 0..n {
            acc += prior.sample(&mut rng);
        }
        acc /= n as f64;
        for i in 0..2 {
            let sd = prior.covariance()[(i, i)].sqrt();
            assert!((acc[i] - prior.mean()[i]).abs() < 4.0 * sd / (n as f64).sqrt());
        }
    }

    #[test]
    fn non_pd_covariance_names_minor() {
        let cov = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 0.0, 2.0, 1.0]);
        let err = GaussianPrior::new(DVector::zeros(3), cov).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("order 3"), "{msg}");
    }

    #[test]
    fn cholesky_round_trip() {
        let cov = DMatrix::from_row_slice(3, 3, &[4.0, 1.2, -0.4, 1.2, 2.0, 0.3, -0.4, 0.3, 1.5]);
        let prior = GaussianPrior::new(DVector::zeros(3), cov.clone()).unwrap();
        let l = prior.cholesky_lower();
        let rel = (l * l.transpose() - &cov).norm() / cov.norm();
        assert!(rel < 1e-10);
    }

    #[test]
    fn reward_noise_statistics() {
        let actions = ActionSet::from_vectors(vec![dv(&[0.2, 0.1]), dv(&[-0.3, 0.4])]).unwrap();
        let env = Environment::new(dv(&[1.5, -0.7]), &actions).unwrap();
        let model = RewardModel::new(0.8).unwrap();
        let a = actions.get(1);
        assert_eq!(model.reward_with_noise(&env, a, 0.0).unwrap(), a.dot(env.theta()));
        let mut rng = substream(4, "agent:test");
        let n = 10_000;
        let draws: Vec<f64> = (0..n).map(|_| reward(&env, a, &model, &mut rng).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((mean - a.dot(env.theta())).abs() < 4.0 * 0.8 / 100.0);
        assert!((var / 0.64 - 1.0).abs() < 0.1);
        assert!(reward(&env, &dv(&[1.0]), &model, &mut rng).is_err());
    }

    #[test]
    fn top_two_breaks_ties_low() {
        assert_eq!(top_two(&[1.0, 3.0, 3.0, 2.0]), (1, 2));
        assert_eq!(top_two(&[5.0, 1.0]), (0, 1));
    }

    #[test]
    fn regret_hand_values() {
        let actions = ActionSet::from_vectors(vec![dv(&[0.2]), dv(&[1.0])]).unwrap();
        let env = Environment::new(dv(&[1.0]), &actions).unwrap();
        assert_eq!(instant_regret(&env, actions.get(1)), 0.0);
        assert!((instant_regret(&env, actions.get(0)) - 0.8).abs() < 1e-15);
        assert_eq!(env.arm_regret(env.optimal_index()), 0.0);
    }

    #[test]
    fn identical_seeds_give_identical_instances() {
        let prior = GaussianPrior::standard(4).unwrap();
        let mk = || {
            let mut rng = substream(9, "env");
            let set = build_action_set(10, 4, 0.1, &mut rng).unwrap();
            let env = sample_environment(&prior, &set, &mut rng).unwrap();
            (set, env.theta().clone())
        };
        let (s1, t1) = mk();
        let (s2, t2) = mk();
        assert_eq!(s1, s2);
        assert_eq!(t1, t2);
    }
}
