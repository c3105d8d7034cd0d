//! Rater model and the offline preference dataset.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::DVector;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::environment::{standard_normal_vector, ActionSet, Environment};
use crate::error::{Error, Result};

/// How precisely the rater knows the environment parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Knowledge {
    /// `ϑ ∼ N(θ, I/λ²)`.
    Finite(f64),
    /// `ϑ = θ` (the `λ → ∞` limit).
    Exact,
}

impl Knowledge {
    /// Maps `f64::INFINITY` to [`Knowledge::Exact`].
    pub fn from_lambda(lambda: f64) -> Self {
        if lambda == f64::INFINITY {
            Knowledge::Exact
        } else {
            Knowledge::Finite(lambda)
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            Knowledge::Finite(l) => *l,
            Knowledge::Exact => f64::INFINITY,
        }
    }
}

/// Deliberateness `β` and knowledgeability `λ` of a rater.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaterCompetence {
    pub beta: f64,
    pub knowledge: Knowledge,
}

impl RaterCompetence {
    pub fn new(beta: f64, knowledge: Knowledge) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::config(format!("beta must be finite and >= 0, got {beta}")));
        }
        if let Knowledge::Finite(l) = knowledge {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::config(format!(
                    "lambda must be positive (use the exact-knowledge flag for infinity), got {l}"
                )));
            }
        }
        Ok(Self { beta, knowledge })
    }
}

/// How the rater turns its utility estimate into a preference bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    BradleyTerry,
    DeterministicGreedy,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::BradleyTerry => "bradley_terry",
            PolicyKind::DeterministicGreedy => "greedy",
        })
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bradley_terry" => Ok(PolicyKind::BradleyTerry),
            "greedy" => Ok(PolicyKind::DeterministicGreedy),
            other => Err(Error::config(format!("unknown expert policy `{other}`"))),
        }
    }
}

/// A rater with a fixed belief `ϑ` about the environment.
#[derive(Debug, Clone)]
pub struct Rater {
    vartheta: DVector<f64>,
    competence: RaterCompetence,
    policy: PolicyKind,
}

impl Rater {
    pub fn new(vartheta: DVector<f64>, competence: RaterCompetence, policy: PolicyKind) -> Result<Self> {
        if vartheta.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("rater belief has non-finite entries"));
        }
        Ok(Self {
            vartheta,
            competence,
            policy,
        })
    }

    pub fn vartheta(&self) -> &DVector<f64> {
        &self.vartheta
    }

    pub fn competence(&self) -> RaterCompetence {
        self.competence
    }

    pub fn policy(&self) -> PolicyKind {
        self.policy
    }

    /// Preference bit for the ordered pair `(a0, a1)`; `0` means `a0` is preferred.
    pub fn judge<R: Rng + ?Sized>(&self, a0: &DVector<f64>, a1: &DVector<f64>, rng: &mut R) -> u8 {
        match self.policy {
            PolicyKind::BradleyTerry => {
                let p0 = preference_prob(a0, a1, &self.vartheta, self.competence.beta);
                if rng.random::<f64>() < p0 {
                    0
                } else {
                    1
                }
            }
            PolicyKind::DeterministicGreedy => {
                if a0.dot(&self.vartheta) >= a1.dot(&self.vartheta) {
                    0
                } else {
                    1
                }
            }
        }
    }
}

/// Draws the rater's belief `ϑ = θ + z/λ`.
pub fn sample_rater<R: Rng + ?Sized>(
    env: &Environment,
    competence: RaterCompetence,
    policy: PolicyKind,
    rng: &mut R,
) -> Result<Rater> {
    let competence = RaterCompetence::new(competence.beta, competence.knowledge)?;
    let vartheta = match competence.knowledge {
        Knowledge::Exact => env.theta().clone(),
        Knowledge::Finite(lambda) => {
            env.theta() + standard_normal_vector(env.theta().len(), rng) / lambda
        }
    };
    Rater::new(vartheta, competence, policy)
}

/// `ln(1 + eˣ)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Logistic function. `logistic(x) + logistic(-x) == 1` holds exactly.
pub fn logistic(x: f64) -> f64 {
    let s = 1.0 / (1.0 + (-x.abs()).exp());
    if x >= 0.0 {
        s
    } else {
        1.0 - s
    }
}

/// Bradley–Terry probability that `a0` is preferred to `a1`.
pub fn preference_prob(a0: &DVector<f64>, a1: &DVector<f64>, vartheta: &DVector<f64>, beta: f64) -> f64 {
    logistic(beta * (a0 - a1).dot(vartheta))
}

/// One offline comparison `(Ā⁽⁰⁾, Ā⁽¹⁾, Y)` stored as arm indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PreferenceTuple {
    pub idx0: usize,
    pub idx1: usize,
    /// `0` when `idx0` was preferred, `1` otherwise.
    pub y: u8,
}

impl PreferenceTuple {
    pub fn new(idx0: usize, idx1: usize, y: u8) -> Result<Self> {
        if y > 1 {
            return Err(Error::config(format!("preference bit must be 0 or 1, got {y}")));
        }
        Ok(Self { idx0, idx1, y })
    }

    pub fn winner(&self) -> usize {
        if self.y == 0 {
            self.idx0
        } else {
            self.idx1
        }
    }

    pub fn loser(&self) -> usize {
        if self.y == 0 {
            self.idx1
        } else {
            self.idx0
        }
    }

    pub fn is_self_comparison(&self) -> bool {
        self.idx0 == self.idx1
    }
}

/// Distribution `μ` used to draw the compared arms.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingDistribution {
    weights: Vec<f64>,
    mu_min: f64,
    mu_max: f64,
}

impl SamplingDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::config("sampling distribution needs at least one weight"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::config("sampling weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!("sampling weights sum to {total}, expected 1")));
        }
        let positive = weights.iter().copied().filter(|w| *w > 0.0);
        let mu_min = positive.clone().fold(f64::INFINITY, f64::min);
        let mu_max = positive.fold(0.0, f64::max);
        Ok(Self {
            weights,
            mu_min,
            mu_max,
        })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("uniform sampling over zero arms"));
        }
        Self::new(vec![1.0 / k as f64; k]).or_else(|_| {
            // 1/k summed k times can miss 1 by more than 1e-12 only for huge k.
            let mut w = vec![1.0 / k as f64; k];
            let rest: f64 = w[1..].iter().sum();
            w[0] = 1.0 - rest;
            Self::new(w)
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mu_min(&self) -> f64 {
        self.mu_min
    }

    pub fn mu_max(&self) -> f64 {
        self.mu_max
    }

    fn sampler(&self) -> WeightedIndex<f64> {
        WeightedIndex::new(&self.weights).expect("validated weights")
    }
}

/// Ordered offline preference dataset `D₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineDataset {
    tuples: Vec<PreferenceTuple>,
    sampling: SamplingDistribution,
}

impl OfflineDataset {
    pub fn new(tuples: Vec<PreferenceTuple>, sampling: SamplingDistribution) -> Result<Self> {
        let k = sampling.len();
        if let Some(bad) = tuples.iter().find(|t| t.idx0 >= k || t.idx1 >= k) {
            return Err(Error::config(format!(
                "tuple ({}, {}) references an arm outside [0, {k})",
                bad.idx0, bad.idx1
            )));
        }
        Ok(Self { tuples, sampling })
    }

    pub fn empty(sampling: SamplingDistribution) -> Self {
        Self {
            tuples: Vec::new(),
            sampling,
        }
    }

    pub fn tuples(&self) -> &[PreferenceTuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn sampling(&self) -> &SamplingDistribution {
        &self.sampling
    }

    pub fn num_arms(&self) -> usize {
        self.sampling.len()
    }

    pub fn push(&mut self, tuple: PreferenceTuple) -> Result<()> {
        let k = self.num_arms();
        if tuple.idx0 >= k || tuple.idx1 >= k {
            return Err(Error::config(format!("tuple references an arm outside [0, {k})")));
        }
        self.tuples.push(tuple);
        Ok(())
    }

    /// Writes the line-oriented text format:
    /// a `# prefbandit-dataset v1 K=<K> d=<d>` header, then `n,idx0,idx1,y` per tuple.
    pub fn write_to<W: Write>(&self, d: usize, mut out: W) -> Result<()> {
        writeln!(out, "# prefbandit-dataset v1 K={} d={}", self.num_arms(), d)?;
        for (n, t) in self.tuples.iter().enumerate() {
            writeln!(out, "{},{},{},{}", n, t.idx0, t.idx1, t.y)?;
        }
        Ok(())
    }

    pub fn to_text(&self, d: usize) -> String {
        let mut buf = Vec::new();
        self.write_to(d, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// A dataset read back from disk together with its header.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub k: usize,
    pub d: usize,
    pub tuples: Vec<PreferenceTuple>,
}

impl DatasetFile {
    /// Attaches a sampling distribution (uniform when `None`).
    pub fn into_dataset(self, sampling: Option<SamplingDistribution>) -> Result<OfflineDataset> {
        let sampling = match sampling {
            Some(s) => s,
            None => SamplingDistribution::uniform(self.k)?,
        };
        if sampling.len() != self.k {
            return Err(Error::config(format!(
                "dataset has K={} but sampling distribution has {} weights",
                self.k,
                sampling.len()
            )));
        }
        OfflineDataset::new(self.tuples, sampling)
    }
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse {
        line: 1,
        message: format!("expected `# prefbandit-dataset v1 K=<K> d=<d>`, got `{line}`"),
    };
    let rest = line.strip_prefix("# prefbandit-dataset v1 ").ok_or_else(bad)?;
    let mut parts = rest.split(' ');
    let k = parts
        .next()
        .and_then(|p| p.strip_prefix("K="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    let d = parts
        .next()
        .and_then(|p| p.strip_prefix("d="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((k, d))
}

/// Parses the dataset text format.
pub fn read_dataset<R: BufRead>(input: R) -> Result<DatasetFile> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty dataset file".into(),
    })??;
    let (k, d) = parse_header(&header)?;
    let mut tuples = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        let err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 comma-separated fields, got `{line}`")));
        }
        let nums: Vec<usize> = fields
            .iter()
            .map(|f| f.parse::<usize>().map_err(|_| err(format!("invalid integer `{f}`"))))
            .collect::<Result<_>>()?;
        if nums[0] != tuples.len() {
            return Err(err(format!("expected tuple index {}, got {}", tuples.len(), nums[0])));
        }
        if nums[1] >= k || nums[2] >= k {
            return Err(err(format!("arm index out of range for K={k}")));
        }
        if nums[3] > 1 {
            return Err(err(format!("preference bit must be 0 or 1, got {}", nums[3])));
        }
        tuples.push(PreferenceTuple {
            idx0: nums[1],
            idx1: nums[2],
            y: nums[3] as u8,
        });
    }
    Ok(DatasetFile { k, d, tuples })
}

/// Draws `n` comparisons with arms i.i.d. from `sampling` and labels them with the rater.
pub fn generate_dataset<R: Rng + ?Sized>(
    actions: &ActionSet,
    rater: &Rater,
    sampling: &SamplingDistribution,
    n: usize,
    rng: &mut R,
) -> Result<OfflineDataset> {
    if sampling.len() != actions.len() {
        return Err(Error::config(format!(
            "sampling distribution has {} weights for {} arms",
            sampling.len(),
            actions.len()
        )));
    }
    let pick = sampling.sampler();
    let mut tuples = Vec::with_capacity(n);
    for _ in 0..n {
        let idx0 = pick.sample(rng);
        let idx1 = pick.sample(rng);
        let y = rater.judge(actions.get(idx0), actions.get(idx1), rng);
        tuples.push(PreferenceTuple { idx0, idx1, y });
    }
    OfflineDataset::new(tuples, sampling.clone())
}

/// Which arm occurrences feed the empirical entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyOver {
    #[default]
    Winners,
    All,
}

impl fmt::Display for EntropyOver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntropyOver::Winners => "winners",
            EntropyOver::All => "all",
        })
    }
}

impl FromStr for EntropyOver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "winners" => Ok(EntropyOver::Winners),
            "all" => Ok(EntropyOver::All),
            other => Err(Error::config(format!("unknown entropy_over value `{other}`"))),
        }
    }
}

/// Shannon entropy (nats) of the empirical arm distribution in `d0`.
pub fn dataset_entropy(d0: &OfflineDataset, k: usize, over: EntropyOver) -> Result<f64> {
    if d0.is_empty() {
        return Err(Error::domain("entropy of an empty dataset is undefined"));
    }
    let mut counts = vec![0usize; k];
    for t in d0.tuples() {
        let slot = |i: usize| {
            if i >= k {
                Err(Error::config(format!("arm index {i} outside [0, {k})")))
            } else {
                Ok(i)
            }
        };
        match over {
            EntropyOver::Winners => counts[slot(t.winner())?] += 1,
            EntropyOver::All => {
                counts[slot(t.idx0)?] += 1;
                counts[slot(t.idx1)?] += 1;
            }
        }
    }
    let total: usize = counts.iter().sum();
    let total = total as f64;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    fn uniform_dataset(k: usize, tuples: Vec<(usize, usize, u8)>) -> OfflineDataset {
        OfflineDataset::new(
            tuples
                .into_iter()
                .map(|(a, b, y)| PreferenceTuple::new(a, b, y).unwrap())
                .collect(),
            SamplingDistribution::uniform(k).unwrap(),
        )
        .unwrap()
    }

    fn toy_env() -> (ActionSet, Environment) {
        let actions = ActionSet::from_vectors(vec![dv(&[0.5, 0.0]), dv(&[0.0, 0.5]), dv(&[-0.2, 0.1])]).unwrap();
        let env = Environment::new(dv(&[1.0, -0.5]), &actions).unwrap();
        (actions, env)
    }

    #[test]
    fn exact_rater_copies_theta() {
        let (_, env) = toy_env();
        let mut rng = substream(0, "rater");
        let comp = RaterCompetence::new(3.0, Knowledge::Exact).unwrap();
        let r = sample_rater(&env, comp, PolicyKind::BradleyTerry, &mut rng).unwrap();
        assert_eq!(r.vartheta(), env.theta());
    }

    #[test]
    fn rater_belief_spread() {
        let (_, env) = toy_env();
        let mut rng = substream(1, "rater");
        let comp = RaterCompetence::new(1.0, Knowledge::Finite(1.0)).unwrap();
        let n = 10_000;
        let mean_sq: f64 = (0..n)
            .map(|_| {
                let r = sample_rater(&env, comp, PolicyKind::BradleyTerry, &mut rng).unwrap();
                (r.vartheta() - env.theta()).norm_squared()
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean_sq / 2.0 - 1.0).abs() < 0.1, "{mean_sq}");

        let sharp = RaterCompetence::new(1.0, Knowledge::Finite(1e6)).unwrap();
        let close = (0..1000)
            .filter(|_| {
                let r = sample_rater(&env, sharp, PolicyKind::BradleyTerry, &mut rng).unwrap();
                (r.vartheta() - env.theta()).amax() < 1e-4
            })
            .count();
        assert!(close >= 990);
    }

    #[test]
    fn invalid_lambda_rejected() {
        assert!(matches!(
            RaterCompetence::new(1.0, Knowledge::Finite(0.0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RaterCompetence::new(1.0, Knowledge::Finite(-2.0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn preference_prob_hand_values() {
        let a = dv(&[0.3, 0.2]);
        let t = dv(&[1.0, 2.0]);
        assert_eq!(preference_prob(&a, &a, &t, 5.0), 0.5);
        assert_eq!(preference_prob(&a, &dv(&[0.0, 0.0]), &t, 0.0), 0.5);
        let p = preference_prob(&dv(&[1.0]), &dv(&[0.0]), &dv(&[1.0]), 3f64.ln());
        assert!((p - 0.75).abs() < 1e-15);
    }

    #[test]
    fn preference_prob_handles_huge_beta() {
        let p = preference_prob(&dv(&[1.0]), &dv(&[0.0]), &dv(&[1.0]), 1e6);
        assert_eq!(p, 1.0);
        let q = preference_prob(&dv(&[0.0]), &dv(&[1.0]), &dv(&[1.0]), 1e6);
        assert_eq!(q, 0.0);
    }

    #[test]
    fn preference_prob_monotone_in_beta() {
        let (a0, a1, t) = (dv(&[0.4]), dv(&[0.1]), dv(&[0.7]));
        let ps: Vec<f64> = [0.0, 1.0, 10.0, 1e3].iter().map(|&b| preference_prob(&a0, &a1, &t, b)).collect();
        assert!(ps.windows(2).all(|w| w[0] <= w[1]));
        assert!((ps[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_dataset_when_n_is_zero() {
        let (actions, env) = toy_env();
        let mut rng = substream(2, "dataset");
        let comp = RaterCompetence::new(1.0, Knowledge::Exact).unwrap();
        let rater = sample_rater(&env, comp, PolicyKind::BradleyTerry, &mut rng).unwrap();
        let d0 = generate_dataset(&actions, &rater, &SamplingDistribution::uniform(3).unwrap(), 0, &mut rng).unwrap();
        assert!(d0.is_empty());
    }

    #[test]
    fn bradley_terry_frequency_matches_probability() {
        let actions = ActionSet::from_vectors(vec![dv(&[0.6]), dv(&[0.1])]).unwrap();
        let env = Environment::new(dv(&[1.0]), &actions).unwrap();
        let comp = RaterCompetence::new(2.0, Knowledge::Exact).unwrap();
        let rater = Rater::new(env.theta().clone(), comp, PolicyKind::BradleyTerry).unwrap();
        // Point mass on arm 0 vs arm 1 is impossible with i.i.d. pairs, so judge the pair directly.
        let p = preference_prob(actions.get(0), actions.get(1), rater.vartheta(), 2.0);
        let mut rng = substream(3, "dataset");
        let n = 10_000;
        let zeros = (0..n)
            .filter(|_| rater.judge(actions.get(0), actions.get(1), &mut rng) == 0)
            .count() as f64;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((zeros - n as f64 * p).abs() < 3.0 * sd);
    }

    #[test]
    fn greedy_rater_always_picks_better_arm() {
        let (actions, env) = toy_env();
        let comp = RaterCompetence::new(0.5, Knowledge::Exact).unwrap();
        let rater = Rater::new(env.theta().clone(), comp, PolicyKind::DeterministicGreedy).unwrap();
        let mut rng = substream(4, "dataset");
        for _ in 0..100 {
            assert_eq!(rater.judge(actions.get(0), actions.get(2), &mut rng), 0);
            assert_eq!(rater.judge(actions.get(2), actions.get(0), &mut rng), 1);
            assert_eq!(rater.judge(actions.get(1), actions.get(1), &mut rng), 0);
        }
    }

    #[test]
    fn entropy_hand_values() {
        let same = uniform_dataset(3, vec![(0, 1, 0), (2, 0, 1), (0, 0, 0)]);
        assert_eq!(dataset_entropy(&same, 3, EntropyOver::Winners).unwrap(), 0.0);

        let uni = uniform_dataset(10, (0..10).map(|i| (i, (i + 1) % 10, 0)).collect());
        assert!((dataset_entropy(&uni, 10, EntropyOver::Winners).unwrap() - 10f64.ln()).abs() < 1e-12);

        let skew = uniform_dataset(2, vec![(0, 1, 0), (0, 1, 0), (1, 0, 1), (1, 0, 0)]);
        let h = dataset_entropy(&skew, 2, EntropyOver::Winners).unwrap();
        let expected = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert!((h - expected).abs() < 1e-12);
        assert!((h - 0.5623).abs() < 1e-4);

        let empty = uniform_dataset(2, vec![]);
        assert!(matches!(dataset_entropy(&empty, 2, EntropyOver::Winners), Err(Error::Domain(_))));
    }

    #[test]
    fn dataset_text_round_trip() {
        let d0 = uniform_dataset(4, vec![(0, 3, 1), (2, 2, 0), (1, 0, 0)]);
        let text = d0.to_text(5);
        assert_eq!(text, "# prefbandit-dataset v1 K=4 d=5\n0,0,3,1\n1,2,2,0\n2,1,0,0\n");
        let back = read_dataset(text.as_bytes()).unwrap();
        assert_eq!((back.k, back.d), (4, 5));
        assert_eq!(back.clone().into_dataset(None).unwrap(), d0);
        assert_eq!(back.into_dataset(None).unwrap().to_text(5), text);
    }

    #[test]
    fn dataset_parse_errors() {
        assert!(read_dataset("nope\n".as_bytes()).is_err());
        assert!(read_dataset("# prefbandit-dataset v1 K=2 d=1\n0,0,5,1\n".as_bytes()).is_err());
        assert!(read_dataset("# prefbandit-dataset v1 K=2 d=1\n0,0,1,2\n".as_bytes()).is_err());
        assert!(read_dataset("# prefbandit-dataset v1 K=2 d=1\n1,0,1,0\n".as_bytes()).is_err());
    }
}
