use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use super::config::{AgentBeta, ExperimentConfig};
use crate::agents::{Agent, AgentKind, VanillaPs, WarmPrefPs, WarmTsof};
use crate::environment::{build_action_set, sample_environment, ActionSet, Environment, GaussianPrior};
use crate::error::{Error, Result};
use crate::estimation::{estimate_beta_entropy, estimate_beta_mle, BetaMethod};
use crate::offline_data::{generate_dataset, sample_rater, Knowledge, OfflineDataset, Rater, RaterCompetence};
use crate::rng::{run_seed, substream};

/// Everything drawn once per seed and shared by every agent.
#[derive(Debug, Clone)]
pub struct SeedDraw {
    pub seed: u64,
    pub actions: ActionSet,
    pub prior: GaussianPrior,
    pub env: Environment,
    pub rater: Rater,
    pub d0: OfflineDataset,
}

/// Draws actions and `θ` from the `env` stream, `ϑ` from `rater` and `D₀`
/// from `dataset`.
pub fn draw_seed(cfg: &ExperimentConfig, index: usize) -> Result<SeedDraw> {
    let seed = run_seed(cfg.base_seed, index);
    let prior = cfg.prior()?;
    let mut env_rng = substream(seed, "env");
    let actions = build_action_set(cfg.k, cfg.d, cfg.rho, &mut env_rng)?;
    let env = sample_environment(&prior, &actions, &mut env_rng)?;
    let competence = RaterCompetence::new(cfg.true_beta, Knowledge::from_lambda(cfg.true_lambda))?;
    let rater = sample_rater(&env, competence, cfg.expert_policy, &mut substream(seed, "rater"))?;
    let sampling = cfg.sampling_distribution()?;
    let d0 = generate_dataset(&actions, &rater, &sampling, cfg.n, &mut substream(seed, "dataset"))?;
    Ok(SeedDraw {
        seed,
        actions,
        prior,
        env,
        rater,
        d0,
    })
}

/// `β` the warm-started agents use on this draw.
pub fn resolve_agent_beta(cfg: &ExperimentConfig, draw: &SeedDraw) -> Result<f64> {
    match cfg.agent_beta {
        AgentBeta::Matched => Ok(cfg.true_beta),
        AgentBeta::Value(b) => Ok(b),
        AgentBeta::Estimated(BetaMethod::Mle) => Ok(estimate_beta_mle(
            &draw.d0,
            &draw.actions,
            &draw.prior,
            cfg.resolved_agent_lambda(),
            cfg.beta_clamp()?,
            &cfg.solve_settings(),
        )?
        .value),
        AgentBeta::Estimated(BetaMethod::Entropy) => Ok(estimate_beta_entropy(
            &draw.d0,
            cfg.k,
            cfg.entropy_constant(),
            cfg.entropy_over,
            cfg.beta_clamp()?,
        )?
        .value),
    }
}

pub fn build_agent(kind: AgentKind, cfg: &ExperimentConfig, draw: &SeedDraw, beta: f64) -> Result<Box<dyn Agent>> {
    let lambda = cfg.resolved_agent_lambda();
    let settings = cfg.solve_settings();
    let warm = || {
        WarmPrefPs::new(
            draw.actions.clone(),
            draw.prior.clone(),
            draw.d0.clone(),
            beta,
            lambda,
            cfg.sigma,
            settings,
        )
    };
    Ok(match kind {
        AgentKind::VanillaPs => Box::new(VanillaPs::new(draw.actions.clone(), &draw.prior, cfg.sigma)?),
        AgentKind::NaivePs => Box::new(WarmPrefPs::naive(
            draw.actions.clone(),
            draw.prior.clone(),
            draw.d0.clone(),
            lambda,
            cfg.sigma,
            settings,
        )?),
        AgentKind::WarmPrefPs => Box::new(warm()?),
        AgentKind::WarmTsof => Box::new(WarmTsof::new(warm()?, cfg.tsof, draw.rater.clone())?),
    })
}

/// One agent's trajectory on one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRun {
    /// Cumulative pseudo-regret plus feedback cost, rounds `1..=T`.
    pub cumulative: Vec<f64>,
    pub total_reward: f64,
    pub total_cost: f64,
    pub queries: usize,
}

/// Plays `T` rounds on the agent's own stream.
pub fn run_agent(kind: AgentKind, cfg: &ExperimentConfig, draw: &SeedDraw, beta: f64) -> Result<SeedRun> {
    let step_err = |t: usize, e: Error| Error::Step {
        agent: kind.name().into(),
        seed: draw.seed,
        t,
        reason: e.to_string(),
    };
    let mut agent = build_agent(kind, cfg, draw, beta).map_err(|e| step_err(0, e))?;
    let mut rng = substream(draw.seed, &kind.stream_role());
    let mut run = SeedRun {
        cumulative: Vec::with_capacity(cfg.horizon),
        total_reward: 0.0,
        total_cost: 0.0,
        queries: 0,
    };
    let mut acc = 0.0;
    for t in 1..=cfg.horizon {
        let out = agent.step(&draw.env, &mut rng).map_err(|e| step_err(t, e))?;
        acc += draw.env.arm_regret(out.arm) + out.cost;
        run.cumulative.push(acc);
        run.total_reward += out.reward;
        run.total_cost += out.cost;
        run.queries += usize::from(out.queried);
    }
    Ok(run)
}

/// Per-seed cumulative regret of one agent and its across-seed moments.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub agent: AgentKind,
    pub seeds: Vec<u64>,
    pub cumulative: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    /// Sample standard deviation (`n − 1`); zero for a single seed.
    pub std: Vec<f64>,
}

/// Mean and sample std, summed in the given order.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl RegretCurve {
    pub fn from_runs(agent: AgentKind, seeds: Vec<u64>, cumulative: Vec<Vec<f64>>) -> Result<Self> {
        let horizon = cumulative.first().map_or(0, Vec::len);
        if cumulative.is_empty() || seeds.len() != cumulative.len() || cumulative.iter().any(|c| c.len() != horizon) {
            return Err(Error::config("regret curves need one equal-length trajectory per seed"));
        }
        let (mean, std) = (0..horizon)
            .map(|t| mean_std(&cumulative.iter().map(|c| c[t]).collect::<Vec<_>>()))
            .unzip();
        Ok(Self {
            agent,
            seeds,
            cumulative,
            mean,
            std,
        })
    }

    pub fn horizon(&self) -> usize {
        self.mean.len()
    }

    pub fn finals(&self) -> Vec<f64> {
        self.cumulative.iter().map(|c| c[c.len() - 1]).collect()
    }

    pub fn final_mean(&self) -> f64 {
        self.mean[self.horizon() - 1]
    }

    pub fn final_std(&self) -> f64 {
        self.std[self.horizon() - 1]
    }
}

/// Output of [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub curves: BTreeMap<AgentKind, RegretCurve>,
    /// `β` given to the warm-started agents, per seed.
    pub agent_beta: Vec<f64>,
    /// Feedback bookkeeping per seed, when warmTSOF ran.
    pub tsof_runs: Option<Vec<SeedRun>>,
}

impl ExperimentResult {
    pub fn curve(&self, agent: AgentKind) -> Option<&RegretCurve> {
        self.curves.get(&agent)
    }
}

/// Runs every configured agent on every seed. Seeds run in parallel; results
/// are gathered in seed order, so the output does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let per_seed: Vec<(u64, f64, Vec<SeedRun>)> = (0..cfg.seeds)
        .into_par_iter()
        .map(|i| {
            let draw = draw_seed(cfg, i)?;
            let beta = resolve_agent_beta(cfg, &draw).map_err(|e| Error::Step {
                agent: "beta_estimator".into(),
                seed: draw.seed,
                t: 0,
                reason: e.to_string(),
            })?;
            let runs = cfg
                .agents
                .iter()
                .map(|&kind| run_agent(kind, cfg, &draw, beta))
                .collect::<Result<Vec<_>>>()?;
            Ok((draw.seed, beta, runs))
        })
        .collect::<Result<_>>()?;

    let seeds: Vec<u64> = per_seed.iter().map(|p| p.0).collect();
    let mut curves = BTreeMap::new();
    let mut tsof_runs = None;
    for (j, &kind) in cfg.agents.iter().enumerate() {
        let cumulative = per_seed.iter().map(|p| p.2[j].cumulative.clone()).collect();
        curves.insert(kind, RegretCurve::from_runs(kind, seeds.clone(), cumulative)?);
        if kind == AgentKind::WarmTsof {
            tsof_runs = Some(per_seed.iter().map(|p| p.2[j].clone()).collect());
        }
    }
    Ok(ExperimentResult {
        curves,
        agent_beta: per_seed.iter().map(|p| p.1).collect(),
        tsof_runs,
    })
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid number `{s}`"),
    })
}

pub(crate) fn check_header(first: Option<std::io::Result<String>>, want: &str) -> Result<()> {
    let got = first.transpose()?.unwrap_or_default();
    if got != want {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{want}`, got `{got}`"),
        });
    }
    Ok(())
}

pub(crate) fn split_fields(line: &str, n: usize, lineno: usize) -> Result<Vec<&str>> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != n {
        return Err(Error::Parse {
            line: lineno,
            message: format!("expected {n} fields, got `{line}`"),
        });
    }
    Ok(f)
}

/// `t,seed,cumulative`, seed-major.
pub fn write_regret_csv<W: Write>(curve: &RegretCurve, mut out: W) -> Result<()> {
    writeln!(out, "t,seed,cumulative")?;
    for (seed, c) in curve.seeds.iter().zip(&curve.cumulative) {
        for (t, v) in c.iter().enumerate() {
            writeln!(out, "{},{seed},{}", t + 1, fmt_f64(*v))?;
        }
    }
    Ok(())
}

/// Reads a per-seed regret file back into `(seeds, trajectories)`.
pub fn read_regret_csv<R: BufRead>(input: R) -> Result<(Vec<u64>, Vec<Vec<f64>>)> {
    let mut lines = input.lines();
    check_header(lines.next(), "t,seed,cumulative")?;
    let mut seeds: Vec<u64> = Vec::new();
    let mut curves: Vec<Vec<f64>> = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        let f = split_fields(&line, 3, lineno)?;
        let bad = |what: &str| Error::Parse {
            line: lineno,
            message: format!("invalid {what} in `{line}`"),
        };
        let t: usize = f[0].parse().map_err(|_| bad("round"))?;
        let seed: u64 = f[1].parse().map_err(|_| bad("seed"))?;
        let v = parse_f64(f[2], lineno)?;
        if t == 1 {
            seeds.push(seed);
            curves.push(Vec::new());
        }
        match (seeds.last(), curves.last_mut()) {
            (Some(&s), Some(c)) if s == seed && c.len() + 1 == t => c.push(v),
            _ => return Err(bad("row order")),
        }
    }
    Ok((seeds, curves))
}

/// `agent,t,mean,std`, agents in canonical order.
pub fn write_summary_csv<W: Write>(curves: &BTreeMap<AgentKind, RegretCurve>, mut out: W) -> Result<()> {
    writeln!(out, "agent,t,mean,std")?;
    for c in curves.values() {
        for t in 0..c.horizon() {
            writeln!(out, "{},{},{},{}", c.agent, t + 1, fmt_f64(c.mean[t]), fmt_f64(c.std[t]))?;
        }
    }
    Ok(())
}

/// Rows of `summary.csv` as `(agent, t, mean, std)`.
pub fn read_summary_csv<R: BufRead>(input: R) -> Result<Vec<(AgentKind, usize, f64, f64)>> {
    let mut lines = input.lines();
    check_header(lines.next(), "agent,t,mean,std")?;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        let f = split_fields(&line, 4, lineno)?;
        let agent = f[0].parse().map_err(|e: Error| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let t = f[1].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("invalid round `{}`", f[1]),
        })?;
        rows.push((agent, t, parse_f64(f[2], lineno)?, parse_f64(f[3], lineno)?));
    }
    Ok(rows)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Writes `regret_<agent>.csv` for each agent and `summary.csv` into `dir`;
/// with warmTSOF, also `feedback_warmtsof.csv` (`seed,queries,total_cost,total_reward`).
pub fn write_experiment(result: &ExperimentResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for c in result.curves.values() {
        let mut w = create(&dir.join(format!("regret_{}.csv", c.agent)))?;
        write_regret_csv(c, &mut w)?;
        w.flush()?;
    }
    let mut w = create(&dir.join("summary.csv"))?;
    write_summary_csv(&result.curves, &mut w)?;
    w.flush()?;
    if let (Some(runs), Some(curve)) = (&result.tsof_runs, result.curves.values().next()) {
        let mut w = create(&dir.join("feedback_warmtsof.csv"))?;
        writeln!(w, "seed,queries,total_cost,total_reward")?;
        for (seed, r) in curve.seeds.iter().zip(runs) {
            writeln!(w, "{seed},{},{},{}", r.queries, fmt_f64(r.total_cost), fmt_f64(r.total_reward))?;
        }
        w.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            k: 4,
            d: 2,
            horizon: 15,
            n: 5,
            seeds: 3,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn single_round_matches_first_arm_regret() {
        let cfg = ExperimentConfig {
            horizon: 1,
            seeds: 1,
            ..small()
        };
        let res = run_experiment(&cfg).unwrap();
        let draw = draw_seed(&cfg, 0).unwrap();
        let run = run_agent(AgentKind::WarmPrefPs, &cfg, &draw, cfg.true_beta).unwrap();
        let curve = res.curve(AgentKind::WarmPrefPs).unwrap();
        assert_eq!(curve.horizon(), 1);
        assert_eq!(curve.mean[0], run.cumulative[0]);
        assert_eq!(curve.std[0], 0.0);
    }

    #[test]
    fn curves_are_nondecreasing_and_deterministic() {
        let cfg = small();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        for c in a.curves.values() {
            for traj in &c.cumulative {
                assert!(traj.windows(2).all(|w| w[1] >= w[0]));
            }
        }
    }

    #[test]
    fn vanilla_ignores_other_agents() {
        let cfg = small();
        let alone = ExperimentConfig {
            agents: vec![AgentKind::VanillaPs],
            ..small()
        };
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&alone).unwrap();
        assert_eq!(a.curve(AgentKind::VanillaPs), b.curve(AgentKind::VanillaPs));
    }

    #[test]
    fn csv_round_trip_and_summary_recompute() {
        let res = run_experiment(&small()).unwrap();
        let c = res.curve(AgentKind::NaivePs).unwrap();
        let mut buf = Vec::new();
        write_regret_csv(c, &mut buf).unwrap();
        let (seeds, curves) = read_regret_csv(buf.as_slice()).unwrap();
        assert_eq!(seeds, c.seeds);
        assert_eq!(&curves, &c.cumulative);
        let again = RegretCurve::from_runs(c.agent, seeds, curves).unwrap();
        assert_eq!(&again, c);

        let mut buf = Vec::new();
        write_summary_csv(&res.curves, &mut buf).unwrap();
        let rows = read_summary_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 3 * 15);
        let row = rows.iter().find(|r| r.0 == AgentKind::NaivePs && r.1 == 15).unwrap();
        assert_eq!((row.2, row.3), (c.final_mean(), c.final_std()));
    }

    #[test]
    fn step_errors_name_the_agent() {
        let cfg = ExperimentConfig {
            max_iterations: 1,
            grad_tolerance: 1e-300,
            ..small()
        };
        match run_experiment(&cfg).unwrap_err() {
            Error::Step { agent, t, .. } => {
                assert_eq!(agent, "naive_ps");
                assert_eq!(t, 1);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn mean_std_basics() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
    }
}
