use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::config::ExperimentConfig;
use super::experiment::{draw_seed, run_experiment, write_experiment};
use super::report::emit_theory_report;
use super::sweep::{run_action_space_study, run_sweep, write_sweep_csv, write_table1_csv, SweepParam, SweepSpec};
use crate::agents::AgentKind;
use crate::error::Error;
use crate::estimation::{estimate_beta_entropy, estimate_beta_mle, BetaDiagnostics, BetaMethod};
use crate::offline_data::read_dataset;

#[derive(Debug, Parser)]
#[command(name = "prefbandit", version, about = "Posterior sampling with offline preference data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every configured agent and write per-seed and summary regret CSVs.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Final regret per agent along one parameter.
    Sweep {
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dimension × correlation grid of the action space.
    Table1 {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample-complexity and regret-bound report (JSON).
    Theory {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the rater's deliberateness from a dataset file.
    EstimateBeta {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        config: PathBuf,
    },
    /// Run warmPref-PS next to warmTSOF at the given feedback cost.
    Tsof {
        #[arg(long)]
        cost: f64,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the offline dataset of the first seed.
    GenDataset {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    ExperimentConfig::load(path).map_err(|e| match e {
        Error::Parse { line, message } => Failure::Usage(format!("{}:{line}: {message}", path.display())),
        other => Failure::Usage(other.to_string()),
    })
}

fn create_file(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?))
}

fn print_finals(out: &mut dyn Write, curves: &std::collections::BTreeMap<AgentKind, super::RegretCurve>) -> std::io::Result<()> {
    for c in curves.values() {
        writeln!(out, "{}: final regret {:.4} ± {:.4}", c.agent, c.final_mean(), c.final_std())?;
    }
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Simulate { config, out: dir } => {
            let cfg = load(&config)?;
            let res = run_experiment(&cfg)?;
            write_experiment(&res, &dir)?;
            print_finals(out, &res.curves)?;
        }
        Command::Sweep {
            param,
            values,
            config,
            out: dir,
        } => {
            let cfg = load(&config)?;
            let parameter: SweepParam = param.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let values = values
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("invalid sweep value `{v}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let spec = SweepSpec {
                parameter,
                values,
                base: cfg,
            };
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let table = run_sweep(&spec)?;
            std::fs::create_dir_all(&dir)?;
            let mut w = create_file(&dir.join(format!("sweep_{parameter}.csv")))?;
            write_sweep_csv(&table, &mut w)?;
            w.flush()?;
            for r in &table.rows {
                writeln!(out, "{parameter}={} {}: {:.4} ± {:.4}", r.value, r.agent, r.mean, r.std)?;
            }
        }
        Command::Table1 { config, out: dir } => {
            let cfg = load(&config)?;
            let rows = run_action_space_study(&cfg)?;
            std::fs::create_dir_all(&dir)?;
            let mut w = create_file(&dir.join("table1.csv"))?;
            write_table1_csv(&rows, &mut w)?;
            w.flush()?;
            for r in &rows {
                writeln!(out, "d={} rho={} {}: {:.4} ± {:.4}", r.d, r.rho, r.agent, r.mean, r.std)?;
            }
        }
        Command::Theory { config, out: path } => {
            let cfg = load(&config)?;
            emit_theory_report(&cfg, &path)?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::EstimateBeta {
            dataset,
            method,
            c,
            config,
        } => {
            let cfg = load(&config)?;
            let method: BetaMethod = method.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            if c.is_some() && method == BetaMethod::Mle {
                return Err(Failure::Usage("--c applies only to --method entropy".into()));
            }
            let file = File::open(&dataset).map_err(|e| Failure::Usage(format!("cannot read dataset `{}`: {e}", dataset.display())))?;
            let data = read_dataset(BufReader::new(file)).map_err(|e| Failure::Usage(format!("{}: {e}", dataset.display())))?;
            if data.k != cfg.k || data.d != cfg.d {
                return Err(Failure::Usage(format!(
                    "dataset has K={} d={} but config has K={} d={}",
                    data.k, data.d, cfg.k, cfg.d
                )));
            }
            let d0 = data.into_dataset(Some(cfg.sampling_distribution()?))?;
            let est = match method {
                BetaMethod::Mle => {
                    let draw = draw_seed(&cfg, 0)?;
                    estimate_beta_mle(
                        &d0,
                        &draw.actions,
                        &draw.prior,
                        cfg.resolved_agent_lambda(),
                        cfg.beta_clamp()?,
                        &cfg.solve_settings(),
                    )?
                }
                BetaMethod::Entropy => estimate_beta_entropy(
                    &d0,
                    cfg.k,
                    c.unwrap_or_else(|| cfg.entropy_constant()),
                    cfg.entropy_over,
                    cfg.beta_clamp()?,
                )?,
            };
            writeln!(out, "beta_hat = {}", est.value)?;
            match est.diagnostics {
                BetaDiagnostics::Mle { log_likelihood, rounds } => {
                    writeln!(out, "log_likelihood = {log_likelihood}\nrounds = {rounds}")?
                }
                BetaDiagnostics::Entropy { entropy, c } => writeln!(out, "entropy = {entropy}\nc = {c}")?,
            }
        }
        Command::Tsof { cost, config, out: dir } => {
            let mut cfg = load(&config)?;
            cfg.tsof.cost = cost;
            for kind in [AgentKind::WarmPrefPs, AgentKind::WarmTsof] {
                if !cfg.agents.contains(&kind) {
                    cfg.agents.push(kind);
                }
            }
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let res = run_experiment(&cfg)?;
            write_experiment(&res, &dir)?;
            print_finals(out, &res.curves)?;
        }
        Command::GenDataset { config, out: path } => {
            let cfg = load(&config)?;
            let draw = draw_seed(&cfg, 0)?;
            let mut w = create_file(&path)?;
            draw.d0.write_to(cfg.d, &mut w)?;
            w.flush()?;
            writeln!(out, "wrote {} tuples to {}", draw.d0.len(), path.display())?;
        }
    }
    Ok(())
}

/// Runs the command line `argv` (program name first), writing normal output
/// to `out` and diagnostics to `err`. Returns 0 on success, 1 on a usage
/// error and 2 on a runtime error.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// [`run_with`] on the process's stdout and stderr.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
