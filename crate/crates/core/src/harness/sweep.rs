use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use super::config::ExperimentConfig;
use super::experiment::{check_header, fmt_f64, parse_f64, run_experiment, split_fields};
use crate::agents::AgentKind;
use crate::error::{Error, Result};

/// Ablation axis. `lambda` and `beta` move the rater; agents configured as
/// `matched` follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Lambda,
    Beta,
    N,
    Rho,
    D,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Beta => "beta",
            SweepParam::N => "n",
            SweepParam::Rho => "rho",
            SweepParam::D => "d",
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(SweepParam::Lambda),
            "beta" => Ok(SweepParam::Beta),
            "n" | "N" => Ok(SweepParam::N),
            "rho" => Ok(SweepParam::Rho),
            "d" => Ok(SweepParam::D),
            other => Err(Error::config(format!("unknown sweep parameter `{other}` (lambda, beta, n, rho, d)"))),
        }
    }
}

fn as_count(p: SweepParam, v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e15 {
        Ok(v as usize)
    } else {
        Err(Error::config(format!("sweep over {p} needs whole numbers, got {v}")))
    }
}

/// A copy of `base` with `param` set to `value`.
pub fn apply_param(base: &ExperimentConfig, param: SweepParam, value: f64) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    match param {
        SweepParam::Lambda => cfg.true_lambda = value,
        SweepParam::Beta => cfg.true_beta = value,
        SweepParam::N => cfg.n = as_count(param, value)?,
        SweepParam::Rho => cfg.rho = value,
        SweepParam::D => cfg.d = as_count(param, value)?,
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
    pub base: ExperimentConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::config("sweep needs at least one value"));
        }
        for &v in &self.values {
            apply_param(&self.base, self.parameter, v)?;
        }
        Ok(())
    }
}

/// Final cumulative regret of one agent at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub agent: AgentKind,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: SweepParam,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// `(mean, std)` of `agent` in value order.
    pub fn series(&self, agent: AgentKind) -> Vec<(f64, f64)> {
        self.rows.iter().filter(|r| r.agent == agent).map(|r| (r.mean, r.std)).collect()
    }

    pub fn get(&self, value: f64, agent: AgentKind) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.value == value && r.agent == agent)
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &value in &spec.values {
        let res = run_experiment(&apply_param(&spec.base, spec.parameter, value)?)?;
        for c in res.curves.values() {
            rows.push(SweepRow {
                value,
                agent: c.agent,
                mean: c.final_mean(),
                std: c.final_std(),
            });
        }
    }
    Ok(SweepTable {
        parameter: spec.parameter,
        rows,
    })
}

/// Long format: `parameter,value,agent,mean,std`.
pub fn write_sweep_csv<W: Write>(table: &SweepTable, mut out: W) -> Result<()> {
    writeln!(out, "parameter,value,agent,mean,std")?;
    for r in &table.rows {
        writeln!(out, "{},{},{},{},{}", table.parameter, r.value, r.agent, fmt_f64(r.mean), fmt_f64(r.std))?;
    }
    Ok(())
}

pub fn read_sweep_csv<R: BufRead>(input: R) -> Result<SweepTable> {
    let mut lines = input.lines();
    check_header(lines.next(), "parameter,value,agent,mean,std")?;
    let mut parameter = None;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        let f = split_fields(&line, 5, lineno)?;
        let reparse = |e: Error| Error::Parse {
            line: lineno,
            message: e.to_string(),
        };
        let p: SweepParam = f[0].parse().map_err(reparse)?;
        if parameter.is_some_and(|q| q != p) {
            return Err(Error::Parse {
                line: lineno,
                message: "mixed sweep parameters".into(),
            });
        }
        parameter = Some(p);
        rows.push(SweepRow {
            value: parse_f64(f[1], lineno)?,
            agent: f[2].parse().map_err(reparse)?,
            mean: parse_f64(f[3], lineno)?,
            std: parse_f64(f[4], lineno)?,
        });
    }
    let parameter = parameter.ok_or(Error::Parse {
        line: 2,
        message: "sweep file has no rows".into(),
    })?;
    Ok(SweepTable { parameter, rows })
}

/// `√((s₁² + s₂²)/2)`.
pub fn pooled_std(s1: f64, s2: f64) -> f64 {
    (0.5 * (s1 * s1 + s2 * s2)).sqrt()
}

/// True when the means never increase between neighbours, except for at most
/// one rise no larger than the pooled std of the pair.
pub fn nonincreasing_with_tolerance(series: &[(f64, f64)]) -> bool {
    let mut inversions = 0;
    for w in series.windows(2) {
        let ((m0, s0), (m1, s1)) = (w[0], w[1]);
        if m1 > m0 {
            if m1 - m0 > pooled_std(s0, s1) {
                return false;
            }
            inversions += 1;
        }
    }
    inversions <= 1
}

/// The `d × ρ` grid of the action-space study.
pub const TABLE1_GRID: [(usize, f64); 4] = [(2, 0.1), (2, 0.8), (5, 0.1), (5, 0.8)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub d: usize,
    pub rho: f64,
    pub agent: AgentKind,
    pub mean: f64,
    pub std: f64,
}

/// Runs vanilla, naive and warmPref PS on each cell of [`TABLE1_GRID`].
pub fn run_action_space_study(base: &ExperimentConfig) -> Result<Vec<Table1Row>> {
    let mut rows = Vec::new();
    for (d, rho) in TABLE1_GRID {
        let cfg = ExperimentConfig {
            d,
            rho,
            agents: vec![AgentKind::VanillaPs, AgentKind::NaivePs, AgentKind::WarmPrefPs],
            ..base.clone()
        };
        let res = run_experiment(&cfg)?;
        for c in res.curves.values() {
            rows.push(Table1Row {
                d,
                rho,
                agent: c.agent,
                mean: c.final_mean(),
                std: c.final_std(),
            });
        }
    }
    Ok(rows)
}

/// `d,rho,agent,mean,std`.
pub fn write_table1_csv<W: Write>(rows: &[Table1Row], mut out: W) -> Result<()> {
    writeln!(out, "d,rho,agent,mean,std")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.d, r.rho, r.agent, fmt_f64(r.mean), fmt_f64(r.std))?;
    }
    Ok(())
}

pub fn read_table1_csv<R: BufRead>(input: R) -> Result<Vec<Table1Row>> {
    let mut lines = input.lines();
    check_header(lines.next(), "d,rho,agent,mean,std")?;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        let f = split_fields(&line, 5, lineno)?;
        let perr = |message: String| Error::Parse { line: lineno, message };
        rows.push(Table1Row {
            d: f[0].parse().map_err(|_| perr(format!("invalid d `{}`", f[0])))?,
            rho: parse_f64(f[1], lineno)?,
            agent: f[2].parse().map_err(|e: Error| perr(e.to_string()))?,
            mean: parse_f64(f[3], lineno)?,
            std: parse_f64(f[4], lineno)?,
        });
    }
    Ok(rows)
}
