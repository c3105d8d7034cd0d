use std::path::Path;

use super::config::{ExperimentConfig, Theta0Source};
use super::experiment::draw_seed;
use crate::error::Result;
use crate::offline_data::{Knowledge, RaterCompetence};
use crate::theory::{bound_report, BoundReport, InformativenessSetup, ReportInputs};

/// Theory inputs for `cfg`, with the arm set of the first seed.
pub fn report_inputs(cfg: &ExperimentConfig) -> Result<ReportInputs> {
    cfg.validate()?;
    let draw = draw_seed(cfg, 0)?;
    let theta0 = match cfg.theory_theta0 {
        Theta0Source::Environment => draw.env.theta().clone(),
        Theta0Source::PriorMean => draw.prior.mean().clone(),
    };
    Ok(ReportInputs {
        actions: draw.actions,
        prior: draw.prior,
        theta0,
        theta0_source: cfg.theory_theta0.to_string(),
        n: cfg.n,
        horizon: cfg.horizon,
        beta: cfg.true_beta,
        lambda: cfg.true_lambda,
        eps: cfg.eps,
        mu_min: cfg.resolved_mu_min()?,
        c1: cfg.c1,
    })
}

/// Computes every bound for `cfg` and writes the JSON document to `path`.
pub fn emit_theory_report(cfg: &ExperimentConfig, path: &Path) -> Result<BoundReport> {
    let report = bound_report(&report_inputs(cfg)?);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, report.to_json())?;
    Ok(report)
}

/// Monte-Carlo informativeness setup for `cfg` on the first seed's arms.
pub fn informativeness_setup(cfg: &ExperimentConfig) -> Result<InformativenessSetup> {
    let inputs = report_inputs(cfg)?;
    Ok(InformativenessSetup {
        actions: inputs.actions,
        prior: inputs.prior,
        competence: RaterCompetence::new(cfg.true_beta, Knowledge::from_lambda(cfg.true_lambda))?,
        policy: cfg.expert_policy,
        sampling: cfg.sampling_distribution()?,
        n: cfg.n,
        horizon: cfg.horizon,
        mu_min: inputs.mu_min,
    })
}
