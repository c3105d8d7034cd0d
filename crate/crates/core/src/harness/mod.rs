//! Experiment orchestration: configuration, Monte-Carlo runs, sweeps, theory
//! reports and the command line.
//!
//! Seed `i` of a run uses `base_seed + i`; within a seed every role (`env`,
//! `rater`, `dataset`, `agent:<name>`) has its own stream (see [`crate::rng`]).

pub mod cli;
mod config;
mod experiment;
mod report;
mod sweep;

pub use config::{AgentBeta, AgentLambda, ExperimentConfig, Theta0Source};
pub use experiment::{
    build_agent, draw_seed, mean_std, read_regret_csv, read_summary_csv, resolve_agent_beta, run_agent, run_experiment,
    write_experiment, write_regret_csv, write_summary_csv, ExperimentResult, RegretCurve, SeedDraw, SeedRun,
};
pub use report::{emit_theory_report, informativeness_setup, report_inputs};
pub use sweep::{
    apply_param, nonincreasing_with_tolerance, pooled_std, read_sweep_csv, read_table1_csv, run_action_space_study, run_sweep,
    write_sweep_csv, write_table1_csv, SweepParam, SweepRow, SweepSpec, SweepTable, Table1Row, TABLE1_GRID,
};
