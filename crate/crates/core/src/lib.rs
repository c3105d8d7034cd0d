//! Posterior sampling for linear bandits warm-started with offline
//! preference data from a rater of known competence.
//!
//! The crate is organised as the pipeline runs: [`environment`] draws a
//! bandit instance, [`offline_data`] simulates a rater and a preference
//! dataset, [`agents`] act online, [`theory`] evaluates the sample-size and
//! regret bounds, [`estimation`] recovers an unknown rater sharpness and
//! [`harness`] wires everything into reproducible experiments.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod rng;
pub mod environment;
pub mod offline_data;
pub mod optimizer;
pub mod agents;
pub mod theory;
pub mod estimation;
pub mod harness;

pub use error::{Error, Result};
