//! Evaluation protocol: MCAR corruption, imputation error, downstream
//! clustering quality and the experiment grid.

mod experiment;
mod kprototypes;
mod mcar;
mod scores;
pub mod synthetic;

pub use experiment::{
    cell_seed, run_experiment, run_experiment_with, ExperimentConfig, ExperimentReport, GridCell, MeanRow, Method,
};
pub use kprototypes::{default_gamma, kprototypes, KPrototypes};
pub use mcar::{inject_missing, MissingMask};
pub use scores::{ari, mrmse};
