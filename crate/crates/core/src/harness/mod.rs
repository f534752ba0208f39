//! Seeded experiment runner: trials, regret reports, scaling fits and
//! machine-readable output.

mod instance;
mod report;
mod runner;
mod seeds;

pub use instance::{
    build_family, empirical_diagonal_optimum, random_piecewise_marginal, random_piecewise_product, Instance,
    InstanceSpec,
};
pub use report::{emit, fit_power_law, fit_scaling, write_csv, Format, HorizonSummary, RegretReport, ScalingFit, CSV_HEADER};
pub use runner::{
    run_experiment, run_trial, run_trials, scaling_experiment, ExperimentConfig, PhaseStats, RoundLog, TrialResult,
    GBB_TOL,
};
pub use seeds::{mix64, trial_rngs, trial_seed};
