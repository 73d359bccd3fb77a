//! Experiment sweeps, aggregation and validation suites.

mod aggregate;
mod config;
mod results;
mod run;
mod validate;

pub use aggregate::{aggregate, mean_sd, summarize, SUMMARY_HEADER};
pub use config::{
    BasisConfig, ExperimentConfig, GaussianConfig, PriorChoice, DEFAULT_N_LIST, DESK_REPLICATIONS,
    FULL_REPLICATIONS,
};
pub use results::{
    read_results, results_from_csv, results_to_csv, write_atomic, ResultRow, Status, RESULTS_FILE,
    RESULTS_HEADER, TIMINGS_FILE,
};
pub use run::{
    build_basis, cell_dir, cell_seeds, cells, chain_setup, run_cell, run_cells, run_experiment, Cell, Schedule,
};
pub use validate::{
    ks_distance, laplace_cdf, prior_recovery_draws, validate, Check, OracleProblem, ValidationMode,
    ValidationReport,
};
