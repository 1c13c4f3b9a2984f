//! Synthetic experiments: problem generation, metrics, the Monte Carlo
//! runner and result files.

mod emit;
mod gen;
mod metrics;
mod runner;

pub use emit::{
    emit_results, mse_db, plot_err_vs_k, plot_mse_vs_snr, read_csv, read_trials, write_csv, write_trials,
    ERR_PLOT_FILE, MSE_PLOT_FILE, SUMMARY_FILE, TRIALS_FILE,
};
pub use gen::{add_noise, gen_sensing_matrix, gen_sparse_signal, Snr};
pub use metrics::{metrics, TrialMetrics};
pub use runner::{
    aggregate, configured_threads, run_experiment, run_trial, trial_instance, trial_stream, AggregateRow,
    ExperimentConfig, ExperimentResult, SolverSpec, TrialInstance, TrialRecord, THREADS_ENV,
};
