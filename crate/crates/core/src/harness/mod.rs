//! Configuration, experiment orchestration, sweeps, persistence and reports.

mod config;
mod experiment;
mod persist;
mod report;
mod sweep;

pub use config::{
    load_config, parse_config, ExperimentConfig, ModelOverrides, OracleConfig, OutputConfig, ScenarioSource, StartMode,
};
pub use experiment::{run_experiment, start_plans, RunResult, StartResult};
pub use persist::{read_results, results_csv, results_json, write_results, Artifacts, RESULT_COLUMNS};
pub use report::{convergence_csv, final_snr_csv, report, write_plot_data, ABSENT, REPORT_COLUMNS};
pub use sweep::{sweep, SweepPoint, SweepResult, SweepSpec};
