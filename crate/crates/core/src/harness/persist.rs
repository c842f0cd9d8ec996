//! CSV and JSON artifacts. Column order of [`RESULT_COLUMNS`] is frozen.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::HarnessError;
use crate::harness::experiment::{RunResult, StartResult};

pub const RESULT_COLUMNS: [&str; 19] = [
    "case_id",
    "objective",
    "f_step_ghz",
    "minibatch",
    "start_index",
    "initial_db",
    "final_db",
    "final_true_db",
    "equidistant_db",
    "iterations",
    "monitor_calls",
    "t_opt_s",
    "stop",
    "oracle_best_db",
    "oracle_worst_db",
    "improvement_vs_equidistant_db",
    "improvement_vs_worst_db",
    "best_distances_ghz",
    "best_snr_db",
];

#[derive(Serialize)]
struct Row<'a> {
    case_id: &'a str,
    objective: &'static str,
    f_step_ghz: f64,
    minibatch: usize,
    start_index: usize,
    initial_db: f64,
    final_db: f64,
    final_true_db: f64,
    equidistant_db: f64,
    iterations: u32,
    monitor_calls: u64,
    t_opt_s: f64,
    stop: &'static str,
    oracle_best_db: Option<f64>,
    oracle_worst_db: Option<f64>,
    improvement_vs_equidistant_db: f64,
    improvement_vs_worst_db: Option<f64>,
    best_distances_ghz: String,
    best_snr_db: String,
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn stop_label(r: &StartResult) -> &'static str {
    use crate::control_loop::StopReason::*;
    match r.stop {
        Converged => "converged",
        MaxIterations => "max_iterations",
        MonitorFailure(_) => "monitor_failure",
    }
}

fn row(r: &StartResult) -> Row<'_> {
    Row {
        case_id: &r.case_id,
        objective: r.objective.short_name(),
        f_step_ghz: r.f_step,
        minibatch: r.minibatch_size,
        start_index: r.start_index,
        initial_db: r.initial_objective,
        final_db: r.final_objective,
        final_true_db: r.final_true_objective,
        equidistant_db: r.equidistant_objective,
        iterations: r.iterations,
        monitor_calls: r.monitor_calls,
        t_opt_s: r.optimization_time,
        stop: stop_label(r),
        oracle_best_db: r.oracle_best,
        oracle_worst_db: r.oracle_worst,
        improvement_vs_equidistant_db: r.improvement_vs_equidistant,
        improvement_vs_worst_db: r.improvement_vs_worst,
        best_distances_ghz: join(&r.best_distances),
        best_snr_db: join(&r.best_report.snr),
    }
}

/// Result table as CSV text. Absent oracle values are empty fields.
pub fn results_csv(runs: &[StartResult]) -> Result<String, HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(RESULT_COLUMNS)?;
    for r in runs {
        w.serialize(row(r))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn results_json(result: &RunResult) -> Result<String, HarnessError> {
    let mut s = serde_json::to_string_pretty(result)?;
    s.push('\n');
    Ok(s)
}

/// Paths written by [`write_results`].
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub json: PathBuf,
}

/// Writes `<name>.csv` and `<name>.json` under `dir`.
pub fn write_results(result: &RunResult, dir: &Path, name: &str) -> Result<Artifacts, HarnessError> {
    fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{name}.csv"));
    let json = dir.join(format!("{name}.json"));
    write_text(&csv, &results_csv(&result.runs)?)?;
    write_text(&json, &results_json(result)?)?;
    Ok(Artifacts { csv, json })
}

pub fn read_results(path: &Path) -> Result<RunResult, HarnessError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
