//! Plain-text summary table and plot-data CSVs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::HarnessError;
use crate::harness::experiment::StartResult;
use crate::harness::persist::write_text;

/// Shown where a value was not computed.
pub const ABSENT: &str = "n/a";

pub const REPORT_COLUMNS: [&str; 8] = [
    "initial [dB]",
    "f_step [GHz]",
    "iterations",
    "final [dB]",
    "oracle best [dB]",
    "oracle worst [dB]",
    "impr. vs equidistant [dB]",
    "impr. vs worst [dB]",
];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| ABSENT.to_string(), |x| format!("{x:.2}"))
}

/// One row per run: case, objective and start, then [`REPORT_COLUMNS`].
pub fn report(runs: &[StartResult]) -> String {
    let mut header = vec!["case", "objective", "start"];
    header.extend(REPORT_COLUMNS);
    let rows: Vec<Vec<String>> = runs
        .iter()
        .map(|r| {
            vec![
                r.case_id.clone(),
                r.objective.short_name().to_string(),
                r.start_index.to_string(),
                format!("{:.2}", r.initial_objective),
                format!("{}", r.f_step),
                r.iterations.to_string(),
                format!("{:.2}", r.final_objective),
                opt(r.oracle_best),
                opt(r.oracle_worst),
                format!("{:.2}", r.improvement_vs_equidistant),
                opt(r.improvement_vs_worst),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |cells: &[String], out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        writeln!(out, "{}", padded.join("  ").trim_end()).expect("writing to a String");
    };
    line(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>(), &mut out);
    for r in &rows {
        line(r, &mut out);
    }
    out
}

/// `run,iteration,baseline_db,best_db` per iteration of every run.
pub fn convergence_csv(runs: &[StartResult]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["run", "iteration", "baseline_db", "best_db"])?;
    for (i, r) in runs.iter().enumerate() {
        for rec in &r.trace.records {
            w.write_record([
                i.to_string(),
                rec.iteration.to_string(),
                rec.baseline_objective.to_string(),
                rec.best_objective.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `run,subchannel,snr_db` of each best plan.
pub fn final_snr_csv(runs: &[StartResult]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["run", "subchannel", "snr_db"])?;
    for (i, r) in runs.iter().enumerate() {
        for (n, s) in r.best_report.snr.iter().enumerate() {
            w.write_record([i.to_string(), n.to_string(), s.to_string()])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `<stem>_convergence.csv` and `<stem>_snr.csv` under `dir`.
pub fn write_plot_data(runs: &[StartResult], dir: &Path, stem: &str) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir)?;
    let conv = dir.join(format!("{stem}_convergence.csv"));
    let snr = dir.join(format!("{stem}_snr.csv"));
    write_text(&conv, &convergence_csv(runs)?)?;
    write_text(&snr, &final_snr_csv(runs)?)?;
    Ok(vec![conv, snr])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ExperimentConfig, ModelOverrides, OracleConfig};
    use crate::harness::experiment::run_experiment;

    fn runs(oracle: bool) -> Vec<StartResult> {
        let mut c = ExperimentConfig::for_scenario("table1-case1");
        c.objectives = vec![crate::domain::Objective::AverageSnr];
        c.model = ModelOverrides { monitor_noise_sigma: Some(0.0), ..Default::default() };
        if oracle {
            c.oracle = Some(OracleConfig { half_range: 1.0, grid_step: 1.0, ..Default::default() });
        }
        run_experiment(&c).unwrap().runs
    }

    #[test]
    fn full_row_has_every_column() {
        let text = report(&runs(true));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(!text.contains(ABSENT));
        let cells: Vec<&str> = lines[1].split_whitespace().collect();
        assert_eq!(cells.len(), 3 + REPORT_COLUMNS.len());
    }

    #[test]
    fn missing_oracle_is_marked_not_zeroed() {
        let text = report(&runs(false));
        let cells: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
        assert_eq!(cells[7], ABSENT);
        assert_eq!(cells[8], ABSENT);
        assert_eq!(cells[10], ABSENT);
    }

    #[test]
    fn plot_files() {
        let r = runs(false);
        let dir = tempfile::tempdir().unwrap();
        let files = write_plot_data(&r, dir.path(), "case1").unwrap();
        let conv = std::fs::read_to_string(&files[0]).unwrap();
        assert_eq!(conv.lines().count(), 1 + r[0].trace.records.len());
        let snr = std::fs::read_to_string(&files[1]).unwrap();
        assert_eq!(snr.lines().count(), 1 + 4);
    }
}
