use serde::{Deserialize, Serialize};

use crate::domain::SnrReport;

/// One monitoring probe: carrier `index` shifted by `+f_step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub index: usize,
    pub distances: Vec<f64>,
    pub report: SnrReport,
    pub objective: f64,
    /// dB/GHz
    pub subgradient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: u32,
    pub baseline_distances: Vec<f64>,
    pub baseline_report: SnrReport,
    pub baseline_objective: f64,
    /// False when the baseline was reused from the previous iteration or the memory.
    pub baseline_measured: bool,
    /// The loop jumped back to the best plan before probing.
    pub restarted: bool,
    pub minibatch: Vec<usize>,
    /// Indices whose probe was infeasible and dropped.
    pub skipped: Vec<usize>,
    pub probes: Vec<ProbeRecord>,
    /// `(index, delta)` carrier moves that were applied.
    pub moves: Vec<(usize, f64)>,
    /// Indices whose move was cancelled by a constraint.
    pub cancelled: Vec<usize>,
    pub applied_distances: Vec<f64>,
    pub best_objective: f64,
    pub best_distances: Vec<f64>,
    /// Cumulative monitor calls after this iteration.
    pub monitor_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum StopReason {
    /// Patience exhausted.
    Converged,
    MaxIterations,
    MonitorFailure(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub start_distances: Vec<f64>,
    pub records: Vec<IterationRecord>,
    pub stop: StopReason,
    pub monitor_calls: u64,
    /// Iteration that first measured the returned best plan. A best found by
    /// the baseline of iteration `i` counts `i - 1`, by a probe counts `i`.
    pub best_iteration: u32,
    /// First iteration after which the best-so-far objective was within the
    /// optimality tolerance of the final best (0 when the start already was).
    pub convergence_iteration: u32,
}

impl IterationTrace {
    /// First iteration whose best-so-far is within `tolerance` of `target`;
    /// 0 if `initial` already is, `None` if never.
    pub fn iterations_to_within(&self, initial: f64, target: f64, tolerance: f64) -> Option<u32> {
        if initial >= target - tolerance {
            return Some(0);
        }
        self.records.iter().find(|r| r.best_objective >= target - tolerance).map(|r| r.iteration)
    }

    pub fn iterations(&self) -> u32 {
        self.records.len() as u32
    }

    /// Largest `|g_n|` seen over all probes (the trace estimate of G).
    pub fn max_abs_subgradient(&self) -> f64 {
        self.records
            .iter()
            .flat_map(|r| r.probes.iter())
            .map(|p| p.subgradient.abs())
            .fold(0.0, f64::max)
    }

    pub fn best_objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.best_objective).collect()
    }

    /// Every plan the loop applied or probed.
    pub fn all_distances(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.records.iter().flat_map(|r| {
            std::iter::once(&r.baseline_distances)
                .chain(r.probes.iter().map(|p| &p.distances))
                .chain(std::iter::once(&r.applied_distances))
        })
    }

    /// `sum over iterations of (measured baseline + probes)`.
    pub fn counted_calls(&self) -> u64 {
        self.records
            .iter()
            .map(|r| r.baseline_measured as u64 + r.probes.len() as u64)
            .sum()
    }
}
