//! Closed-loop optimizer: finite-difference probes, minibatch signed steps,
//! best-so-far memory and budget accounting.

mod budget;
mod config;
mod optimizer;
mod trace;

pub use budget::{iteration_bound, optimization_time, ConvergenceBudget, TimingModel};
pub use config::{DeadBand, DeadBandRule, OptimizerConfig, DEFAULT_DEAD_BAND};
pub use optimizer::{
    apply_step, finite_difference_subgradient, optimize, optimize_with_observer, select_minibatch, OptimizeOutcome,
    Probe, StepOutcome,
};
pub use trace::{IterationRecord, IterationTrace, ProbeRecord, StopReason};

impl ConvergenceBudget {
    /// Budget with G and R estimated from a finished run: G is the largest
    /// observed `|g_n|`, R the carrier L2 distance from start to best.
    pub fn from_outcome(outcome: &OptimizeOutcome, minibatch: usize, target_accuracy: f64) -> Self {
        let best = &outcome.best_plan;
        let start = best
            .with_distances(outcome.trace.start_distances.clone())
            .expect("start distances come from a valid plan");
        ConvergenceBudget::new(
            best.subchannel_count(),
            minibatch,
            outcome.trace.max_abs_subgradient(),
            start.carrier_distance(best),
            target_accuracy,
        )
    }
}
