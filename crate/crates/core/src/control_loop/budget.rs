//! Iteration and wall-clock budgets of the probing loop.

use serde::{Deserialize, Serialize};

/// Expected iteration bound of minibatch stochastic subgradient:
/// `ceil((N R G / (M ε))²)`.
pub fn iteration_bound(n: usize, start_distance: f64, gradient_bound: f64, minibatch: usize, epsilon: f64) -> u64 {
    let ratio = n as f64 * start_distance * gradient_bound / (minibatch as f64 * epsilon);
    let squared = ratio * ratio;
    // absorb round-off so exact squares do not round up
    (squared * (1.0 - 1e-12)).ceil().max(0.0) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceBudget {
    /// G, dB/GHz
    pub gradient_bound: f64,
    /// R, GHz
    pub start_distance: f64,
    /// ε, dB
    pub target_accuracy: f64,
    pub implied_iterations: u64,
}

impl ConvergenceBudget {
    pub fn new(n: usize, minibatch: usize, gradient_bound: f64, start_distance: f64, target_accuracy: f64) -> Self {
        ConvergenceBudget {
            gradient_bound,
            start_distance,
            target_accuracy,
            implied_iterations: iteration_bound(n, start_distance, gradient_bound, minibatch, target_accuracy),
        }
    }
}

/// Monitoring and computation cost of one loop iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingModel {
    /// Seconds per simultaneous N-subchannel measurement.
    pub t_mon: f64,
    /// Seconds of computation per iteration.
    pub t_calc: f64,
}

impl Default for TimingModel {
    fn default() -> Self {
        TimingModel { t_mon: 60.0, t_calc: 1.0 }
    }
}

/// `I (M t_mon + t_calc)`, seconds.
pub fn optimization_time(iterations: u64, minibatch: usize, timing: &TimingModel) -> f64 {
    iterations as f64 * (minibatch as f64 * timing.t_mon + timing.t_calc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert_eq!(iteration_bound(4, 2.0, 1.0, 2, 0.5), 64);
        // full batch: (R G / ε)²
        let (r, g, e) = (1.5, 0.8, 0.2);
        assert_eq!(iteration_bound(6, r, g, 6, e), ((r * g / e) * (r * g / e) * (1.0 - 1e-12)).ceil() as u64);
        assert_eq!(iteration_bound(4, 2.0, 1.0, 4, 0.5), 16);
        assert_eq!(iteration_bound(4, 0.0, 1.0, 2, 0.2), 0);
    }

    #[test]
    fn doubling_minibatch_quarters_bound() {
        assert_eq!(iteration_bound(8, 2.0, 1.0, 2, 0.5), 256);
        assert_eq!(iteration_bound(8, 2.0, 1.0, 4, 0.5), 64);
    }

    #[test]
    fn time_examples() {
        let timing = TimingModel { t_mon: 60.0, t_calc: 1.0 };
        assert_eq!(optimization_time(23, 2, &timing), 2783.0);
        assert_eq!(optimization_time(0, 2, &timing), 0.0);
        let approx = 23.0 * 2.0 * 60.0;
        assert!((optimization_time(23, 2, &timing) - approx).abs() / approx < 0.01);
    }

    #[test]
    fn budget_record() {
        let b = ConvergenceBudget::new(4, 2, 1.0, 2.0, 0.5);
        assert_eq!(b.implied_iterations, 64);
    }
}
