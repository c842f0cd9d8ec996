use serde::{Deserialize, Serialize};

use crate::error::OptimizeError;

/// Default dead-band, dB/GHz. Keeps carriers that do not affect the objective
/// (e.g. non-binding channels under the min objective) from random-walking on
/// round-off sized differences.
pub const DEFAULT_DEAD_BAND: f64 = 0.01;

/// Threshold below which a subgradient does not move its carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeadBand {
    /// dB/GHz
    Fixed(f64),
    /// `"auto"`: `tolerance / (2 f_step)`.
    Rule(DeadBandRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeadBandRule {
    Auto,
}

/// Parameters of the probing loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    /// Probe offset and step length, GHz.
    pub f_step: f64,
    /// Subchannels probed per iteration (M).
    pub minibatch_size: usize,
    /// Optimality tolerance, dB. An applied plan this far below the best
    /// triggers a restart from the best plan.
    pub tolerance: f64,
    /// Iterations without best-so-far improvement before stopping.
    pub patience: u32,
    pub max_iterations: u32,
    /// Smallest rise of the best objective (dB) that resets patience.
    pub min_improvement: f64,
    /// Subgradients with `|g| <= dead_band` (dB/GHz) do not move their carrier.
    /// `auto` selects `tolerance / (2 f_step)`, which is only usable when a
    /// single step changes the objective by a sizable fraction of `tolerance`.
    pub dead_band: DeadBand,
    /// Also keep distances above the R_s/4 (edges) and R_s/2 (interior) floors.
    pub enforce_lower_limits: bool,
    pub rng_seed: u64,
    /// Laser tuning grid, GHz.
    pub laser_granularity: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            f_step: 0.25,
            minibatch_size: 2,
            tolerance: 0.2,
            patience: 10,
            max_iterations: 200,
            min_improvement: 0.0,
            dead_band: DeadBand::Fixed(DEFAULT_DEAD_BAND),
            enforce_lower_limits: false,
            rng_seed: 1,
            laser_granularity: 0.25,
        }
    }
}

impl OptimizerConfig {
    pub fn effective_dead_band(&self) -> f64 {
        match self.dead_band {
            DeadBand::Fixed(d) => d,
            DeadBand::Rule(DeadBandRule::Auto) => self.tolerance / (2.0 * self.f_step),
        }
    }

    /// Checks the fields on their own and against a superchannel of `n` carriers.
    pub fn validate(&self, n: usize) -> Result<(), OptimizeError> {
        let bad = |msg: String| Err(OptimizeError::InvalidInput(msg));
        if !(self.f_step > 0.0 && self.f_step.is_finite()) {
            return bad(format!("f_step must be positive, got {}", self.f_step));
        }
        if !(self.laser_granularity > 0.0 && self.laser_granularity.is_finite()) {
            return bad(format!("laser_granularity must be positive, got {}", self.laser_granularity));
        }
        let ratio = self.f_step / self.laser_granularity;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return bad(format!(
                "f_step {} is not a multiple of the laser granularity {}",
                self.f_step, self.laser_granularity
            ));
        }
        if self.minibatch_size == 0 || self.minibatch_size > n {
            return bad(format!("minibatch_size must be in [1, {n}], got {}", self.minibatch_size));
        }
        if !(self.tolerance >= 0.0) {
            return bad(format!("tolerance must be non-negative, got {}", self.tolerance));
        }
        if self.patience == 0 {
            return bad("patience must be at least 1".into());
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.min_improvement >= 0.0) {
            return bad(format!("min_improvement must be non-negative, got {}", self.min_improvement));
        }
        if let DeadBand::Fixed(d) = self.dead_band {
            if !(d >= 0.0) {
                return bad(format!("dead_band must be non-negative, got {d}"));
            }
        }
        Ok(())
    }
}
