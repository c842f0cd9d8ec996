//! Brute-force grid search over per-carrier frequency offsets.
//!
//! Every carrier independently takes each offset `k * step` for
//! `k = -K..=K` around the center plan, `K = half_range / step`, giving
//! `(1 + 2 half_range / step)^N` points. Points whose carriers collide or
//! leave the filter are still scored: they are excluded from the best but
//! count toward the worst, since a real laser drift ignores constraints.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{
    check_distances, objective_of, offsets_to_distances, Objective, SuperchannelPlan,
};
use crate::error::OracleError;
use crate::plm::PlmModel;

pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchSpec {
    pub center_plan: SuperchannelPlan,
    /// GHz each side of the center position.
    pub half_range: f64,
    /// GHz
    pub grid_step: f64,
    pub objective: Objective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForceOptions {
    pub cap: u64,
    /// Run past the cap.
    pub force: bool,
    pub parallel: bool,
    /// Keep every scored point.
    pub keep_table: bool,
    /// Treat the R_s/4, R_s/2 distance floors as part of feasibility.
    pub enforce_lower_limits: bool,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions { cap: DEFAULT_CAP, force: false, parallel: true, keep_table: false, enforce_lower_limits: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub index: u64,
    /// Carrier offsets relative to the center plan, GHz.
    pub shifts: Vec<f64>,
    pub distances: Vec<f64>,
    pub snr: Vec<f64>,
    pub objective: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub objective: Objective,
    pub evaluations: u64,
    pub best_plan: SuperchannelPlan,
    pub best_value: f64,
    /// Distances of the worst point; may be infeasible.
    pub worst_distances: Vec<f64>,
    pub worst_value: f64,
    pub worst_feasible: bool,
    /// Worst among feasible points only.
    pub worst_feasible_plan: SuperchannelPlan,
    pub worst_feasible_value: f64,
    pub table: Vec<GridPoint>,
}

impl BruteForceResult {
    /// `best_value - worst_value`
    pub fn margin(&self) -> f64 {
        self.best_value - self.worst_value
    }
}

/// `(1 + 2 half_range / step)^n`, or `None` on overflow.
pub fn grid_size(n: usize, half_range: f64, step: f64) -> Option<u128> {
    let per = levels(half_range, step).ok()? as u128 * 2 + 1;
    per.checked_pow(u32::try_from(n).ok()?)
}

fn levels(half_range: f64, step: f64) -> Result<u64, OracleError> {
    if !(half_range >= 0.0 && half_range.is_finite()) {
        return Err(OracleError::InvalidGrid(format!("half range must be non-negative, got {half_range}")));
    }
    if half_range == 0.0 {
        return Ok(0);
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(OracleError::InvalidGrid(format!("grid step must be positive, got {step}")));
    }
    let k = half_range / step;
    if (k - k.round()).abs() > 1e-9 {
        return Err(OracleError::InvalidGrid(format!(
            "half range {half_range} is not a multiple of the grid step {step}"
        )));
    }
    Ok(k.round() as u64)
}

/// Exhaustive search for one objective.
pub fn brute_force(
    spec: &GridSearchSpec,
    model: &PlmModel,
    options: &BruteForceOptions,
) -> Result<BruteForceResult, OracleError> {
    let mut out = brute_force_objectives(
        &spec.center_plan,
        spec.half_range,
        spec.grid_step,
        &[spec.objective],
        model,
        options,
    )?;
    Ok(out.remove(0))
}

#[derive(Debug, Clone, Copy)]
struct Extremes {
    best: Option<(f64, u64)>,
    worst: (f64, u64),
    worst_feasible: Option<(f64, u64)>,
}

impl Extremes {
    fn empty() -> Self {
        Extremes { best: None, worst: (f64::INFINITY, u64::MAX), worst_feasible: None }
    }

    fn push(mut self, value: f64, index: u64, feasible: bool) -> Self {
        let better = |a: (f64, u64), b: (f64, u64)| a.0 > b.0 || (a.0 == b.0 && a.1 < b.1);
        let worse = |a: (f64, u64), b: (f64, u64)| a.0 < b.0 || (a.0 == b.0 && a.1 < b.1);
        let p = (value, index);
        if feasible {
            if self.best.is_none_or(|b| better(p, b)) {
                self.best = Some(p);
            }
            if self.worst_feasible.is_none_or(|w| worse(p, w)) {
                self.worst_feasible = Some(p);
            }
        }
        if worse(p, self.worst) {
            self.worst = p;
        }
        self
    }

    fn merge(self, other: Extremes) -> Self {
        let mut m = self.push(other.worst.0, other.worst.1, false);
        if let Some((v, i)) = other.best {
            m = m.push(v, i, true);
        }
        if let Some((v, i)) = other.worst_feasible {
            m = m.push(v, i, true);
        }
        m
    }
}

/// Exhaustive search scoring several objectives from a single pass over the grid.
pub fn brute_force_objectives(
    center: &SuperchannelPlan,
    half_range: f64,
    grid_step: f64,
    objectives: &[Objective],
    model: &PlmModel,
    options: &BruteForceOptions,
) -> Result<Vec<BruteForceResult>, OracleError> {
    if objectives.is_empty() {
        return Err(OracleError::InvalidGrid("no objective requested".into()));
    }
    let n = center.subchannel_count();
    let k = levels(half_range, grid_step)?;
    let count = grid_size(n, half_range, grid_step).unwrap_or(u128::MAX);
    if count > options.cap as u128 && !options.force {
        return Err(OracleError::CapExceeded { count, cap: options.cap });
    }
    let count = u64::try_from(count)
        .map_err(|_| OracleError::InvalidGrid(format!("grid of {count} points cannot be enumerated")))?;
    let radix = 2 * k + 1;
    let base_offsets = center.offsets();
    let bandwidth = center.filter_bandwidth();
    let specs = center.subchannels();
    let spec0 = &specs[0];

    let shifts_of = |index: u64| -> Vec<f64> {
        let mut rest = index;
        (0..n)
            .map(|_| {
                let digit = rest % radix;
                rest /= radix;
                (digit as f64 - k as f64) * grid_step
            })
            .collect()
    };
    let score = |index: u64| -> GridPoint {
        let shifts = shifts_of(index);
        let offsets: Vec<f64> = base_offsets.iter().zip(&shifts).map(|(o, s)| o + s).collect();
        let distances = offsets_to_distances(&offsets, bandwidth);
        let feasible = check_distances(&distances, bandwidth, spec0, options.enforce_lower_limits).is_empty();
        let snr = model.snr_at_offsets(&offsets, specs, bandwidth, center.center_frequency());
        GridPoint { index, shifts, distances, snr, objective: f64::NAN, feasible }
    };
    let values = |p: &GridPoint| -> Vec<f64> {
        objectives.iter().map(|&o| objective_of(&p.snr, o).unwrap_or(f64::NEG_INFINITY)).collect()
    };
    let fold = |mut acc: Vec<Extremes>, p: &GridPoint| {
        for (e, v) in acc.iter_mut().zip(values(p)) {
            *e = e.push(v, p.index, p.feasible);
        }
        acc
    };
    let merge = |a: Vec<Extremes>, b: Vec<Extremes>| -> Vec<Extremes> {
        a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()
    };
    let init = || vec![Extremes::empty(); objectives.len()];

    let (extremes, table) = if options.keep_table {
        let points: Vec<GridPoint> = if options.parallel {
            (0..count).into_par_iter().map(score).collect()
        } else {
            (0..count).map(score).collect()
        };
        let ext = points.iter().fold(init(), fold);
        (ext, points)
    } else if options.parallel {
        let ext = (0..count)
            .into_par_iter()
            .fold(init, |acc, i| fold(acc, &score(i)))
            .reduce(init, merge);
        (ext, Vec::new())
    } else {
        ((0..count).fold(init(), |acc, i| fold(acc, &score(i))), Vec::new())
    };

    let plan_at = |index: u64| -> SuperchannelPlan {
        let p = score(index);
        center.with_distances(p.distances).expect("feasible grid point")
    };
    objectives
        .iter()
        .zip(extremes)
        .map(|(&objective, e)| {
            // the center itself (all shifts zero) is always a grid point
            let (best_value, best_index) =
                e.best.ok_or_else(|| OracleError::InvalidGrid("no feasible grid point".into()))?;
            let (worst_feasible_value, worst_feasible_index) = e.worst_feasible.expect("best exists");
            let worst = score(e.worst.1);
            let table = table
                .iter()
                .map(|p| GridPoint { objective: objective_of(&p.snr, objective).unwrap_or(f64::NEG_INFINITY), ..p.clone() })
                .collect();
            Ok(BruteForceResult {
                objective,
                evaluations: count,
                best_plan: plan_at(best_index),
                best_value,
                worst_distances: worst.distances,
                worst_value: e.worst.0,
                worst_feasible: worst.feasible,
                worst_feasible_plan: plan_at(worst_feasible_index),
                worst_feasible_value,
                table,
            })
        })
        .collect()
}

/// Best minus worst objective over the grid centered on `optimal_plan`: the
/// margin a static design needs to survive drifts of up to `half_range`.
pub fn soft_failure_margin(
    optimal_plan: &SuperchannelPlan,
    half_range: f64,
    grid_step: f64,
    objective: Objective,
    model: &PlmModel,
    options: &BruteForceOptions,
) -> Result<f64, OracleError> {
    let spec = GridSearchSpec { center_plan: optimal_plan.clone(), half_range, grid_step, objective };
    Ok(brute_force(&spec, model, options)?.margin())
}
