use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::control_loop::config::OptimizerConfig;
use crate::control_loop::trace::{IterationRecord, IterationTrace, ProbeRecord, StopReason};
use crate::domain::{check_distances, objective_of, Objective, SnrReport, SuperchannelPlan};
use crate::error::{DomainError, MonitorError, OptimizeError};
use crate::plm::Monitor;

/// Result of one probe.
#[derive(Debug, Clone, PartialEq)]
pub enum Probe {
    Measured { subgradient: f64, plan: SuperchannelPlan, report: SnrReport, objective: f64 },
    /// The `+f_step` shift would break a constraint; nothing was measured.
    Unavailable,
}

/// `g_n = (h(D) - h(δD_n)) / f_step`, where `δD_n` moves carrier `n` up by
/// `f_step`. A positive value means the probe made things worse.
pub fn finite_difference_subgradient(
    plan: &SuperchannelPlan,
    baseline_objective: f64,
    n: usize,
    objective: Objective,
    monitor: &mut dyn Monitor,
    f_step: f64,
    enforce_lower_limits: bool,
) -> Result<Probe, MonitorError> {
    let probe = match plan.shift_subchannel(n, f_step) {
        Ok(p) => p,
        Err(DomainError::Infeasible(_)) => return Ok(Probe::Unavailable),
        Err(e) => return Err(e.into()),
    };
    if enforce_lower_limits && !probe.check_constraints(true).is_empty() {
        return Ok(Probe::Unavailable);
    }
    let report = monitor.measure(&probe)?;
    let value = objective_of(&report.snr, objective)?;
    Ok(Probe::Measured {
        subgradient: (baseline_objective - value) / f_step,
        plan: probe,
        report,
        objective: value,
    })
}

/// `m` distinct indices out of `0..n`, uniformly without replacement, sorted.
pub fn select_minibatch<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Vec<usize>, OptimizeError> {
    if m == 0 || m > n {
        return Err(OptimizeError::InvalidInput(format!("minibatch size {m} not in [1, {n}]")));
    }
    let mut picked = sample(rng, n, m).into_vec();
    picked.sort_unstable();
    Ok(picked)
}

/// Outcome of [`apply_step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub plan: SuperchannelPlan,
    pub moves: Vec<(usize, f64)>,
    pub cancelled: Vec<usize>,
}

/// Moves every carrier whose `|g_n|` exceeds `dead_band` by `f_step` against
/// the sign of `g_n`. Moves are applied together in index order; one that
/// would break positivity (or the lower limits, when enforced) is dropped on
/// its own. The result is snapped to the laser grid.
pub fn apply_step(
    plan: &SuperchannelPlan,
    subgradients: &BTreeMap<usize, f64>,
    f_step: f64,
    dead_band: f64,
    enforce_lower_limits: bool,
    laser_granularity: f64,
) -> StepOutcome {
    let mut distances = plan.distances().to_vec();
    let spec = &plan.subchannels()[0];
    let mut moves = Vec::new();
    let mut cancelled = Vec::new();
    for (&n, &g) in subgradients {
        if !(g.abs() > dead_band) {
            continue;
        }
        let delta = -f_step * g.signum();
        let mut trial = distances.clone();
        trial[n] += delta;
        trial[n + 1] -= delta;
        let ok = check_distances(&trial, plan.filter_bandwidth(), spec, enforce_lower_limits)
            .iter()
            .all(|v| matches!(v, crate::domain::ConstraintViolation::SumMismatch { .. }));
        if ok {
            distances = trial;
            moves.push((n, delta));
        } else {
            cancelled.push(n);
        }
    }
    let stepped = plan.with_distances(distances).unwrap_or_else(|_| plan.clone());
    let snapped = stepped.quantized(laser_granularity).unwrap_or(stepped);
    StepOutcome { plan: snapped, moves, cancelled }
}

fn measure(
    monitor: &mut dyn Monitor,
    plan: &SuperchannelPlan,
    objective: Objective,
) -> Result<(SnrReport, f64), MonitorError> {
    let report = monitor.measure(plan)?;
    let value = objective_of(&report.snr, objective)?;
    Ok((report, value))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub best_plan: SuperchannelPlan,
    pub best_objective: f64,
    pub best_report: SnrReport,
    /// Objective of the start plan as first measured.
    pub initial_objective: f64,
    pub trace: IterationTrace,
}

/// Closed-loop optimization from `start`.
///
/// Each iteration measures the current plan (reusing the last measurement when
/// the plan did not move), probes a random minibatch of `M` carriers, and takes
/// a fixed-length signed step. The best plan seen, probes included, is kept;
/// if the applied plan drops more than `tolerance` below it the loop resumes
/// from the best plan. Stops after `patience` iterations without improvement
/// or at `max_iterations`.
pub fn optimize(
    start: &SuperchannelPlan,
    objective: Objective,
    monitor: &mut dyn Monitor,
    config: &OptimizerConfig,
) -> Result<OptimizeOutcome, OptimizeError> {
    optimize_with_observer(start, objective, monitor, config, |_| {})
}

/// [`optimize`] calling `observer` after each completed iteration.
pub fn optimize_with_observer<F: FnMut(&IterationRecord)>(
    start: &SuperchannelPlan,
    objective: Objective,
    monitor: &mut dyn Monitor,
    config: &OptimizerConfig,
    mut observer: F,
) -> Result<OptimizeOutcome, OptimizeError> {
    let n = start.subchannel_count();
    config.validate(n)?;
    let start = start.quantized(config.laser_granularity)?;
    if let Some(v) = start.check_constraints(config.enforce_lower_limits).into_iter().next() {
        return Err(OptimizeError::InvalidInput(format!("start plan is infeasible: {v}")));
    }
    let dead_band = config.effective_dead_band();
    let start_distances = start.distances().to_vec();

    let mut records: Vec<IterationRecord> = Vec::new();
    let mut calls: u64 = 0;
    let mut current = start;
    let mut baseline: Option<(SnrReport, f64)> = None;
    let mut best: Option<(SuperchannelPlan, SnrReport, f64)> = None;
    let mut best_iteration: u32 = 0;
    let mut initial_objective = f64::NAN;
    let mut stale: u32 = 0;
    let mut stop = StopReason::MaxIterations;

    'outer: for iteration in 1..=config.max_iterations {
        let best_before = best.as_ref().map(|b| b.2);

        let baseline_measured = baseline.is_none();
        let (mut base_report, mut base_value) = match baseline.take() {
            Some(b) => b,
            None => match measure(monitor, &current, objective) {
                Ok(r) => {
                    calls += 1;
                    r
                }
                Err(e) => {
                    stop = StopReason::MonitorFailure(e.to_string());
                    break 'outer;
                }
            },
        };
        if iteration == 1 {
            initial_objective = base_value;
        }
        if best.as_ref().is_none_or(|b| base_value > b.2) {
            best = Some((current.clone(), base_report.clone(), base_value));
            best_iteration = iteration - 1;
        }
        let mut restarted = false;
        if let Some((bp, br, bv)) = &best {
            if base_value < bv - config.tolerance {
                current = bp.clone();
                base_report = br.clone();
                base_value = *bv;
                restarted = true;
            }
        }
        let baseline_distances = current.distances().to_vec();

        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        rng.set_stream(iteration as u64);
        let mut batch = select_minibatch(n, config.minibatch_size, &mut rng)?;

        let mut probes = Vec::new();
        let mut skipped = Vec::new();
        let mut subgradients = BTreeMap::new();
        let mut k = 0;
        let mut resampled = false;
        while k < batch.len() {
            let idx = batch[k];
            k += 1;
            let probe = finite_difference_subgradient(
                &current,
                base_value,
                idx,
                objective,
                monitor,
                config.f_step,
                config.enforce_lower_limits,
            );
            match probe {
                Ok(Probe::Measured { subgradient, plan, report, objective: value }) => {
                    calls += 1;
                    if best.as_ref().is_none_or(|b| value > b.2) {
                        best = Some((plan.clone(), report.clone(), value));
                        best_iteration = iteration;
                    }
                    subgradients.insert(idx, subgradient);
                    probes.push(ProbeRecord {
                        index: idx,
                        distances: plan.distances().to_vec(),
                        report,
                        objective: value,
                        subgradient,
                    });
                }
                Ok(Probe::Unavailable) => {
                    skipped.push(idx);
                    // one replacement draw per iteration among unused indices
                    if !resampled {
                        resampled = true;
                        let unused: Vec<usize> =
                            (0..n).filter(|i| !batch.contains(i) && !skipped.contains(i)).collect();
                        if !unused.is_empty() {
                            batch.push(unused[rng.random_range(0..unused.len())]);
                        }
                    }
                }
                Err(e) => {
                    stop = StopReason::MonitorFailure(e.to_string());
                    break 'outer;
                }
            }
        }

        let step = apply_step(
            &current,
            &subgradients,
            config.f_step,
            dead_band,
            config.enforce_lower_limits,
            config.laser_granularity,
        );
        let moved = step.plan.distances() != current.distances();
        if !moved {
            baseline = Some((base_report.clone(), base_value));
        }
        current = step.plan;

        let (bp, _, bv) = best.as_ref().expect("best set after the baseline");
        let record = IterationRecord {
            iteration,
            baseline_distances,
            baseline_report: base_report,
            baseline_objective: base_value,
            baseline_measured,
            restarted,
            minibatch: batch,
            skipped,
            probes,
            moves: step.moves,
            cancelled: step.cancelled,
            applied_distances: current.distances().to_vec(),
            best_objective: *bv,
            best_distances: bp.distances().to_vec(),
            monitor_calls: calls,
        };
        observer(&record);
        records.push(record);

        let improved = match best_before {
            None => true,
            Some(prev) => *bv > prev + config.min_improvement,
        };
        if improved {
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                stop = StopReason::Converged;
                break;
            }
        }
    }

    let Some((best_plan, best_report, best_objective)) = best else {
        // the very first measurement failed
        let detail = match &stop {
            StopReason::MonitorFailure(m) => m.clone(),
            _ => "no measurement taken".into(),
        };
        return Err(OptimizeError::InvalidInput(format!("monitor failed before any measurement: {detail}")));
    };
    let mut trace = IterationTrace {
        start_distances,
        records,
        stop,
        monitor_calls: calls,
        best_iteration,
        convergence_iteration: 0,
    };
    trace.convergence_iteration = trace
        .iterations_to_within(initial_objective, best_objective, config.tolerance)
        .unwrap_or(best_iteration);
    Ok(OptimizeOutcome { best_plan, best_objective, best_report, initial_objective, trace })
}
