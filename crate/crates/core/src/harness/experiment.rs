use std::collections::HashMap;
use std::sync::Mutex;

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control_loop::{optimization_time, optimize, IterationTrace, OptimizerConfig, StopReason};
use crate::domain::{objective_value, Objective, ScenarioCase, SnrReport, SuperchannelPlan};
use crate::error::{HarnessError, OracleError};
use crate::harness::config::{ExperimentConfig, OracleConfig, StartMode};
use crate::oracle::{brute_force, BruteForceOptions, GridSearchSpec};
use crate::plm::{PlmModel, SurrogateMonitor};

/// Outcome of one optimizer run (one start, objective and step size).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartResult {
    pub case_id: String,
    pub objective: Objective,
    pub f_step: f64,
    pub minibatch_size: usize,
    pub start_index: usize,
    pub start_distances: Vec<f64>,
    /// Objective of the start plan as measured.
    pub initial_objective: f64,
    /// Best objective as measured.
    pub final_objective: f64,
    /// Best plan re-evaluated without monitoring noise.
    pub final_true_objective: f64,
    /// Noise-free objective of the equidistant plan.
    pub equidistant_objective: f64,
    pub iterations: u32,
    pub monitor_calls: u64,
    /// `I (M t_mon + t_calc)`, seconds.
    pub optimization_time: f64,
    pub stop: StopReason,
    pub best_distances: Vec<f64>,
    pub best_report: SnrReport,
    pub oracle_best: Option<f64>,
    pub oracle_worst: Option<f64>,
    pub improvement_vs_equidistant: f64,
    /// Final objective minus the oracle worst around it.
    pub improvement_vs_worst: Option<f64>,
    pub trace: IterationTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: ExperimentConfig,
    /// Ordered by objective, step size, then start index.
    pub runs: Vec<StartResult>,
    pub warnings: Vec<String>,
}

/// Start plans for the configured mode.
pub fn start_plans(case: &ScenarioCase, mode: &StartMode, granularity: f64) -> Result<Vec<SuperchannelPlan>, HarnessError> {
    match mode {
        StartMode::Equidistant => Ok(vec![case.equidistant_plan()?]),
        StartMode::Explicit { distances } => Ok(vec![case.starting_plan()?.with_distances(distances.clone())?]),
        StartMode::RandomDrift { range, count, seed } => {
            let base = case.equidistant_plan()?;
            let steps = (range / granularity).floor() as i64;
            (0..*count)
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_stream(i as u64);
                    // redraw until the drifted plan keeps every distance positive
                    loop {
                        let offsets: Vec<f64> = base
                            .offsets()
                            .iter()
                            .map(|o| o + rng.random_range(-steps..=steps) as f64 * granularity)
                            .collect();
                        let plan = SuperchannelPlan::from_offsets(
                            base.center_frequency(),
                            base.filter_bandwidth(),
                            &offsets,
                            base.subchannels().to_vec(),
                        );
                        if let Ok(p) = plan {
                            return Ok(p);
                        }
                    }
                })
                .collect()
        }
    }
}

struct Job {
    objective: Objective,
    f_step: f64,
    start_index: usize,
    start: SuperchannelPlan,
}

type OracleKey = (Vec<u64>, Objective);

fn oracle_around(
    plan: &SuperchannelPlan,
    objective: Objective,
    model: &PlmModel,
    cfg: &OracleConfig,
    parallel: bool,
    cache: &Mutex<HashMap<OracleKey, (f64, f64)>>,
) -> Result<(f64, f64), OracleError> {
    let key = (plan.distances().iter().map(|d| d.to_bits()).collect(), objective);
    if let Some(v) = cache.lock().expect("oracle cache poisoned").get(&key) {
        return Ok(*v);
    }
    let spec = GridSearchSpec { center_plan: plan.clone(), half_range: cfg.half_range, grid_step: cfg.grid_step, objective };
    let options = BruteForceOptions { cap: cfg.cap, force: cfg.force, parallel, ..Default::default() };
    let r = brute_force(&spec, model, &options)?;
    let v = (r.best_value, r.worst_value);
    cache.lock().expect("oracle cache poisoned").insert(key, v);
    Ok(v)
}

/// Runs every (objective, step, start) combination of `config`.
///
/// Each run owns its monitor, seeded with `model.rng_seed + start_index`; the
/// optimizer seed is `optimizer.rng_seed + start_index`. Results are keyed by
/// position, so parallel and sequential execution give identical output.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult, HarnessError> {
    config.validate()?;
    let case = config.scenario_case()?;
    let model = config.model()?;
    let truth = PlmModel { monitor_noise_sigma: 0.0, ..model.clone() };
    let starts = start_plans(&case, &config.start, config.optimizer.laser_granularity)?;
    let equidistant = case.equidistant_plan()?;
    let equidistant_report = truth.evaluate(&equidistant);

    let mut jobs = Vec::new();
    for &objective in &config.objectives {
        for f_step in config.steps() {
            for (start_index, start) in starts.iter().enumerate() {
                jobs.push(Job { objective, f_step, start_index, start: start.clone() });
            }
        }
    }
    info!("{}: {} runs", case.case_id, jobs.len());

    let cache = Mutex::new(HashMap::new());
    let warnings = Mutex::new(Vec::<(usize, String)>::new());
    let run_one = |(job_index, job): (usize, &Job)| -> Result<StartResult, HarnessError> {
        let seed_offset = job.start_index as u64;
        let monitor_model = PlmModel { rng_seed: model.rng_seed.wrapping_add(seed_offset), ..model.clone() };
        let mut monitor = SurrogateMonitor::new(monitor_model).with_monitoring_time(config.timing.t_mon);
        let opt = OptimizerConfig {
            f_step: job.f_step,
            rng_seed: config.optimizer.rng_seed.wrapping_add(seed_offset),
            ..config.optimizer.clone()
        };
        let out = optimize(&job.start, job.objective, &mut monitor, &opt)?;
        let final_true = objective_value(&truth.evaluate(&out.best_plan), job.objective)?;
        let eq = objective_value(&equidistant_report, job.objective)?;
        let (oracle_best, oracle_worst) = match &config.oracle {
            None => (None, None),
            // the oracle takes the pool only when runs are sequential
            Some(o) => match oracle_around(&out.best_plan, job.objective, &truth, o, !config.parallel, &cache) {
                Ok((b, w)) => (Some(b), Some(w)),
                Err(e @ OracleError::CapExceeded { .. }) => {
                    let msg = format!("run {job_index}: oracle skipped: {e}");
                    warn!("{msg}");
                    warnings.lock().expect("warning list poisoned").push((job_index, msg));
                    (None, None)
                }
                Err(e) => return Err(e.into()),
            },
        };
        let iterations = out.trace.iterations();
        Ok(StartResult {
            case_id: case.case_id.clone(),
            objective: job.objective,
            f_step: job.f_step,
            minibatch_size: opt.minibatch_size,
            start_index: job.start_index,
            start_distances: job.start.distances().to_vec(),
            initial_objective: out.initial_objective,
            final_objective: out.best_objective,
            final_true_objective: final_true,
            equidistant_objective: eq,
            iterations,
            monitor_calls: out.trace.monitor_calls,
            optimization_time: optimization_time(iterations as u64, opt.minibatch_size, &config.timing),
            stop: out.trace.stop.clone(),
            best_distances: out.best_plan.distances().to_vec(),
            best_report: out.best_report.clone(),
            oracle_best,
            oracle_worst,
            improvement_vs_equidistant: final_true - eq,
            improvement_vs_worst: oracle_worst.map(|w| final_true - w),
            trace: out.trace,
        })
    };

    let runs: Vec<StartResult> = if config.parallel {
        jobs.par_iter().enumerate().map(run_one).collect::<Result<_, _>>()?
    } else {
        jobs.iter().enumerate().map(run_one).collect::<Result<_, _>>()?
    };
    let mut warnings = warnings.into_inner().expect("warning list poisoned");
    warnings.sort();
    Ok(RunResult { config: config.clone(), runs, warnings: warnings.into_iter().map(|(_, m)| m).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ModelOverrides, OracleConfig};

    fn quiet(alias: &str) -> ExperimentConfig {
        let mut c = ExperimentConfig::for_scenario(alias);
        c.model = ModelOverrides { monitor_noise_sigma: Some(0.0), ..Default::default() };
        c
    }

    #[test]
    fn default_case_improves_both_objectives() {
        let r = run_experiment(&quiet("table1-case1")).unwrap();
        assert_eq!(r.runs.len(), 2);
        for run in &r.runs {
            assert!(run.final_objective >= run.initial_objective);
            assert!(run.improvement_vs_equidistant >= 0.0);
            assert!(run.oracle_best.is_none() && run.improvement_vs_worst.is_none());
            assert_eq!(run.monitor_calls, run.trace.counted_calls());
            let expect = run.iterations as f64 * (2.0 * 60.0 + 1.0);
            assert_eq!(run.optimization_time, expect);
        }
    }

    #[test]
    fn drifted_starts_are_reproducible_and_on_grid() {
        let case = ScenarioCase::builtin("table1-case1").unwrap();
        let mode = StartMode::RandomDrift { range: 2.0, count: 10, seed: 3 };
        let a = start_plans(&case, &mode, 0.25).unwrap();
        let b = start_plans(&case, &mode, 0.25).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        let base = case.equidistant_plan().unwrap().offsets();
        for p in &a {
            for (o, b0) in p.offsets().iter().zip(&base) {
                let d = o - b0;
                assert!(d.abs() <= 2.0 + 1e-12);
                assert!(((d / 0.25) - (d / 0.25).round()).abs() < 1e-9);
            }
        }
        assert!(a.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut c = quiet("table1-case1");
        c.start = StartMode::RandomDrift { range: 2.0, count: 3, seed: 1 };
        c.model.monitor_noise_sigma = Some(0.05);
        let par = run_experiment(&c).unwrap();
        c.parallel = false;
        let seq = run_experiment(&c).unwrap();
        assert_eq!(par.runs, seq.runs);
    }

    #[test]
    fn oracle_cap_is_a_warning() {
        let mut c = quiet("table1-case1");
        c.objectives = vec![Objective::MinSnr];
        c.oracle = Some(OracleConfig { half_range: 2.0, grid_step: 0.25, cap: 1000, force: false });
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].contains("83521"), "{}", r.warnings[0]);
        assert!(r.runs[0].oracle_best.is_none());

        c.oracle = Some(OracleConfig { half_range: 1.0, grid_step: 1.0, cap: 1000, force: false });
        let r = run_experiment(&c).unwrap();
        assert!(r.warnings.is_empty());
        let run = &r.runs[0];
        let worst = run.oracle_worst.unwrap();
        assert!(run.oracle_best.unwrap() >= worst);
        assert_eq!(run.improvement_vs_worst, Some(run.final_true_objective - worst));
    }

    #[test]
    fn step_list_multiplies_runs() {
        let mut c = quiet("table1-case6");
        c.f_steps = vec![0.25, 0.5];
        let r = run_experiment(&c).unwrap();
        let keys: Vec<_> = r.runs.iter().map(|x| (x.objective, x.f_step)).collect();
        assert_eq!(
            keys,
            vec![
                (Objective::AverageSnr, 0.25),
                (Objective::AverageSnr, 0.5),
                (Objective::MinSnr, 0.25),
                (Objective::MinSnr, 0.5)
            ]
        );
    }
}
