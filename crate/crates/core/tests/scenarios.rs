use std::time::{Duration, Instant};

use superchannel::domain::ScenarioCase;
use superchannel::harness::{run_experiment, ExperimentConfig, ModelOverrides};

#[test]
fn nine_catalogue_cases_run_end_to_end() {
    let t = Instant::now();
    for i in 1..=9 {
        let alias = format!("table1-case{i}");
        let mut c = ExperimentConfig::for_scenario(&alias);
        c.f_steps = vec![0.25, 0.5];
        c.model = ModelOverrides { monitor_noise_sigma: Some(0.0), ..Default::default() };
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.runs.len(), 4, "{alias}");
        for run in &r.runs {
            assert!(run.final_objective >= run.initial_objective, "{alias}");
            assert!(run.improvement_vs_equidistant >= 0.0, "{alias}");
        }
    }
    assert!(t.elapsed() < Duration::from_secs(600));
}

#[test]
fn largest_scaling_case_accounts_every_call() {
    let case = ScenarioCase::builtin("scaling-n10").unwrap();
    let mut c = ExperimentConfig::for_scenario("scaling-n10");
    c.optimizer.f_step = 0.5;
    c.optimizer.minibatch_size = case.subchannel_count / 2;
    let r = run_experiment(&c).unwrap();
    for run in &r.runs {
        let per_iteration: u64 =
            run.trace.records.iter().map(|rec| rec.baseline_measured as u64 + rec.probes.len() as u64).sum();
        assert_eq!(run.monitor_calls, per_iteration);
        assert!(run.monitor_calls <= run.iterations as u64 * 6);
    }
}
