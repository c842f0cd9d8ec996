use proptest::prelude::*;

use superchannel::control_loop::{iteration_bound, optimize, OptimizerConfig};
use superchannel::domain::{min_distance, objective_value, Objective, ScenarioCase, SuperchannelPlan};
use superchannel::harness::{parse_config, ExperimentConfig, StartMode};
use superchannel::oracle::{brute_force, BruteForceOptions, GridSearchSpec};
use superchannel::plm::{PlmModel, SurrogateMonitor};

fn case() -> ScenarioCase {
    ScenarioCase::builtin("table1-case1").unwrap()
}

fn quiet() -> PlmModel {
    PlmModel { monitor_noise_sigma: 0.0, ..PlmModel::for_scenario(&case()) }
}

fn drifted(steps: &[i32]) -> SuperchannelPlan {
    let start = case().equidistant_plan().unwrap();
    let offsets: Vec<f64> = start.offsets().iter().zip(steps).map(|(o, k)| o + *k as f64 * 0.25).collect();
    SuperchannelPlan::from_offsets(start.center_frequency(), start.filter_bandwidth(), &offsets, start.subchannels().to_vec())
        .unwrap()
}

fn objective() -> impl Strategy<Value = Objective> {
    prop_oneof![Just(Objective::AverageSnr), Just(Objective::MinSnr)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn optimizer_never_ends_below_its_start(
        steps in proptest::collection::vec(-8i32..=8, 4),
        seed in 0u64..1000,
        m in 1usize..=4,
        obj in objective(),
    ) {
        let start = drifted(&steps);
        let cfg = OptimizerConfig { minibatch_size: m, rng_seed: seed, ..Default::default() };
        let mut monitor = SurrogateMonitor::new(quiet());
        let out = optimize(&start, obj, &mut monitor, &cfg).unwrap();
        prop_assert!(out.best_objective >= out.initial_objective);
        prop_assert!(out.trace.monitor_calls <= out.trace.iterations() as u64 * (m as u64 + 1));
        for d in out.trace.all_distances() {
            prop_assert!((d.iter().sum::<f64>() - start.filter_bandwidth()).abs() <= 1e-9);
        }
        let best = out.trace.best_objectives();
        prop_assert!(best.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn squeezing_an_interior_gap_hurts_both_neighbours(gap_index in 1usize..4, squeeze in 1u32..16) {
        // no filter and no ripple, so moving the outer edge changes nothing but crosstalk
        let mut model = quiet();
        model.link.filter_count = 0;
        model.ripple_amplitude = 0.0;
        let plan = case().equidistant_plan().unwrap();
        let spec = plan.subchannels()[0];
        let mut d = plan.distances().to_vec();
        // start at d_min and shrink the gap, feeding the slack to the outer edge
        let target = min_distance(&spec) - squeeze as f64 * 0.25;
        let delta = d[gap_index] - target;
        d[gap_index] = target;
        let last = d.len() - 1;
        let edge = if gap_index < last / 2 + 1 { 0 } else { last };
        d[edge] += delta;
        let a = plan.with_distances(d.clone()).unwrap();
        d[gap_index] -= 0.25;
        d[edge] += 0.25;
        let b = plan.with_distances(d).unwrap();
        let (ra, rb) = (model.evaluate(&a), model.evaluate(&b));
        prop_assert!(rb.snr[gap_index - 1] < ra.snr[gap_index - 1]);
        prop_assert!(rb.snr[gap_index] < ra.snr[gap_index]);
    }

    #[test]
    fn noise_free_evaluation_is_pure(steps in proptest::collection::vec(-8i32..=8, 4)) {
        let plan = drifted(&steps);
        let model = quiet();
        let a = model.evaluate(&plan);
        let b = model.snr(&plan, false);
        prop_assert_eq!(a.snr.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.snr.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn oracle_best_dominates_center_and_worst(steps in proptest::collection::vec(-4i32..=4, 4), obj in objective()) {
        let center = drifted(&steps);
        let model = quiet();
        let r = brute_force(
            &GridSearchSpec { center_plan: center.clone(), half_range: 1.0, grid_step: 1.0, objective: obj },
            &model,
            &BruteForceOptions { parallel: false, ..Default::default() },
        ).unwrap();
        let here = objective_value(&model.evaluate(&center), obj).unwrap();
        prop_assert!(r.best_value >= here);
        prop_assert!(r.worst_value <= here);
        prop_assert_eq!(r.evaluations, 81);
    }

    #[test]
    fn bound_scales_with_inverse_square_of_minibatch(r in 0.5f64..5.0, g in 0.1f64..3.0, eps in 0.1f64..1.0) {
        let one = iteration_bound(4, r, g, 1, eps) as f64;
        let two = iteration_bound(4, r, g, 2, eps) as f64;
        // ceil makes the ratio approximate
        prop_assert!((one / 4.0 - two).abs() <= 1.0);
    }

    #[test]
    fn config_round_trips(
        m in 1usize..=4,
        patience in 1u32..50,
        seed in 0u64..u64::MAX / 2,
        count in 1usize..20,
        range_steps in 0u32..16,
        noise in 0.0f64..0.2,
    ) {
        let mut c = ExperimentConfig::for_scenario("table1-case3");
        c.optimizer.minibatch_size = m;
        c.optimizer.patience = patience;
        c.optimizer.rng_seed = seed;
        c.model.monitor_noise_sigma = Some(noise);
        c.start = StartMode::RandomDrift { range: range_steps as f64 * 0.25, count, seed };
        let back = parse_config(&c.to_toml()).unwrap();
        prop_assert_eq!(back, c);
    }
}
