use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::warn;

use superchannel::domain::{objective_value, Objective, ScenarioCase};
use superchannel::error::{ConfigError, HarnessError, OracleError};
use superchannel::harness::{
    load_config, read_results, report, run_experiment, sweep, write_plot_data, write_results, ExperimentConfig,
    ScenarioSource, StartMode, SweepSpec,
};
use superchannel::oracle::{brute_force, BruteForceOptions, GridSearchSpec};
use superchannel::plm::PlmModel;

#[derive(Parser)]
#[command(name = "superchannel", version, about = "Closed-loop subchannel frequency optimization on a surrogate link")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario (see `scenarios`); overrides the config.
    #[arg(long)]
    case: Option<String>,
    /// Optimizer and monitor seed.
    #[arg(long)]
    seed: Option<u64>,
    /// `average` or `min`; default both.
    #[arg(long)]
    objective: Option<Objective>,
    /// Optimizer step, GHz.
    #[arg(long)]
    step: Option<f64>,
    /// Monitoring noise sigma, dB.
    #[arg(long)]
    noise: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in scenarios.
    Scenarios,
    /// One SNR evaluation of the start plan.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Distance vector, comma separated (N + 1 values).
        #[arg(long, value_delimiter = ',')]
        distances: Option<Vec<f64>>,
    },
    /// Run the optimizer and persist CSV and JSON results.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Random drifted starts instead of the configured start.
        #[arg(long)]
        starts: Option<usize>,
        /// Also run the brute-force oracle around each result.
        #[arg(long)]
        oracle: bool,
        /// Run the oracle past its evaluation cap.
        #[arg(long)]
        force: bool,
    },
    /// Exhaustive grid search around the start plan.
    Bruteforce {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2.0)]
        half_range: f64,
        #[arg(long, default_value_t = 0.25)]
        grid_step: f64,
        #[arg(long, default_value_t = superchannel::oracle::DEFAULT_CAP)]
        cap: u64,
        /// Run past the evaluation cap.
        #[arg(long)]
        force: bool,
    },
    /// Middle-carrier SNR against d_1 for three carriers.
    Sweep {
        #[arg(long, default_value_t = 69.0)]
        d_total: f64,
        #[arg(long, default_value_t = 0.25)]
        step: f64,
        #[arg(long, default_value_t = 2.0)]
        half_window: f64,
        #[arg(long, default_value_t = 0)]
        spans: u32,
        /// CSV file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary table and plot data from a results JSON.
    Report {
        #[arg(long)]
        input: PathBuf,
        /// Directory for plot CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &HarnessError) -> u8 {
    match e {
        HarnessError::Config(_) => 1,
        HarnessError::Oracle(OracleError::CapExceeded { .. }) => 3,
        _ => 2,
    }
}

fn build_config(c: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &c.config {
        Some(p) => load_config(p)?,
        None => ExperimentConfig::for_scenario("table1-case1"),
    };
    if let Some(case) = &c.case {
        cfg.scenario = ScenarioSource::Alias(case.clone());
    }
    if let Some(s) = c.seed {
        cfg.optimizer.rng_seed = s;
        cfg.model.rng_seed = Some(s);
    }
    if let Some(o) = c.objective {
        cfg.objectives = vec![o];
    }
    if let Some(s) = c.step {
        cfg.optimizer.f_step = s;
        cfg.f_steps.clear();
    }
    if let Some(n) = c.noise {
        cfg.model.monitor_noise_sigma = Some(n);
    }
    if let Some(o) = &c.out {
        cfg.output.dir = o.display().to_string();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn start_plan(cfg: &ExperimentConfig) -> Result<superchannel::SuperchannelPlan, HarnessError> {
    let plans = superchannel::harness::start_plans(&cfg.scenario_case()?, &cfg.start, cfg.optimizer.laser_granularity)?;
    Ok(plans.into_iter().next().expect("at least one start"))
}

fn print_scenarios() {
    println!("{:<14} {:>6} {:>6} {:>6} {:>7} {:>8} {:>4}", "id", "format", "alpha", "spans", "filters", "BW[GHz]", "N");
    for c in ScenarioCase::builtins() {
        println!(
            "{:<14} {:>6} {:>6} {:>6} {:>7} {:>8} {:>4}",
            c.case_id, c.modulation.to_string(), c.roll_off, c.span_count, c.filter_count, c.filter_bandwidth, c.subchannel_count
        );
    }
}

fn simulate(common: &Common, distances: Option<Vec<f64>>) -> Result<(), HarnessError> {
    let cfg = build_config(common)?;
    let mut plan = start_plan(&cfg)?;
    if let Some(d) = distances {
        plan = plan.with_distances(d)?;
    }
    let model = cfg.model()?;
    let report = model.snr(&plan, model.monitor_noise_sigma > 0.0);
    println!("distances [GHz]: {:?}", plan.distances());
    for (n, s) in report.snr.iter().enumerate() {
        println!("subchannel {n}: {s:.4} dB");
    }
    for o in Objective::ALL {
        println!("{o}: {:.4} dB", objective_value(&report, o)?);
    }
    Ok(())
}

fn optimize_cmd(common: &Common, starts: Option<usize>, oracle: bool, force: bool) -> Result<(), HarnessError> {
    let mut cfg = build_config(common)?;
    if let Some(count) = starts {
        cfg.start = StartMode::RandomDrift { range: 2.0, count, seed: cfg.optimizer.rng_seed };
    }
    if oracle || force {
        let mut o = cfg.oracle.clone().unwrap_or_default();
        o.force |= force;
        cfg.oracle = Some(o);
    }
    cfg.validate()?;
    let result = run_experiment(&cfg)?;
    for w in &result.warnings {
        warn!("{w}");
    }
    print!("{}", report(&result.runs));
    let dir = Path::new(&cfg.output.dir);
    let files = write_results(&result, dir, &cfg.output.name)?;
    std::fs::write(dir.join(format!("{}.config.toml", cfg.output.name)), cfg.to_toml())?;
    println!("wrote {} and {}", files.csv.display(), files.json.display());
    Ok(())
}

fn bruteforce_cmd(common: &Common, half_range: f64, grid_step: f64, cap: u64, force: bool) -> Result<(), HarnessError> {
    let cfg = build_config(common)?;
    let center = start_plan(&cfg)?;
    let model = PlmModel { monitor_noise_sigma: 0.0, ..cfg.model()? };
    let options = BruteForceOptions { cap, force, keep_table: common.out.is_some(), ..Default::default() };
    for &objective in &cfg.objectives {
        let spec = GridSearchSpec { center_plan: center.clone(), half_range, grid_step, objective };
        let r = brute_force(&spec, &model, &options)?;
        println!(
            "{objective}: {} points, best {:.4} dB at {:?}, worst {:.4} dB, margin {:.4} dB",
            r.evaluations,
            r.best_value,
            r.best_plan.distances(),
            r.worst_value,
            r.margin()
        );
        if let Some(dir) = &common.out {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("bruteforce_{}.csv", objective.short_name()));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["index", "shifts_ghz", "distances_ghz", "objective_db", "feasible"])?;
            let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
            for p in &r.table {
                w.write_record([
                    p.index.to_string(),
                    join(&p.shifts),
                    join(&p.distances),
                    p.objective.to_string(),
                    p.feasible.to_string(),
                ])?;
            }
            w.flush()?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn sweep_cmd(d_total: f64, step: f64, half_window: f64, spans: u32, out: Option<PathBuf>) -> Result<(), HarnessError> {
    let spec = SweepSpec { d_total, grid_step: step, half_window, ..SweepSpec::reference().with_spans(spans) };
    let r = sweep(&spec)?;
    let text = r.to_csv()?;
    match out {
        Some(p) => {
            std::fs::write(&p, text)?;
            println!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    eprintln!("peak at d1 = {} GHz, max second difference {:.3e} dB/GHz^2", r.peak_d1, r.max_second_difference);
    Ok(())
}

fn report_cmd(input: &Path, out: Option<PathBuf>) -> Result<(), HarnessError> {
    let result = read_results(input)?;
    if result.runs.is_empty() {
        return Err(ConfigError::Field { field: "input".into(), message: "no runs in results file".into() }.into());
    }
    print!("{}", report(&result.runs));
    if let Some(dir) = out {
        let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
        for f in write_plot_data(&result.runs, &dir, stem)? {
            println!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scenarios => {
            print_scenarios();
            Ok(())
        }
        Command::Simulate { common, distances } => simulate(&common, distances),
        Command::Optimize { common, starts, oracle, force } => optimize_cmd(&common, starts, oracle, force),
        Command::Bruteforce { common, half_range, grid_step, cap, force } => {
            bruteforce_cmd(&common, half_range, grid_step, cap, force)
        }
        Command::Sweep { d_total, step, half_window, spans, out } => sweep_cmd(d_total, step, half_window, spans, out),
        Command::Report { input, out } => report_cmd(&input, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
