//! TOML experiment configuration.
//!
//! ```toml
//! scenario = "table1-case1"          # built-in alias, or an inline [scenario] table
//! objectives = ["average_snr", "min_snr"]
//! f_steps = [0.25, 0.5]              # optional, defaults to [optimizer.f_step]
//!
//! [optimizer]
//! minibatch_size = 2
//!
//! [model]
//! monitor_noise_sigma = 0.0
//!
//! [start]
//! mode = "random_drift"              # or "equidistant", or "explicit" with distances = [...]
//! range = 2.0
//! count = 10
//! seed = 0
//!
//! [oracle]
//! half_range = 2.0
//! grid_step = 0.25
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control_loop::{OptimizerConfig, TimingModel};
use crate::domain::{Objective, ScenarioCase, SuperchannelPlan};
use crate::error::ConfigError;
use crate::oracle::DEFAULT_CAP;
use crate::plm::PlmModel;

/// A catalogue alias or a full inline scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSource {
    Alias(String),
    Inline(ScenarioCase),
}

impl ScenarioSource {
    pub fn resolve(&self) -> Result<ScenarioCase, ConfigError> {
        match self {
            ScenarioSource::Alias(a) => ScenarioCase::builtin(a)
                .ok_or_else(|| ConfigError::field("scenario", format!("unknown built-in scenario `{a}`"))),
            ScenarioSource::Inline(c) => Ok(c.clone()),
        }
    }
}

/// Overrides on top of [`PlmModel::for_scenario`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ase_floor_snr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xpm_coefficient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ripple_amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ripple_period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ripple_phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub broadening_sigma_per_span: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monitor_noise_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
}

impl ModelOverrides {
    pub fn apply(&self, mut model: PlmModel) -> PlmModel {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut model.ase_floor_snr, self.ase_floor_snr);
        set(&mut model.xpm_coefficient, self.xpm_coefficient);
        set(&mut model.ripple_amplitude, self.ripple_amplitude);
        set(&mut model.ripple_period, self.ripple_period);
        set(&mut model.ripple_phase, self.ripple_phase);
        set(&mut model.broadening_sigma_per_span, self.broadening_sigma_per_span);
        set(&mut model.monitor_noise_sigma, self.monitor_noise_sigma);
        if let Some(s) = self.rng_seed {
            model.rng_seed = s;
        }
        model
    }
}

fn default_drift_range() -> f64 {
    2.0
}
fn default_drift_count() -> usize {
    10
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum StartMode {
    /// Carriers 34.5 GHz apart, centered in the filter.
    #[default]
    Equidistant,
    /// Explicit distance vector (N + 1 entries).
    Explicit { distances: Vec<f64> },
    /// `count` starts, each carrier drifted uniformly on the laser grid within
    /// `±range` GHz of the equidistant plan.
    RandomDrift {
        #[serde(default = "default_drift_range")]
        range: f64,
        #[serde(default = "default_drift_count")]
        count: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_half_range() -> f64 {
    2.0
}
fn default_grid_step() -> f64 {
    0.25
}
fn default_cap() -> u64 {
    DEFAULT_CAP
}

/// Brute-force grid around each optimized plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_half_range")]
    pub half_range: f64,
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    #[serde(default = "default_cap")]
    pub cap: u64,
    #[serde(default)]
    pub force: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { half_range: 2.0, grid_step: 0.25, cap: DEFAULT_CAP, force: false }
    }
}

fn default_out_dir() -> String {
    "results".into()
}
fn default_out_name() -> String {
    "run".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    /// File stem of the CSV and JSON artifacts.
    #[serde(default = "default_out_name")]
    pub name: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out_dir(), name: default_out_name() }
    }
}

fn default_objectives() -> Vec<Objective> {
    Objective::ALL.to_vec()
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSource,
    #[serde(default = "default_objectives")]
    pub objectives: Vec<Objective>,
    /// Step sizes to run; empty means `[optimizer.f_step]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub f_steps: Vec<f64>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub model: ModelOverrides,
    #[serde(default)]
    pub start: StartMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    #[serde(default)]
    pub timing: TimingModel,
    #[serde(default)]
    pub output: OutputConfig,
    /// Run starts on the worker pool.
    #[serde(default = "default_true")]
    pub parallel: bool,
}

impl ExperimentConfig {
    /// Minimal config for a catalogue scenario with every default.
    pub fn for_scenario(alias: &str) -> Self {
        ExperimentConfig {
            scenario: ScenarioSource::Alias(alias.into()),
            objectives: default_objectives(),
            f_steps: Vec::new(),
            optimizer: OptimizerConfig::default(),
            model: ModelOverrides::default(),
            start: StartMode::default(),
            oracle: None,
            timing: TimingModel::default(),
            output: OutputConfig::default(),
            parallel: true,
        }
    }

    pub fn scenario_case(&self) -> Result<ScenarioCase, ConfigError> {
        self.scenario.resolve()
    }

    pub fn model(&self) -> Result<PlmModel, ConfigError> {
        let case = self.scenario_case()?;
        Ok(self.model.apply(PlmModel::for_scenario(&case)))
    }

    pub fn steps(&self) -> Vec<f64> {
        if self.f_steps.is_empty() {
            vec![self.optimizer.f_step]
        } else {
            self.f_steps.clone()
        }
    }

    /// Semantic checks; errors name the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let case = self.scenario_case()?;
        let n = case.subchannel_count;
        case.starting_plan().map_err(|e| ConfigError::field("scenario", e.to_string()))?;
        if self.objectives.is_empty() {
            return Err(ConfigError::field("objectives", "at least one objective is required"));
        }
        self.optimizer.validate(n).map_err(|e| ConfigError::field("optimizer", e.to_string()))?;
        for (i, s) in self.steps().iter().enumerate() {
            let cfg = OptimizerConfig { f_step: *s, ..self.optimizer.clone() };
            cfg.validate(n).map_err(|e| ConfigError::field(format!("f_steps[{i}]"), e.to_string()))?;
        }
        self.model()?.validate().map_err(|e| ConfigError::field("model", e))?;
        match &self.start {
            StartMode::Equidistant => {
                case.equidistant_plan().map_err(|e| ConfigError::field("start", e.to_string()))?;
            }
            StartMode::Explicit { distances } => {
                let base = case.starting_plan().expect("checked above");
                let plan = SuperchannelPlan::new(
                    base.center_frequency(),
                    base.filter_bandwidth(),
                    distances.clone(),
                    base.subchannels().to_vec(),
                )
                .map_err(|e| ConfigError::field("start.distances", e.to_string()))?;
                if let Some(v) = plan.check_constraints(self.optimizer.enforce_lower_limits).into_iter().next() {
                    return Err(ConfigError::field("start.distances", v.to_string()));
                }
            }
            StartMode::RandomDrift { range, count, .. } => {
                if !(*range >= 0.0 && range.is_finite()) {
                    return Err(ConfigError::field("start.range", format!("must be non-negative, got {range}")));
                }
                if *count == 0 {
                    return Err(ConfigError::field("start.count", "must be at least 1"));
                }
            }
        }
        if let Some(o) = &self.oracle {
            if !(o.half_range >= 0.0 && o.half_range.is_finite()) {
                return Err(ConfigError::field("oracle.half_range", format!("must be non-negative, got {}", o.half_range)));
            }
            if !(o.grid_step > 0.0 && o.grid_step.is_finite()) {
                return Err(ConfigError::field("oracle.grid_step", format!("must be positive, got {}", o.grid_step)));
            }
            let k = o.half_range / o.grid_step;
            if (k - k.round()).abs() > 1e-9 {
                return Err(ConfigError::field("oracle.half_range", "must be a multiple of grid_step"));
            }
        }
        if !(self.timing.t_mon >= 0.0 && self.timing.t_calc >= 0.0) {
            return Err(ConfigError::field("timing", "t_mon and t_calc must be non-negative"));
        }
        if self.output.name.is_empty() {
            return Err(ConfigError::field("output.name", "must not be empty"));
        }
        Ok(())
    }

    /// Resolved config as TOML, every default written out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates a configuration text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Parse { line, column, message: e.message().to_string() }
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Modulation;

    #[test]
    fn aliases_resolve_to_catalogue_rows() {
        let c = parse_config("scenario = \"table1-case1\"").unwrap().scenario_case().unwrap();
        assert_eq!(
            (c.modulation, c.roll_off, c.span_count, c.filter_count, c.filter_bandwidth),
            (Modulation::Qpsk, 0.1, 2, 2, 137.5)
        );
        let c = parse_config("scenario = \"table1-case5\"").unwrap().scenario_case().unwrap();
        assert_eq!((c.span_count, c.filter_count, c.filter_bandwidth), (10, 5, 137.5));
    }

    #[test]
    fn defaults_are_filled_in() {
        let c = parse_config("scenario = \"table1-case1\"").unwrap();
        assert_eq!(c.objectives, Objective::ALL.to_vec());
        assert_eq!(c.optimizer, OptimizerConfig::default());
        assert_eq!(c.start, StartMode::Equidistant);
        assert_eq!(c.steps(), vec![0.25]);
        assert!(c.oracle.is_none());
        let drift = parse_config("scenario = \"case1\"\n[start]\nmode = \"random_drift\"").unwrap();
        assert_eq!(drift.start, StartMode::RandomDrift { range: 2.0, count: 10, seed: 0 });
    }

    #[test]
    fn round_trip() {
        let text = r#"
scenario = "table1-case4"
objectives = ["min_snr"]
f_steps = [0.25, 0.5]
[optimizer]
minibatch_size = 3
dead_band = 0.02
[model]
monitor_noise_sigma = 0.05
rng_seed = 9
[start]
mode = "explicit"
distances = [17.0, 35.0, 34.0, 34.5, 17.0]
[oracle]
half_range = 1.0
grid_step = 0.5
"#;
        let a = parse_config(text).unwrap();
        let b = parse_config(&a.to_toml()).unwrap();
        assert_eq!(a, b);

        let mut inline = ExperimentConfig::for_scenario("x");
        inline.scenario = ScenarioSource::Inline(ScenarioCase::builtin("scaling-n6").unwrap());
        inline.start = StartMode::RandomDrift { range: 1.0, count: 3, seed: 4 };
        let back = parse_config(&inline.to_toml()).unwrap();
        assert_eq!(back, inline);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_config("scenario = \"table1-case1\"\n[optimizer]\nf_step = \"wide\"\n").unwrap_err();
        match err {
            ConfigError::Parse { line, column, .. } => assert_eq!((line, column), (3, 10)),
            e => panic!("{e}"),
        }
        let err = parse_config("scenario = \"table1-case1\"\nbogus = 1\n").unwrap_err();
        match err {
            ConfigError::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("bogus"), "{message}");
            }
            e => panic!("{e}"),
        }
        let err = parse_config("scenario = \"case1\"\n[optimizer]\nstep = 0.5\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let field = |text: &str| match parse_config(text).unwrap_err() {
            ConfigError::Field { field, .. } => field,
            e => panic!("{e}"),
        };
        assert_eq!(field("scenario = \"table9-case1\""), "scenario");
        assert_eq!(field("scenario = \"case1\"\nobjectives = []"), "objectives");
        assert_eq!(field("scenario = \"case1\"\n[optimizer]\nminibatch_size = 7"), "optimizer");
        assert_eq!(field("scenario = \"case1\"\nf_steps = [0.25, 0.3]"), "f_steps[1]");
        assert_eq!(field("scenario = \"case1\"\n[start]\nmode = \"explicit\"\ndistances = [1.0, 2.0]"), "start.distances");
        assert_eq!(field("scenario = \"case1\"\n[start]\nmode = \"random_drift\"\ncount = 0"), "start.count");
        assert_eq!(field("scenario = \"case1\"\n[oracle]\nhalf_range = 1.1\ngrid_step = 0.5"), "oracle.half_range");
        assert_eq!(field("scenario = \"case1\"\n[model]\nripple_period = -1.0"), "model");
    }

    #[test]
    fn missing_file_is_an_io_error() {
        assert!(matches!(load_config(Path::new("/nonexistent/x.toml")), Err(ConfigError::Io { .. })));
    }

    #[test]
    fn overrides_apply() {
        let c = parse_config("scenario = \"case1\"\n[model]\nmonitor_noise_sigma = 0.0\nripple_amplitude = 0.1").unwrap();
        let m = c.model().unwrap();
        assert_eq!(m.monitor_noise_sigma, 0.0);
        assert_eq!(m.ripple_amplitude, 0.1);
        assert_eq!(m.ase_floor_snr, PlmModel::default().ase_floor_snr);
    }
}
