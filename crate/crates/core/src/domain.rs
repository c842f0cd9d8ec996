//! Superchannel plans, objectives and the distance/frequency algebra.
//!
//! A plan is stored as its distance vector `D = [d_1, ..., d_{N+1}]`: the gap
//! from the lower filter edge to the first carrier, the N-1 carrier-to-carrier
//! gaps, and the gap from the last carrier to the upper filter edge. The sum of
//! `D` always equals the superfilter bandwidth. Absolute carrier frequencies
//! are derived on demand.
//!
//! Subchannel indices are zero-based throughout the crate. Distance indices
//! are zero-based too, so distance `k` sits between carriers `k - 1` and `k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

/// Tolerance on the bandwidth-sum constraint, in GHz.
pub const SUM_TOLERANCE_GHZ: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modulation {
    #[serde(rename = "QPSK")]
    Qpsk,
    #[serde(rename = "16QAM")]
    Qam16,
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Qpsk => f.write_str("QPSK"),
            Modulation::Qam16 => f.write_str("16QAM"),
        }
    }
}

impl FromStr for Modulation {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "QPSK" => Ok(Modulation::Qpsk),
            "16QAM" | "QAM16" => Ok(Modulation::Qam16),
            _ => Err(DomainError::InvalidInput(format!("unknown modulation `{s}`"))),
        }
    }
}

/// Per-subchannel transmitter parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubchannelSpec {
    /// Symbol rate in GBd.
    pub symbol_rate: f64,
    pub roll_off: f64,
    pub modulation: Modulation,
    /// Launch power in dBm.
    pub launch_power: f64,
}

impl SubchannelSpec {
    pub fn new(symbol_rate: f64, roll_off: f64, modulation: Modulation) -> Result<Self, DomainError> {
        let spec = SubchannelSpec { symbol_rate, roll_off, modulation, launch_power: 0.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if !(self.symbol_rate > 0.0 && self.symbol_rate.is_finite()) {
            return Err(DomainError::InvalidInput(format!(
                "symbol rate must be positive, got {}",
                self.symbol_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.roll_off) {
            return Err(DomainError::InvalidInput(format!(
                "roll-off must lie in [0, 1], got {}",
                self.roll_off
            )));
        }
        if !self.launch_power.is_finite() {
            return Err(DomainError::InvalidInput("launch power must be finite".into()));
        }
        Ok(())
    }

    /// Occupied bandwidth `R_s (1 + α)`, in GHz.
    pub fn occupied_bandwidth(&self) -> f64 {
        self.symbol_rate * (1.0 + self.roll_off)
    }
}

/// Smallest carrier spacing free of linear crosstalk: `R_s (1 + α)`.
pub fn min_distance(spec: &SubchannelSpec) -> f64 {
    spec.occupied_bandwidth()
}

/// Fiber link and filter chain traversed by the superchannel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    /// km
    pub span_length: f64,
    pub span_count: u32,
    pub filter_count: u32,
    /// dB/km
    pub attenuation: f64,
    /// ps/nm/km
    pub dispersion: f64,
    /// dB
    pub edfa_noise_figure: f64,
    /// Super-Gaussian order of each filter.
    pub filter_order: f64,
}

impl Default for LinkSpec {
    fn default() -> Self {
        LinkSpec {
            span_length: 80.0,
            span_count: 2,
            filter_count: 2,
            attenuation: 0.2,
            dispersion: 16.7,
            edfa_noise_figure: 5.5,
            filter_order: 3.5,
        }
    }
}

impl LinkSpec {
    pub fn back_to_back() -> Self {
        LinkSpec { span_count: 0, filter_count: 1, ..LinkSpec::default() }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if self.filter_count < 1 {
            return Err(DomainError::InvalidInput("filter_count must be at least 1".into()));
        }
        if !(self.filter_order > 0.0) {
            return Err(DomainError::InvalidInput("filter_order must be positive".into()));
        }
        if !(self.span_length >= 0.0 && self.attenuation >= 0.0) {
            return Err(DomainError::InvalidInput(
                "span_length and attenuation must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Loss of one span, in dB.
    pub fn span_loss_db(&self) -> f64 {
        self.span_length * self.attenuation
    }
}

/// The optimization variable: carrier placement inside a superfilter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperchannelPlan {
    /// Superfilter center frequency, THz.
    center_frequency: f64,
    /// 3 dB superfilter bandwidth, GHz.
    filter_bandwidth: f64,
    distances: Vec<f64>,
    subchannels: Vec<SubchannelSpec>,
}

impl SuperchannelPlan {
    pub fn new(
        center_frequency: f64,
        filter_bandwidth: f64,
        distances: Vec<f64>,
        subchannels: Vec<SubchannelSpec>,
    ) -> Result<Self, DomainError> {
        if subchannels.len() < 2 {
            return Err(DomainError::InvalidInput(format!(
                "a superchannel needs at least 2 subchannels, got {}",
                subchannels.len()
            )));
        }
        if distances.len() != subchannels.len() + 1 {
            return Err(DomainError::InvalidInput(format!(
                "expected {} distances for {} subchannels, got {}",
                subchannels.len() + 1,
                subchannels.len(),
                distances.len()
            )));
        }
        if !(filter_bandwidth > 0.0 && filter_bandwidth.is_finite()) {
            return Err(DomainError::InvalidInput(format!(
                "filter bandwidth must be positive, got {filter_bandwidth}"
            )));
        }
        for s in &subchannels {
            s.validate()?;
        }
        let violations = check_distances(&distances, filter_bandwidth, &subchannels[0], false);
        if let Some(v) = violations.into_iter().next() {
            return Err(DomainError::Infeasible(v));
        }
        Ok(SuperchannelPlan { center_frequency, filter_bandwidth, distances, subchannels })
    }

    /// Uniform plan with `n` carriers spaced by `spacing`, centered in the filter.
    pub fn equidistant(
        center_frequency: f64,
        filter_bandwidth: f64,
        n: usize,
        spacing: f64,
        spec: SubchannelSpec,
    ) -> Result<Self, DomainError> {
        if n < 2 {
            return Err(DomainError::InvalidInput("need at least 2 subchannels".into()));
        }
        let edge = (filter_bandwidth - spacing * (n - 1) as f64) / 2.0;
        let mut distances = vec![spacing; n + 1];
        distances[0] = edge;
        distances[n] = edge;
        SuperchannelPlan::new(center_frequency, filter_bandwidth, distances, vec![spec; n])
    }

    /// Rebuilds a plan from carrier offsets relative to the filter center (GHz).
    pub fn from_offsets(
        center_frequency: f64,
        filter_bandwidth: f64,
        offsets: &[f64],
        subchannels: Vec<SubchannelSpec>,
    ) -> Result<Self, DomainError> {
        let distances = offsets_to_distances(offsets, filter_bandwidth);
        SuperchannelPlan::new(center_frequency, filter_bandwidth, distances, subchannels)
    }

    pub fn center_frequency(&self) -> f64 {
        self.center_frequency
    }

    pub fn filter_bandwidth(&self) -> f64 {
        self.filter_bandwidth
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn subchannels(&self) -> &[SubchannelSpec] {
        &self.subchannels
    }

    pub fn subchannel_count(&self) -> usize {
        self.subchannels.len()
    }

    /// Carrier offsets from the filter center, GHz.
    pub fn offsets(&self) -> Vec<f64> {
        distances_to_offsets(&self.distances, self.filter_bandwidth)
    }

    /// Absolute carrier frequencies, THz.
    pub fn frequencies(&self) -> Vec<f64> {
        distances_to_frequencies(&self.distances, self.center_frequency, self.filter_bandwidth)
    }

    pub fn check_constraints(&self, enforce_lower_limits: bool) -> Vec<ConstraintViolation> {
        check_distances(&self.distances, self.filter_bandwidth, &self.subchannels[0], enforce_lower_limits)
    }

    /// Moves carrier `n` by `delta` GHz (positive = toward higher frequency).
    pub fn shift_subchannel(&self, n: usize, delta: f64) -> Result<Self, DomainError> {
        shift_subchannel(self, n, delta)
    }

    /// Snaps every carrier onto a grid of `granularity` GHz measured from the
    /// lower filter edge. The last distance absorbs rounding so the sum is kept.
    pub fn quantized(&self, granularity: f64) -> Result<Self, DomainError> {
        if !(granularity > 0.0) {
            return Ok(self.clone());
        }
        let n = self.subchannel_count();
        let mut cumulative = 0.0;
        let mut snapped = Vec::with_capacity(n);
        for d in &self.distances[..n] {
            cumulative += d;
            snapped.push((cumulative / granularity).round() * granularity);
        }
        let mut distances = Vec::with_capacity(n + 1);
        let mut previous = 0.0;
        for &s in &snapped {
            distances.push(s - previous);
            previous = s;
        }
        distances.push(self.filter_bandwidth - previous);
        SuperchannelPlan::new(self.center_frequency, self.filter_bandwidth, distances, self.subchannels.clone())
    }

    /// Same carriers with a different distance vector (validated).
    pub fn with_distances(&self, distances: Vec<f64>) -> Result<Self, DomainError> {
        SuperchannelPlan::new(self.center_frequency, self.filter_bandwidth, distances, self.subchannels.clone())
    }

    /// L2 distance between the carrier positions of two plans of equal size.
    pub fn carrier_distance(&self, other: &SuperchannelPlan) -> f64 {
        self.offsets()
            .iter()
            .zip(other.offsets())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Carrier offsets (GHz, relative to the filter center) from a distance vector.
pub fn distances_to_offsets(distances: &[f64], filter_bandwidth: f64) -> Vec<f64> {
    let n = distances.len().saturating_sub(1);
    let mut position = -filter_bandwidth / 2.0;
    distances[..n]
        .iter()
        .map(|d| {
            position += d;
            position
        })
        .collect()
}

/// Inverse of [`distances_to_offsets`].
pub fn offsets_to_distances(offsets: &[f64], filter_bandwidth: f64) -> Vec<f64> {
    let mut distances = Vec::with_capacity(offsets.len() + 1);
    let mut previous = -filter_bandwidth / 2.0;
    for &o in offsets {
        distances.push(o - previous);
        previous = o;
    }
    distances.push(filter_bandwidth / 2.0 - previous);
    distances
}

/// Absolute carrier frequencies in THz.
pub fn distances_to_frequencies(distances: &[f64], center_thz: f64, filter_bandwidth: f64) -> Vec<f64> {
    distances_to_offsets(distances, filter_bandwidth)
        .into_iter()
        .map(|o| center_thz + o / 1000.0)
        .collect()
}

/// Distance vector (GHz) from absolute carrier frequencies in THz.
pub fn frequencies_to_distances(frequencies: &[f64], center_thz: f64, filter_bandwidth: f64) -> Vec<f64> {
    let offsets: Vec<f64> = frequencies.iter().map(|f| (f - center_thz) * 1000.0).collect();
    offsets_to_distances(&offsets, filter_bandwidth)
}

pub fn shift_subchannel(plan: &SuperchannelPlan, n: usize, delta: f64) -> Result<SuperchannelPlan, DomainError> {
    let count = plan.subchannel_count();
    if n >= count {
        return Err(DomainError::InvalidInput(format!(
            "subchannel index {n} out of range for {count} subchannels"
        )));
    }
    let mut distances = plan.distances.clone();
    distances[n] += delta;
    distances[n + 1] -= delta;
    for k in [n, n + 1] {
        if distances[k] <= 0.0 {
            return Err(DomainError::Infeasible(ConstraintViolation::NonPositive {
                index: k,
                value: distances[k],
            }));
        }
    }
    Ok(SuperchannelPlan { distances, ..plan.clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintViolation {
    NonPositive { index: usize, value: f64 },
    BelowLowerLimit { index: usize, value: f64, limit: f64 },
    SumMismatch { sum: f64, bandwidth: f64 },
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintViolation::NonPositive { index, value } => {
                write!(f, "distance {index} is not positive ({value} GHz)")
            }
            ConstraintViolation::BelowLowerLimit { index, value, limit } => {
                write!(f, "distance {index} = {value} GHz is below its lower limit {limit} GHz")
            }
            ConstraintViolation::SumMismatch { sum, bandwidth } => {
                write!(f, "distances sum to {sum} GHz but the filter bandwidth is {bandwidth} GHz")
            }
        }
    }
}

/// Lower limit of distance `index` out of `len`: `R_s/4` at the filter edges,
/// `R_s/2` between carriers.
pub fn lower_limit(index: usize, len: usize, spec: &SubchannelSpec) -> f64 {
    if index == 0 || index + 1 == len {
        spec.symbol_rate / 4.0
    } else {
        spec.symbol_rate / 2.0
    }
}

/// Diagnostic constraint check on a raw distance vector.
pub fn check_distances(
    distances: &[f64],
    filter_bandwidth: f64,
    spec: &SubchannelSpec,
    enforce_lower_limits: bool,
) -> Vec<ConstraintViolation> {
    let mut out = Vec::new();
    let sum: f64 = distances.iter().sum();
    if !((sum - filter_bandwidth).abs() <= SUM_TOLERANCE_GHZ) {
        out.push(ConstraintViolation::SumMismatch { sum, bandwidth: filter_bandwidth });
    }
    for (index, &value) in distances.iter().enumerate() {
        if !(value > 0.0) {
            out.push(ConstraintViolation::NonPositive { index, value });
        } else if enforce_lower_limits {
            let limit = lower_limit(index, distances.len(), spec);
            if value < limit {
                out.push(ConstraintViolation::BelowLowerLimit { index, value, limit });
            }
        }
    }
    out
}

/// Per-subchannel SNR in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub snr: Vec<f64>,
    pub noise_applied: bool,
}

impl SnrReport {
    pub fn new(snr: Vec<f64>, noise_applied: bool) -> Result<Self, DomainError> {
        if let Some(bad) = snr.iter().find(|v| !v.is_finite()) {
            return Err(DomainError::InvalidInput(format!("non-finite SNR value {bad}")));
        }
        Ok(SnrReport { snr, noise_applied })
    }

    pub fn len(&self) -> usize {
        self.snr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snr.is_empty()
    }

    /// Max minus min subchannel SNR.
    pub fn spread(&self) -> f64 {
        let max = self.snr.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.snr.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Mean of the subchannel SNRs, taken in dB.
    AverageSnr,
    /// Worst subchannel SNR.
    MinSnr,
}

impl Objective {
    pub const ALL: [Objective; 2] = [Objective::AverageSnr, Objective::MinSnr];

    pub fn short_name(&self) -> &'static str {
        match self {
            Objective::AverageSnr => "average",
            Objective::MinSnr => "min",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Objective {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "average" | "avg" | "average_snr" | "obj1" => Ok(Objective::AverageSnr),
            "min" | "minimum" | "min_snr" | "obj2" => Ok(Objective::MinSnr),
            _ => Err(DomainError::InvalidInput(format!(
                "unknown objective `{s}` (expected `average` or `min`)"
            ))),
        }
    }
}

pub fn objective_value(report: &SnrReport, objective: Objective) -> Result<f64, DomainError> {
    objective_of(&report.snr, objective)
}

pub(crate) fn objective_of(snr: &[f64], objective: Objective) -> Result<f64, DomainError> {
    if snr.is_empty() {
        return Err(DomainError::InvalidInput("empty SNR report".into()));
    }
    Ok(match objective {
        Objective::AverageSnr => snr.iter().sum::<f64>() / snr.len() as f64,
        Objective::MinSnr => snr.iter().cloned().fold(f64::INFINITY, f64::min),
    })
}

/// One row of the built-in scenario catalogue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCase {
    pub case_id: String,
    pub modulation: Modulation,
    /// GBd
    pub symbol_rate: f64,
    pub roll_off: f64,
    pub span_count: u32,
    pub filter_count: u32,
    /// GHz
    pub filter_bandwidth: f64,
    pub subchannel_count: usize,
    pub starting_distances: Vec<f64>,
}

/// Carrier spacing of the equidistant starting plans, GHz.
pub const DEFAULT_SPACING_GHZ: f64 = 34.5;
/// Superfilter center frequency, THz.
pub const DEFAULT_CENTER_THZ: f64 = 193.1;

impl ScenarioCase {
    #[allow(clippy::too_many_arguments)]
    fn table(
        case_id: &str,
        modulation: Modulation,
        roll_off: f64,
        span_count: u32,
        filter_count: u32,
        filter_bandwidth: f64,
        subchannel_count: usize,
    ) -> Self {
        let edge = (filter_bandwidth - DEFAULT_SPACING_GHZ * (subchannel_count - 1) as f64) / 2.0;
        let mut starting_distances = vec![DEFAULT_SPACING_GHZ; subchannel_count + 1];
        starting_distances[0] = edge;
        starting_distances[subchannel_count] = edge;
        ScenarioCase {
            case_id: case_id.to_string(),
            modulation,
            symbol_rate: 32.0,
            roll_off,
            span_count,
            filter_count,
            filter_bandwidth,
            subchannel_count,
            starting_distances,
        }
    }

    /// The nine four-subchannel cases followed by the N = 6, 8, 10 scaling cases.
    pub fn builtins() -> Vec<ScenarioCase> {
        use Modulation::*;
        vec![
            Self::table("table1-case1", Qpsk, 0.1, 2, 2, 137.5, 4),
            Self::table("table1-case2", Qam16, 0.1, 2, 2, 137.5, 4),
            Self::table("table1-case3", Qpsk, 0.1, 2, 2, 150.0, 4),
            Self::table("table1-case4", Qpsk, 0.15, 2, 2, 137.5, 4),
            Self::table("table1-case5", Qpsk, 0.1, 10, 5, 137.5, 4),
            Self::table("table1-case6", Qpsk, 0.1, 0, 1, 137.5, 4),
            Self::table("table1-case7", Qpsk, 0.1, 0, 1, 200.0, 4),
            Self::table("table1-case8", Qpsk, 0.15, 0, 1, 137.5, 4),
            Self::table("table1-case9", Qpsk, 0.15, 0, 1, 200.0, 4),
            Self::table("scaling-n6", Qpsk, 0.1, 2, 2, 200.0, 6),
            Self::table("scaling-n8", Qpsk, 0.1, 2, 2, 275.0, 8),
            Self::table("scaling-n10", Qpsk, 0.1, 2, 2, 340.0, 10),
        ]
    }

    pub fn builtin(alias: &str) -> Option<ScenarioCase> {
        let alias = alias.to_ascii_lowercase();
        let alias = match alias.as_str() {
            "default" | "case1" => "table1-case1".to_string(),
            a if a.starts_with("case") => format!("table1-{a}"),
            _ => alias,
        };
        Self::builtins().into_iter().find(|c| c.case_id == alias)
    }

    pub fn is_back_to_back(&self) -> bool {
        self.span_count == 0
    }

    pub fn subchannel_spec(&self) -> SubchannelSpec {
        SubchannelSpec {
            symbol_rate: self.symbol_rate,
            roll_off: self.roll_off,
            modulation: self.modulation,
            launch_power: 0.0,
        }
    }

    pub fn link(&self) -> LinkSpec {
        LinkSpec { span_count: self.span_count, filter_count: self.filter_count, ..LinkSpec::default() }
    }

    pub fn starting_plan(&self) -> Result<SuperchannelPlan, DomainError> {
        SuperchannelPlan::new(
            DEFAULT_CENTER_THZ,
            self.filter_bandwidth,
            self.starting_distances.clone(),
            vec![self.subchannel_spec(); self.subchannel_count],
        )
    }

    /// Equidistant plan for this case (carriers 34.5 GHz apart, centered).
    pub fn equidistant_plan(&self) -> Result<SuperchannelPlan, DomainError> {
        SuperchannelPlan::equidistant(
            DEFAULT_CENTER_THZ,
            self.filter_bandwidth,
            self.subchannel_count,
            DEFAULT_SPACING_GHZ,
            self.subchannel_spec(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec32() -> SubchannelSpec {
        SubchannelSpec::new(32.0, 0.1, Modulation::Qpsk).unwrap()
    }

    fn default_plan() -> SuperchannelPlan {
        ScenarioCase::builtin("table1-case1").unwrap().starting_plan().unwrap()
    }

    #[test]
    fn objective_values_from_reported_vector() {
        let r = SnrReport::new(vec![13.55, 16.86, 16.91, 13.15], false).unwrap();
        assert_abs_diff_eq!(objective_value(&r, Objective::AverageSnr).unwrap(), 15.1175, epsilon = 1e-12);
        // reported as 15.12 dB
        assert!((objective_value(&r, Objective::AverageSnr).unwrap() - 15.12).abs() < 0.005);
        assert_eq!(objective_value(&r, Objective::MinSnr).unwrap(), 13.15);
    }

    #[test]
    fn objective_of_constant_vector() {
        let r = SnrReport::new(vec![14.2; 4], false).unwrap();
        for o in Objective::ALL {
            assert_abs_diff_eq!(objective_value(&r, o).unwrap(), 14.2, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_report_is_invalid() {
        let r = SnrReport { snr: vec![], noise_applied: false };
        assert!(matches!(objective_value(&r, Objective::MinSnr), Err(DomainError::InvalidInput(_))));
    }

    #[test]
    fn min_distance_examples() {
        assert_abs_diff_eq!(min_distance(&spec32()), 35.2, epsilon = 1e-12);
        assert_abs_diff_eq!(
            min_distance(&SubchannelSpec::new(32.0, 0.0, Modulation::Qpsk).unwrap()),
            32.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            min_distance(&SubchannelSpec::new(28.0, 0.15, Modulation::Qpsk).unwrap()),
            32.2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(SubchannelSpec::new(0.0, 0.1, Modulation::Qpsk).is_err());
        assert!(SubchannelSpec::new(32.0, 1.5, Modulation::Qpsk).is_err());
        assert!(SubchannelSpec::new(32.0, -0.1, Modulation::Qpsk).is_err());
    }

    #[test]
    fn shift_second_subchannel() {
        let plan = default_plan();
        let shifted = plan.shift_subchannel(1, 0.25).unwrap();
        assert_eq!(shifted.distances(), &[17.0, 34.75, 34.25, 34.5, 17.0]);
        assert_abs_diff_eq!(shifted.distances().iter().sum::<f64>(), 137.5, epsilon = 1e-12);
        let offsets_before = plan.offsets();
        let offsets_after = shifted.offsets();
        for k in [0, 2, 3] {
            assert_abs_diff_eq!(offsets_before[k], offsets_after[k], epsilon = 1e-12);
        }
        assert_abs_diff_eq!(offsets_after[1] - offsets_before[1], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn zero_shift_is_identity() {
        let plan = default_plan();
        for n in 0..4 {
            assert_eq!(plan.shift_subchannel(n, 0.0).unwrap(), plan);
        }
    }

    #[test]
    fn infeasible_shift_is_reported() {
        let plan = default_plan();
        let err = plan.shift_subchannel(0, -17.0).unwrap_err();
        assert!(matches!(err, DomainError::Infeasible(ConstraintViolation::NonPositive { index: 0, .. })));
        assert!(plan.shift_subchannel(4, 1.0).is_err());
    }

    #[test]
    fn constraint_examples() {
        let plan = default_plan();
        assert!(plan.check_constraints(true).is_empty());

        let d = vec![17.0, 34.5, 10.0, 59.0, 17.0];
        let v = check_distances(&d, 137.5, &spec32(), true);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], ConstraintViolation::BelowLowerLimit { index: 2, .. }));
        assert!(check_distances(&d, 137.5, &spec32(), false).is_empty());

        let short = vec![17.0, 34.5, 34.5, 34.5, 16.0];
        for enforce in [false, true] {
            let v = check_distances(&short, 137.5, &spec32(), enforce);
            assert!(v.iter().any(|x| matches!(x, ConstraintViolation::SumMismatch { .. })));
        }
    }

    #[test]
    fn plan_construction_rejects_bad_input() {
        let s = spec32();
        assert!(SuperchannelPlan::new(193.1, 137.5, vec![17.0, 34.5, 34.5, 34.5, 16.0], vec![s; 4]).is_err());
        assert!(SuperchannelPlan::new(193.1, 137.5, vec![0.0, 51.5, 34.5, 34.5, 17.0], vec![s; 4]).is_err());
        assert!(SuperchannelPlan::new(193.1, 137.5, vec![68.75, 68.75], vec![s; 1]).is_err());
        assert!(SuperchannelPlan::new(193.1, 137.5, vec![17.0, 34.5, 34.5, 51.5], vec![s; 4]).is_err());
    }

    #[test]
    fn frequencies_of_default_plan() {
        let f = default_plan().frequencies();
        let expected = [193.04825, 193.08275, 193.11725, 193.15175];
        for (a, b) in f.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn quantize_snaps_to_grid_and_keeps_sum() {
        let plan = default_plan().with_distances(vec![17.1, 34.3, 34.6, 34.5, 17.0]).unwrap();
        let q = plan.quantized(0.25).unwrap();
        assert_eq!(q.distances(), &[17.0, 34.5, 34.5, 34.5, 17.0]);
        assert_abs_diff_eq!(q.distances().iter().sum::<f64>(), 137.5, epsilon = 1e-12);
    }

    #[test]
    fn table1_catalogue() {
        // (id, modulation, roll-off, spans, filters, bandwidth)
        let rows = [
            ("table1-case1", Modulation::Qpsk, 0.1, 2, 2, 137.5),
            ("table1-case2", Modulation::Qam16, 0.1, 2, 2, 137.5),
            ("table1-case3", Modulation::Qpsk, 0.1, 2, 2, 150.0),
            ("table1-case4", Modulation::Qpsk, 0.15, 2, 2, 137.5),
            ("table1-case5", Modulation::Qpsk, 0.1, 10, 5, 137.5),
            ("table1-case6", Modulation::Qpsk, 0.1, 0, 1, 137.5),
            ("table1-case7", Modulation::Qpsk, 0.1, 0, 1, 200.0),
            ("table1-case8", Modulation::Qpsk, 0.15, 0, 1, 137.5),
            ("table1-case9", Modulation::Qpsk, 0.15, 0, 1, 200.0),
        ];
        for (id, m, a, spans, filters, bw) in rows {
            let c = ScenarioCase::builtin(id).unwrap();
            assert_eq!(c.case_id, id);
            assert_eq!(c.modulation, m);
            assert_eq!(c.roll_off, a);
            assert_eq!(c.span_count, spans);
            assert_eq!(c.filter_count, filters);
            assert_eq!(c.filter_bandwidth, bw);
            assert_eq!(c.subchannel_count, 4);
            assert_eq!(c.symbol_rate, 32.0);
            let inner = &c.starting_distances[1..4];
            assert!(inner.iter().all(|&d| d == 34.5));
            assert_abs_diff_eq!(c.starting_distances.iter().sum::<f64>(), bw, epsilon = 1e-12);
        }
        let def = ScenarioCase::builtin("table1-case1").unwrap();
        assert_eq!(def.starting_distances, vec![17.0, 34.5, 34.5, 34.5, 17.0]);
        assert_eq!(ScenarioCase::builtin("case5").unwrap().span_count, 10);
    }

    #[test]
    fn scaling_catalogue() {
        for (id, n, bw) in [("scaling-n6", 6, 200.0), ("scaling-n8", 8, 275.0), ("scaling-n10", 10, 340.0)] {
            let c = ScenarioCase::builtin(id).unwrap();
            assert_eq!(c.subchannel_count, n);
            assert_eq!(c.filter_bandwidth, bw);
            assert!(c.starting_plan().is_ok());
        }
    }

    #[test]
    fn objective_parsing() {
        assert_eq!("obj1".parse::<Objective>().unwrap(), Objective::AverageSnr);
        assert_eq!("MIN".parse::<Objective>().unwrap(), Objective::MinSnr);
        assert!("median".parse::<Objective>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_plan() -> impl Strategy<Value = SuperchannelPlan> {
            prop::collection::vec(-3.0f64..3.0, 4).prop_map(|offs| {
                let base = default_plan().offsets();
                let o: Vec<f64> = base.iter().zip(offs).map(|(b, x)| b + x).collect();
                SuperchannelPlan::from_offsets(193.1, 137.5, &o, vec![spec32(); 4]).unwrap()
            })
        }

        proptest! {
            #[test]
            fn frequency_round_trip(plan in random_plan()) {
                let f = plan.frequencies();
                let d = frequencies_to_distances(&f, plan.center_frequency(), plan.filter_bandwidth());
                for (a, b) in d.iter().zip(plan.distances()) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }

            #[test]
            fn shift_inverse(plan in random_plan(), n in 0usize..4, delta in -5.0f64..5.0) {
                if let Ok(shifted) = plan.shift_subchannel(n, delta) {
                    let back = shifted.shift_subchannel(n, -delta).unwrap();
                    for (a, b) in back.distances().iter().zip(plan.distances()) {
                        prop_assert!((a - b).abs() < 1e-9);
                    }
                    let sum: f64 = shifted.distances().iter().sum();
                    prop_assert!((sum - 137.5).abs() < 1e-9);
                }
            }

            #[test]
            fn min_never_exceeds_average(v in prop::collection::vec(-10.0f64..40.0, 1..12)) {
                let r = SnrReport::new(v, false).unwrap();
                let avg = objective_value(&r, Objective::AverageSnr).unwrap();
                let min = objective_value(&r, Objective::MinSnr).unwrap();
                prop_assert!(min <= avg + 1e-12);
            }
        }
    }
}
