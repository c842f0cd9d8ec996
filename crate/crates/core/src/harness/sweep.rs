//! Three-carrier spacing sweep: the outer carriers stay put, the middle one
//! moves, and its SNR is recorded against the lower gap `d_1`.

use serde::{Deserialize, Serialize};

use crate::domain::{LinkSpec, SubchannelSpec, SuperchannelPlan, DEFAULT_CENTER_THZ};
use crate::error::{DomainError, HarnessError};
use crate::plm::PlmModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub subchannel: SubchannelSpec,
    /// `d_1 + d_2`, GHz.
    pub d_total: f64,
    pub grid_step: f64,
    /// Sweep covers `d_total / 2 ± half_window`.
    pub half_window: f64,
    pub filter_bandwidth: f64,
    /// Link and model; ripple and noise are usually off.
    pub model: PlmModel,
}

impl SweepSpec {
    /// 32 GBd, α = 0.1, d_total = 69 GHz, ±2 GHz at 0.25 GHz, back-to-back.
    pub fn reference() -> Self {
        SweepSpec {
            subchannel: SubchannelSpec::new(32.0, 0.1, crate::domain::Modulation::Qpsk).expect("valid spec"),
            d_total: 69.0,
            grid_step: 0.25,
            half_window: 2.0,
            filter_bandwidth: 137.5,
            model: PlmModel::ideal(LinkSpec::back_to_back()),
        }
    }

    /// Same sweep over `spans` amplified spans (one filter per span).
    pub fn with_spans(mut self, spans: u32) -> Self {
        self.model.link.span_count = spans;
        self.model.link.filter_count = spans.max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub d1: f64,
    /// Middle carrier SNR, dB.
    pub snr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// Central second differences at the interior points, dB/GHz².
    pub second_differences: Vec<(f64, f64)>,
    /// First `d_1` reaching the maximum SNR.
    pub peak_d1: f64,
    pub max_second_difference: f64,
}

impl SweepResult {
    /// `d_1,snr_db` rows.
    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["d1_ghz", "snr_db"])?;
        for p in &self.points {
            w.write_record([p.d1.to_string(), p.snr.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn sweep(spec: &SweepSpec) -> Result<SweepResult, HarnessError> {
    if !(spec.grid_step > 0.0 && spec.d_total > 2.0 * spec.grid_step) {
        return Err(DomainError::InvalidInput(format!(
            "d_total {} must exceed twice the grid step {}",
            spec.d_total, spec.grid_step
        ))
        .into());
    }
    let k = (spec.half_window / spec.grid_step).round() as i64;
    let mid = spec.d_total / 2.0;
    let edge = (spec.filter_bandwidth - spec.d_total) / 2.0;
    let points = (-k..=k)
        .map(|i| {
            let d1 = mid + i as f64 * spec.grid_step;
            let plan = SuperchannelPlan::new(
                DEFAULT_CENTER_THZ,
                spec.filter_bandwidth,
                vec![edge, d1, spec.d_total - d1, edge],
                vec![spec.subchannel; 3],
            )?;
            Ok(SweepPoint { d1, snr: spec.model.evaluate(&plan).snr[1] })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let h2 = spec.grid_step * spec.grid_step;
    let second_differences: Vec<(f64, f64)> = points
        .windows(3)
        .map(|w| (w[1].d1, (w[2].snr - 2.0 * w[1].snr + w[0].snr) / h2))
        .collect();
    let peak = points.iter().fold(&points[0], |best, p| if p.snr > best.snr { p } else { best });
    let max_second_difference = second_differences.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(SweepResult { peak_d1: peak.d1, points, second_differences, max_second_difference })
}
