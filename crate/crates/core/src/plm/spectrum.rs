//! Subchannel power spectral density and superfilter transfer function.

use std::f64::consts::{LN_2, PI};

use crate::domain::SubchannelSpec;
use crate::plm::quadrature;

/// Power spectral density of a root-raised-cosine pulsed carrier at `offset`
/// GHz from its center, normalized to unit total power (units 1/GHz).
///
/// This is the squared RRC magnitude, i.e. the raised-cosine shape: flat up
/// to `(1-α)R_s/2`, cosine roll-off down to zero at `(1+α)R_s/2`.
pub fn rrc_psd(offset: f64, spec: &SubchannelSpec) -> f64 {
    let rs = spec.symbol_rate;
    let alpha = spec.roll_off;
    let x = offset.abs();
    let inner = (1.0 - alpha) * rs / 2.0;
    let outer = (1.0 + alpha) * rs / 2.0;
    if x <= inner {
        1.0 / rs
    } else if x >= outer {
        0.0
    } else {
        0.5 / rs * (1.0 + (PI / (alpha * rs) * (x - inner)).cos())
    }
}

/// Offsets (relative to the carrier) where the PSD changes its analytic form.
pub fn psd_breakpoints(spec: &SubchannelSpec) -> [f64; 4] {
    let inner = (1.0 - spec.roll_off) * spec.symbol_rate / 2.0;
    let outer = (1.0 + spec.roll_off) * spec.symbol_rate / 2.0;
    [-outer, -inner, inner, outer]
}

/// Half of the occupied bandwidth.
pub fn psd_half_support(spec: &SubchannelSpec) -> f64 {
    spec.occupied_bandwidth() / 2.0
}

/// Power gain of `cascades` identical super-Gaussian filters.
///
/// Single pass: `exp(-ln2 * |2 offset / bandwidth|^(2 order))`.
pub fn filter_gain(offset: f64, bandwidth: f64, order: f64, cascades: u32) -> f64 {
    let r = (2.0 * offset / bandwidth).abs();
    (-(cascades as f64) * LN_2 * r.powf(2.0 * order)).exp()
}

/// PSD smoothed by a Gaussian of standard deviation `sigma` GHz.
///
/// Falls back to [`rrc_psd`] when `sigma` is zero.
pub fn broadened_psd(offset: f64, spec: &SubchannelSpec, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return rrc_psd(offset, spec);
    }
    let reach = BROADENING_REACH * sigma;
    let bps = psd_breakpoints(spec).map(|b| offset - b);
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    quadrature::integrate(
        |u| rrc_psd(offset - u, spec) * norm * (-0.5 * (u / sigma).powi(2)).exp(),
        -reach,
        reach,
        &bps,
    )
}

/// Gaussian tails beyond this many sigmas are dropped.
pub const BROADENING_REACH: f64 = 6.0;
