//! Surrogate physical-layer model.
//!
//! Per subchannel `n`, in linear units:
//!
//! ```text
//! 1/SNR_n = 1/SNR_ase + sum_{m != n} xt(m, n) + xpm_n
//! ```
//!
//! then, in dB, the filter-cascade energy loss at the carrier position, the
//! gain-ripple offset and the modulation implementation penalty are applied.
//! Monitoring noise is added on top by [`NoiseStream`].

use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::domain::{LinkSpec, Modulation, ScenarioCase, SnrReport, SubchannelSpec, SuperchannelPlan};
use crate::plm::quadrature::integrate;
use crate::plm::spectrum::{
    broadened_psd, filter_gain, psd_breakpoints, psd_half_support, rrc_psd, BROADENING_REACH,
};

const PLANCK: f64 = 6.626_070_15e-34;

/// Fixed dB penalty per modulation format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImplementationPenalty {
    pub qpsk: f64,
    pub qam16: f64,
}

impl Default for ImplementationPenalty {
    fn default() -> Self {
        ImplementationPenalty { qpsk: 0.0, qam16: 0.5 }
    }
}

impl ImplementationPenalty {
    pub fn for_modulation(&self, m: Modulation) -> f64 {
        match m {
            Modulation::Qpsk => self.qpsk,
            Modulation::Qam16 => self.qam16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlmModel {
    pub link: LinkSpec,
    /// Back-to-back transceiver SNR (dB) with no crosstalk, filtering or XPM.
    /// Amplified-span ASE accumulates on top of this floor.
    pub ase_floor_snr: f64,
    /// XPM weight per span, GHz. Zero XPM without fiber spans.
    pub xpm_coefficient: f64,
    /// Peak gain-ripple offset, dB.
    pub ripple_amplitude: f64,
    /// GHz
    pub ripple_period: f64,
    /// rad
    pub ripple_phase: f64,
    /// Gaussian spectral broadening per span, GHz.
    pub broadening_sigma_per_span: f64,
    /// Standard deviation of the monitoring error, dB.
    pub monitor_noise_sigma: f64,
    pub rng_seed: u64,
    pub implementation_penalty: ImplementationPenalty,
}

impl Default for PlmModel {
    fn default() -> Self {
        PlmModel {
            link: LinkSpec::default(),
            ase_floor_snr: 17.2,
            xpm_coefficient: 5e-4,
            ripple_amplitude: 0.3,
            ripple_period: 90.0,
            ripple_phase: FRAC_PI_2,
            broadening_sigma_per_span: 0.0,
            monitor_noise_sigma: 0.05,
            rng_seed: 0,
            implementation_penalty: ImplementationPenalty::default(),
        }
    }
}

impl PlmModel {
    /// Default model for a catalogue scenario. Back-to-back cases have no
    /// amplifier chain and therefore no gain ripple.
    pub fn for_scenario(case: &ScenarioCase) -> Self {
        let mut model = PlmModel { link: case.link(), ..PlmModel::default() };
        if case.is_back_to_back() {
            model.ripple_amplitude = 0.0;
        }
        model
    }

    /// Same model with noise and ripple switched off.
    pub fn ideal(link: LinkSpec) -> Self {
        PlmModel { link, ripple_amplitude: 0.0, monitor_noise_sigma: 0.0, ..PlmModel::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        self.link.validate().map_err(|e| e.to_string())?;
        let checks = [
            ("ase_floor_snr", self.ase_floor_snr.is_finite()),
            ("xpm_coefficient", self.xpm_coefficient >= 0.0),
            ("ripple_amplitude", self.ripple_amplitude >= 0.0),
            ("ripple_period", self.ripple_period > 0.0),
            ("ripple_phase", self.ripple_phase.is_finite()),
            ("broadening_sigma_per_span", self.broadening_sigma_per_span >= 0.0),
            ("monitor_noise_sigma", self.monitor_noise_sigma >= 0.0),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(format!("{name} is out of range")),
            None => Ok(()),
        }
    }

    fn broadening_sigma(&self) -> f64 {
        self.broadening_sigma_per_span * self.link.span_count as f64
    }

    fn gain(&self, f: f64, bandwidth: f64) -> f64 {
        filter_gain(f, bandwidth, self.link.filter_order, self.link.filter_count)
    }

    /// Linear SNR of the amplifier chain for one subchannel, including the
    /// back-to-back floor.
    pub fn ase_snr_linear(&self, spec: &SubchannelSpec, center_thz: f64) -> f64 {
        let mut inv = 10f64.powf(-self.ase_floor_snr / 10.0);
        if self.link.span_count > 0 {
            let launch_w = 1e-3 * 10f64.powf(spec.launch_power / 10.0);
            let nf = 10f64.powf(self.link.edfa_noise_figure / 10.0);
            let gain = 10f64.powf(self.link.span_loss_db() / 10.0);
            let noise_w = nf * gain * PLANCK * center_thz * 1e12 * spec.symbol_rate * 1e9;
            inv += self.link.span_count as f64 * noise_w / launch_w;
        }
        1.0 / inv
    }

    /// Fraction of carrier `n`'s power surviving the filter cascade.
    fn surviving_fraction(&self, offset: f64, spec: &SubchannelSpec, bandwidth: f64) -> f64 {
        let sigma = self.broadening_sigma();
        let half = psd_half_support(spec) + if sigma > 0.0 { BROADENING_REACH * sigma } else { 0.0 };
        let mut bps: Vec<f64> = psd_breakpoints(spec).iter().map(|b| offset + b).collect();
        bps.push(0.0);
        integrate(
            |f| broadened_psd(f - offset, spec, sigma) * self.gain(f, bandwidth),
            offset - half,
            offset + half,
            &bps,
        )
    }

    /// Filter-cascade loss of carrier `n` in dB (non-negative).
    pub fn filter_penalty_db(&self, plan: &SuperchannelPlan, n: usize) -> f64 {
        let offsets = plan.offsets();
        -10.0 * self.surviving_fraction(offsets[n], &plan.subchannels()[n], plan.filter_bandwidth()).log10()
    }

    fn crosstalk_at(
        &self,
        interferer: (f64, &SubchannelSpec),
        victim: (f64, &SubchannelSpec),
        bandwidth: f64,
    ) -> f64 {
        let (fm, sm) = interferer;
        let (fn_, sn) = victim;
        let sigma = self.broadening_sigma();
        let reach = if sigma > 0.0 { BROADENING_REACH * sigma } else { 0.0 };
        let hm = psd_half_support(sm) + reach;
        let hn = psd_half_support(sn);
        let lo = (fm - hm).max(fn_ - hn);
        let hi = (fm + hm).min(fn_ + hn);
        if !(hi > lo) {
            return 0.0;
        }
        let mut bps: Vec<f64> = psd_breakpoints(sm).iter().map(|b| fm + b).collect();
        bps.extend(psd_breakpoints(sn).iter().map(|b| fn_ + b));
        bps.push(0.0);
        // w_n = R_s psd_n has unit peak; the extra R_s makes the result dimensionless
        let rs = sn.symbol_rate;
        integrate(
            |f| {
                let g = self.gain(f, bandwidth);
                let pn = rrc_psd(f - fn_, sn);
                broadened_psd(f - fm, sm, sigma) * g * pn * g * rs * rs * pn
            },
            lo,
            hi,
            &bps,
        )
    }

    /// Linear crosstalk of subchannel `m` into the receiver of subchannel `n`:
    /// overlap of the two filtered spectra weighted by the victim's matched
    /// window (its own PSD scaled to unit peak), times R_s of the victim.
    pub fn crosstalk_coefficient(&self, plan: &SuperchannelPlan, m: usize, n: usize) -> f64 {
        if m == n {
            return 0.0;
        }
        let offsets = plan.offsets();
        let specs = plan.subchannels();
        self.crosstalk_at((offsets[m], &specs[m]), (offsets[n], &specs[n]), plan.filter_bandwidth())
    }

    fn xpm(&self, offsets: &[f64], specs: &[SubchannelSpec], n: usize) -> f64 {
        if self.link.span_count == 0 || self.xpm_coefficient == 0.0 {
            return 0.0;
        }
        let rs = specs[n].symbol_rate;
        let sum: f64 = offsets
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != n)
            .map(|(_, &fm)| 1.0 / (fm - offsets[n]).abs().max(rs))
            .sum();
        self.xpm_coefficient * self.link.span_count as f64 * sum
    }

    fn ripple_db(&self, offset: f64) -> f64 {
        if self.ripple_amplitude == 0.0 {
            return 0.0;
        }
        self.ripple_amplitude * (2.0 * PI * offset / self.ripple_period + self.ripple_phase).sin()
    }

    /// Noise-free SNR (dB) for carriers at arbitrary offsets from the filter
    /// center. Offsets need not be ordered, which lets the oracle score drifts
    /// that break feasibility.
    pub fn snr_at_offsets(
        &self,
        offsets: &[f64],
        specs: &[SubchannelSpec],
        bandwidth: f64,
        center_thz: f64,
    ) -> Vec<f64> {
        (0..offsets.len())
            .map(|n| {
                let spec = &specs[n];
                let mut inv = 1.0 / self.ase_snr_linear(spec, center_thz);
                for m in 0..offsets.len() {
                    if m != n {
                        inv += self.crosstalk_at((offsets[m], &specs[m]), (offsets[n], spec), bandwidth);
                    }
                }
                inv += self.xpm(offsets, specs, n);
                let fraction = self.surviving_fraction(offsets[n], spec, bandwidth);
                -10.0 * inv.log10() + 10.0 * fraction.log10() + self.ripple_db(offsets[n])
                    - self.implementation_penalty.for_modulation(spec.modulation)
            })
            .collect()
    }

    /// Noise-free evaluation of a plan.
    pub fn evaluate(&self, plan: &SuperchannelPlan) -> SnrReport {
        let snr = self.snr_at_offsets(
            &plan.offsets(),
            plan.subchannels(),
            plan.filter_bandwidth(),
            plan.center_frequency(),
        );
        SnrReport { snr, noise_applied: false }
    }

    /// Evaluation with optional monitoring noise. The noise realization is the
    /// first draw of this model's stream; use a [`crate::plm::Monitor`] for
    /// repeated measurements.
    pub fn snr(&self, plan: &SuperchannelPlan, with_noise: bool) -> SnrReport {
        let mut report = self.evaluate(plan);
        if with_noise && self.monitor_noise_sigma > 0.0 {
            NoiseStream::new(self.rng_seed, self.monitor_noise_sigma).apply(&mut report, 0);
        }
        report
    }
}

/// Counter-based Gaussian noise: draw `k` depends only on the seed and `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseStream {
    seed: u64,
    sigma: f64,
}

impl NoiseStream {
    pub fn new(seed: u64, sigma: f64) -> Self {
        NoiseStream { seed, sigma }
    }

    pub fn draw(&self, index: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                self.sigma * z
            })
            .collect()
    }

    pub fn apply(&self, report: &mut SnrReport, index: u64) {
        if self.sigma <= 0.0 {
            return;
        }
        let draws = self.draw(index, report.snr.len());
        for (v, e) in report.snr.iter_mut().zip(draws) {
            *v += e;
        }
        report.noise_applied = true;
    }
}
