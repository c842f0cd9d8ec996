use crate::domain::{SnrReport, SuperchannelPlan};
use crate::error::MonitorError;
use crate::plm::model::{NoiseStream, PlmModel};

/// Something that can configure a plan and report every subchannel's SNR.
///
/// Implementations backed by real equipment plug in here; the control loop
/// only ever talks to this trait.
pub trait Monitor {
    fn measure(&mut self, plan: &SuperchannelPlan) -> Result<SnrReport, MonitorError>;

    /// Advertised cost of one simultaneous N-subchannel measurement, seconds.
    fn monitoring_time(&self) -> f64;

    /// Number of measurements taken so far.
    fn calls(&self) -> u64;

    fn supports_concurrent(&self) -> bool {
        false
    }
}

/// [`Monitor`] backed by the surrogate model. Call `k` receives noise draw `k`
/// of the model's seeded stream, so identical seeds and call sequences give
/// identical measurements.
#[derive(Debug, Clone)]
pub struct SurrogateMonitor {
    model: PlmModel,
    noise: NoiseStream,
    calls: u64,
    monitoring_time: f64,
}

impl SurrogateMonitor {
    pub fn new(model: PlmModel) -> Self {
        let noise = NoiseStream::new(model.rng_seed, model.monitor_noise_sigma);
        SurrogateMonitor { model, noise, calls: 0, monitoring_time: 60.0 }
    }

    pub fn with_monitoring_time(mut self, seconds: f64) -> Self {
        self.monitoring_time = seconds;
        self
    }

    pub fn model(&self) -> &PlmModel {
        &self.model
    }
}

impl Monitor for SurrogateMonitor {
    fn measure(&mut self, plan: &SuperchannelPlan) -> Result<SnrReport, MonitorError> {
        let mut report = self.model.evaluate(plan);
        self.noise.apply(&mut report, self.calls);
        self.calls += 1;
        Ok(report)
    }

    fn monitoring_time(&self) -> f64 {
        self.monitoring_time
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ScenarioCase;

    fn setup(sigma: f64, seed: u64) -> (SurrogateMonitor, SuperchannelPlan) {
        let case = ScenarioCase::builtin("table1-case1").unwrap();
        let model = PlmModel { monitor_noise_sigma: sigma, rng_seed: seed, ..PlmModel::for_scenario(&case) };
        (SurrogateMonitor::new(model), case.starting_plan().unwrap())
    }

    #[test]
    fn noiseless_monitor_matches_model() {
        let (mut m, plan) = setup(0.0, 1);
        let expected = m.model().snr(&plan, false);
        for _ in 0..3 {
            assert_eq!(m.measure(&plan).unwrap(), expected);
        }
        assert_eq!(m.calls(), 3);
    }

    #[test]
    fn noise_statistics() {
        let (mut m, plan) = setup(0.05, 11);
        let clean = m.model().evaluate(&plan).snr;
        let n = 1000;
        let mut sum = [0.0; 4];
        let mut sq = [0.0; 4];
        for _ in 0..n {
            let r = m.measure(&plan).unwrap();
            assert!(r.noise_applied);
            for k in 0..4 {
                let e = r.snr[k] - clean[k];
                sum[k] += e;
                sq[k] += e * e;
            }
        }
        for k in 0..4 {
            let mean = sum[k] / n as f64;
            let sd = ((sq[k] - n as f64 * mean * mean) / (n as f64 - 1.0)).sqrt();
            assert!((0.04..=0.06).contains(&sd), "channel {k}: sd {sd}");
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let (mut a, plan) = setup(0.05, 5);
        let (mut b, _) = setup(0.05, 5);
        let (mut c, _) = setup(0.05, 6);
        let sa: Vec<_> = (0..10).map(|_| a.measure(&plan).unwrap()).collect();
        let sb: Vec<_> = (0..10).map(|_| b.measure(&plan).unwrap()).collect();
        let sc: Vec<_> = (0..10).map(|_| c.measure(&plan).unwrap()).collect();
        assert_eq!(sa, sb);
        assert_ne!(sa, sc);
        assert_ne!(sa[0], sa[1]);
    }
}
