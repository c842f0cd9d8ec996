//! Surrogate physical layer: spectra, filter cascade, crosstalk, SNR and the
//! monitoring interface consumed by the control loop.

mod model;
mod monitor;
pub mod quadrature;
pub mod spectrum;

pub use model::{ImplementationPenalty, NoiseStream, PlmModel};
pub use monitor::{Monitor, SurrogateMonitor};
pub use spectrum::{filter_gain, rrc_psd};
