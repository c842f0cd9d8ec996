//! Closed-loop frequency optimization of the subchannels of an optical
//! superchannel.
//!
//! - [`domain`]: plans, objectives, constraints and the scenario catalogue.
//! - [`plm`]: surrogate physical-layer model and the [`plm::Monitor`] trait.
//! - [`control_loop`]: the stochastic subgradient optimizer driven by probes.
//! - [`oracle`]: brute-force grid search and soft-failure margins.
//! - [`harness`]: configuration, experiments, sweeps, persistence and reports.

// `!(x > 0.0)` is how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control_loop;
pub mod domain;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod plm;

pub use domain::{Objective, ScenarioCase, SnrReport, SubchannelSpec, SuperchannelPlan};
pub use error::{ConfigError, DomainError, HarnessError, MonitorError, OptimizeError, OracleError};
