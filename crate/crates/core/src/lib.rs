//! Simulation and likelihood-free inference for seasonal plant-disease
//! spread on a plantation subsection network.
//!
//! The crate models monthly infection snapshots of plantation subsections
//! with a seasonal susceptible-infected-susceptible process, compresses
//! observed and simulated series into summary statistics, and estimates the
//! six spreading/recovery parameters with approximate Bayesian computation
//! (rejection sampling and MCMC). On top of the fitted posterior it offers
//! forecasting, what-if scenarios, and hold-out validation.

pub mod abc;
pub mod diagnostics;
pub mod error;
pub mod fixtures;
pub mod forecast;
pub mod month;
pub mod net;
pub mod nodeset;
pub mod rng;
pub mod sis;
pub mod summary;
pub mod validate;

#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use error::{Error, ErrorCategory, Result};
pub use month::{Month, Season};
pub use net::{Network, NodeId, ObservationSeries};
pub use sis::{ParamSet, Simulator};
pub use summary::SummaryVector;
