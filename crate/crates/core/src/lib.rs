//! Technometrics of host-parasite technology systems.
//!
//! A parasitic subsystem `P` (a camera module, an engine) evolves inside a
//! host technology `H` (the smartphone, the tractor). When both follow
//! logistic growth, `P = A H^B` holds early on, with `B` the ratio of growth
//! rates. `B` is estimated by least squares on natural logs and graded on a
//! three-step scale: parasitism (`B < 1`), mutualism (`B = 1`) and
//! symbiosis (`B > 1`).

// `!(x > 0.0)` is used on purpose so NaN fails validation; matrix kernels
// read best with explicit indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod evolution;
pub mod io;
pub mod logistic;
pub mod scale;
pub mod series;
pub mod simulate;
pub mod statkit;

pub use error::{Error, Result};
pub use logistic::{
    derive_power_law, fit_logistic, forecast_series, logistic_value, logit_transform, LogisticFitReport,
    LogisticParams, PowerLaw,
};
pub use scale::{classify_point, classify_with_test, prediction_label, EvolutionClass, EvolutionLabel, Mode};
pub use series::{Observation, Role, TechSeries};
