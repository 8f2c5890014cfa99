//! Achievable URLLC and eMBB rates for the uplink of a C-RAN whose edge
//! nodes forward radio signals over analog copper fronthaul.
//!
//! The numeric core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`); the aliases below fix it to `f64`. The cable
//! bandwidth `μ` is always an exact rational. The brute-force [`oracle`],
//! the [`point`] evaluator and the [`sweep`] harness work in `f64` only.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod embb;
pub mod error;
pub mod expectation;
pub mod linalg;
pub mod numfmt;
pub mod oracle;
pub mod params;
pub mod point;
pub mod qfunc;
pub mod scalar;
pub mod sweep;
pub mod urllc;

pub use error::{Error, Result};
pub use expectation::{ExpectationPolicy, FailureModel, Strategy};
pub use params::{AccessMode, CableBandwidth};
pub use point::{evaluate_point, RatePoint, Scheme};
pub use scalar::Real;

pub type Params = params::SystemParams<f64>;
pub type Matrix64 = linalg::Matrix<f64>;
pub type ChannelSet = channel::ChannelSet<f64>;
pub type InterferenceState = expectation::InterferenceState<f64>;
pub type UrllcResult = urllc::UrllcResult<f64>;
pub type EmbbRate = embb::EmbbRate<f64>;
pub type EmbbModel = embb::EmbbModel<f64>;
