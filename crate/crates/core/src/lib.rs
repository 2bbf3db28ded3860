//! Secrecy performance of an IRS-aided two-user NOMA downlink with a
//! passive eavesdropper: closed-form outage and capacity expressions, a
//! Monte-Carlo channel simulator to check them, and sweep/figure tooling.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod oracles;
pub mod specfun;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};
