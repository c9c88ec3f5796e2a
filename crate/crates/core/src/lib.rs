//! Fractional diffusion on an interval: Mittag-Leffler evaluation, a modal
//! forward solver for single-, multi- and distributed-order problems, and
//! recovery of orders and order weights from a single-point time series.

// `!(x > 0.0)` is used on purpose so NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forward;
pub mod mittag_leffler;
pub mod optimize;
pub mod order_recovery;
pub mod quadrature;
pub mod spectral;
pub mod weight_recovery;

pub use error::{Error, Result};
