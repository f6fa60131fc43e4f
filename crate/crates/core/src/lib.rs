//! Link-level simulation of a point-to-point massive MIMO downlink whose
//! transmitter uses 1-bit DACs after dithered linear precoding.
//!
//! The crate covers the whole chain:
//!
//! - [`num`]: complex/real dense linear algebra helpers, the 1-bit quantizer,
//!   the error function, constellations and seeded random streams.
//! - [`channel`]: the clustered ULA channel model and the SVD precoder.
//! - [`txchain`]: precode, dither, quantize, plus the unconditional
//!   (Bussgang) second-order statistics of the transmit signal.
//! - [`stats`]: symbol-conditioned LMMSE linearization and the mean and
//!   covariance of the received signal for a fixed candidate symbol vector.
//! - [`detect`]: the Gaussian-likelihood ML detector over all candidate
//!   symbol vectors and the Bussgang LMMSE combiner with slicing.
//! - [`oracle`]: brute-force Monte-Carlo estimators of every closed-form
//!   moment, used by the test suite and by `onebit-sim --self-check`.
//! - [`harness`]: experiment configuration, SER sweeps and CSV output.
//!
//! Runnable walk-throughs of each capability live in `examples/`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod detect;
pub mod error;
pub mod harness;
pub mod num;
pub mod oracle;
pub mod stats;
pub mod txchain;

pub use error::{Error, Result};

/// Library version, recorded in sweep reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
