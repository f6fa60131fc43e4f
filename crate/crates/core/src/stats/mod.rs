//! Statistics of the transmit and receive signals conditioned on a fixed
//! precoded symbol vector `x = W s`, with the dither as the only randomness
//! on the transmit side.
//!
//! Real-valued "stacked" quantities always use the `[Re; Im]` layout: a
//! `2n` vector holds all real parts first, and a `2n x 2n` matrix has the
//! `(Re, Re)`, `(Re, Im)`, `(Im, Re)`, `(Im, Im)` blocks in the usual
//! positions. The per-block functions taking two [`Axis`] selectors return
//! one `n x n` block of the corresponding stacked matrix.

mod conditional;
mod noise;
mod symbol;

pub use conditional::{
    cov_pd, cov_pd_stacked, cov_xq_cond, cov_xq_cond_stacked, cross_corr_cond,
    cross_corr_cond_complex, cross_corr_stacked, cross_dither_pd, cross_dither_pd_stacked,
    lmmse_gain, lmmse_gain_structured, mean_pd, mean_xq_cond, rank_one_inverse, LmmseGain,
};
pub use noise::{noise_stats, NoiseStats};
pub use symbol::{symbol_stats, symbol_stats_for_x, SymbolStats};

pub use crate::num::Axis;
