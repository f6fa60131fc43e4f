//! Clustered far-field channel between two uniform linear arrays, and the
//! per-realization SVD precoder.

mod io;

pub use io::{read_matrix_binary, read_matrix_text, write_matrix_binary, write_matrix_text};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::num::{complex_normal, svd_topk, CMatrix, CVector, RVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_paths: usize,
    /// Full width of the angular window at both ends, radians.
    pub angular_spread: f64,
    /// Window center at the receiver; 0 is broadside.
    pub center_aoa: f64,
    /// Window center at the transmitter; 0 is broadside.
    pub center_aod: f64,
    /// Element spacing in wavelengths.
    pub antenna_spacing: f64,
}

impl ChannelParams {
    /// 100 scatterers in a pi/6 window, half-wavelength ULAs, aligned broadsides.
    pub fn new(n_tx: usize, n_rx: usize) -> Self {
        Self {
            n_tx,
            n_rx,
            n_paths: 100,
            angular_spread: PI / 6.0,
            center_aoa: 0.0,
            center_aod: 0.0,
            antenna_spacing: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tx == 0 || self.n_rx == 0 {
            return Err(Error::InvalidParameter("antenna counts must be positive".into()));
        }
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter("at least one path is required".into()));
        }
        if !(self.angular_spread > 0.0 && self.angular_spread <= PI) {
            return Err(Error::InvalidParameter(format!(
                "angular spread {} outside (0, pi]",
                self.angular_spread
            )));
        }
        Ok(())
    }
}

/// One propagation path through the scatterer cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: Complex64,
    /// Angle of arrival at the receiver.
    pub aoa: f64,
    /// Angle of departure at the transmitter.
    pub aod: f64,
}

/// ULA response `exp(j 2 pi spacing i sin(theta))`, `i = 0..len`.
pub fn steering_vector(len: usize, spacing: f64, theta: f64) -> CVector {
    let step = 2.0 * PI * spacing * theta.sin();
    CVector::from_fn(len, |i, _| Complex64::from_polar(1.0, step * i as f64))
}

/// Draws gains `CN(0,1)` and angles uniform inside each window.
pub fn draw_paths<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> Vec<Path> {
    let half = params.angular_spread / 2.0;
    (0..params.n_paths)
        .map(|_| {
            let gain = complex_normal(rng, 1.0);
            let aoa = params.center_aoa + rng.random_range(-half..=half);
            let aod = params.center_aod + rng.random_range(-half..=half);
            Path { gain, aoa, aod }
        })
        .collect()
}

/// `H = sqrt(1/P) sum_p g_p a_rx(aoa_p) a_tx(aod_p)^H`.
pub fn channel_from_paths(params: &ChannelParams, paths: &[Path]) -> CMatrix {
    let scale = (1.0 / paths.len() as f64).sqrt();
    let mut h = CMatrix::zeros(params.n_rx, params.n_tx);
    for p in paths {
        let a_rx = steering_vector(params.n_rx, params.antenna_spacing, p.aoa) * (p.gain * scale);
        let a_tx = steering_vector(params.n_tx, params.antenna_spacing, p.aod);
        h.ger(Complex64::new(1.0, 0.0), &a_rx, &a_tx.map(|z| z.conj()), Complex64::new(1.0, 0.0));
    }
    h
}

/// Draws one `M x N` channel matrix with unit-variance entries on average.
pub fn draw_channel<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> Result<CMatrix> {
    params.validate()?;
    let paths = draw_paths(params, rng);
    Ok(channel_from_paths(params, &paths))
}

/// The `k` principal right singular vectors of `h`, as an `N x k` precoder.
pub fn make_precoder(h: &CMatrix, k: usize) -> Result<CMatrix> {
    Ok(svd_topk(h, k)?.vectors)
}

/// A channel matrix together with its precoder.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub h: CMatrix,
    pub w: CMatrix,
    pub singular_values: RVector,
}

impl ChannelRealization {
    pub fn new(h: CMatrix, k: usize) -> Result<Self> {
        let top = svd_topk(&h, k)?;
        Ok(Self { h, w: top.vectors, singular_values: top.values })
    }

    pub fn draw<R: Rng + ?Sized>(params: &ChannelParams, k: usize, rng: &mut R) -> Result<Self> {
        Self::new(draw_channel(params, rng)?, k)
    }

    pub fn n_tx(&self) -> usize {
        self.h.ncols()
    }

    pub fn n_rx(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_streams(&self) -> usize {
        self.w.ncols()
    }
}
