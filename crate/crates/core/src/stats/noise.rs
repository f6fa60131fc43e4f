use super::conditional::{cov_pd_stacked, cross_dither_pd_stacked, mean_pd};
use crate::num::{real_rep, stack_complex, CMatrix, CVector, RMatrix, RVector};
use crate::{Error, Result};

/// First and second moments of the stacked effective noise
/// `n' = [Re n; Im n]`, `n = sqrt(rho) H (G d + p_d) + z`.
#[derive(Debug, Clone)]
pub struct NoiseStats {
    /// `E[n']`, length `2M`.
    pub mu: RVector,
    /// `E[n' n'^T]`.
    pub c: RMatrix,
    /// `C - mu mu^T`.
    pub sigma: RMatrix,
}

/// Effective-noise statistics for an arbitrary linear gain `g`.
///
/// Every `N x N` moment is formed explicitly, so this costs `O(N^3)`; the
/// detector uses the structured path in [`super::symbol_stats`] instead.
pub fn noise_stats(
    h: &CMatrix,
    x: &CVector,
    g: &CMatrix,
    sigma2: f64,
    eta: f64,
    rho: f64,
) -> Result<NoiseStats> {
    let (m, n) = h.shape();
    if x.len() != n || g.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "H is {m}x{n}, x has {} entries, G is {}x{}",
            x.len(),
            g.nrows(),
            g.ncols()
        )));
    }
    if !(rho >= 0.0) {
        return Err(Error::InvalidParameter(format!("SNR must be >= 0, got {rho}")));
    }
    let u = real_rep(h);
    let gt = real_rep(g);
    let t = &u * &gt;

    let mu = &u * stack_complex(&mean_pd(x, g, sigma2, eta)?) * rho.sqrt();

    let pd = cov_pd_stacked(x, g, sigma2, eta)?;
    let dp = cross_dither_pd_stacked(x, g, sigma2, eta)?;
    // E[(H G d)' (H p_d)'^T]
    let gd_p = &t * &dp * u.transpose();
    let mut c = (&u * pd * u.transpose()
        + &gd_p
        + gd_p.transpose()
        + &t * t.transpose() * (sigma2 / 2.0))
        * rho;
    for i in 0..2 * m {
        c[(i, i)] += 0.5;
    }
    let sigma = &c - &mu * mu.transpose();
    Ok(NoiseStats { mu, c, sigma })
}
