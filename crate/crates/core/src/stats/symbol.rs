use std::f64::consts::PI;

use num_complex::Complex64;

use super::conditional::{lmmse_gain_structured, LmmseGain};
use crate::num::{chol_logdet, erf_real, real_rep, stack_complex, CMatrix, CVector, CholFactor, RMatrix, RVector};
use crate::txchain::TxConfig;
use crate::{Error, Result};

/// Received-signal statistics for one candidate `x = W s`.
#[derive(Debug, Clone)]
pub struct SymbolStats {
    pub x: CVector,
    pub gain: LmmseGain,
    /// `E[y' | x]`, length `2M`.
    pub mu_y: RVector,
    /// `Cov[y' | x]`, `2M x 2M`.
    pub sigma_y: RMatrix,
    pub chol: CholFactor,
}

impl SymbolStats {
    pub fn logdet(&self) -> f64 {
        self.chol.logdet
    }

    /// Gaussian ML objective `(y' - mu)^T Sigma^{-1} (y' - mu) + logdet Sigma`.
    pub fn objective(&self, y_stacked: &RVector) -> f64 {
        self.chol.quad_form(&(y_stacked - &self.mu_y)) + self.chol.logdet
    }
}

/// [`symbol_stats_for_x`] with `x = W s`.
pub fn symbol_stats(
    h: &CMatrix,
    w: &CMatrix,
    s: &CVector,
    cfg: &TxConfig,
    rho: f64,
) -> Result<SymbolStats> {
    if w.ncols() != s.len() || w.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "H is {}x{}, W is {}x{}, s has {} entries",
            h.nrows(),
            h.ncols(),
            w.nrows(),
            w.ncols(),
            s.len()
        )));
    }
    symbol_stats_for_x(h, &(w * s), cfg.sigma2, cfg.eta, rho)
}

/// Mean and covariance of `y' = [Re y; Im y]` given `x`.
///
/// Follows the same decomposition as [`super::noise_stats`] (effective
/// noise moments, then the signal term `f' = (H G x)'`), but keeps the
/// LMMSE gain in diagonal-plus-rank-one form. With `U = real_rep(H)` and
/// `T = real_rep(H G)`, every noise term reduces to one of
/// `U D_q U^T`, `T E U^T` or `T T^T` plus outer products, where `D_q` and
/// `E` are the diagonal parts of `C_xq|x` and `C_{xd xq}|x`. The cost per
/// candidate is `O(M^2 N)`.
pub fn symbol_stats_for_x(
    h: &CMatrix,
    x: &CVector,
    sigma2: f64,
    eta: f64,
    rho: f64,
) -> Result<SymbolStats> {
    let (m, n) = h.shape();
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "H has {n} columns but x has {} entries",
            x.len()
        )));
    }
    if !(rho >= 0.0) {
        return Err(Error::InvalidParameter(format!("SNR must be >= 0, got {rho}")));
    }
    let gain = lmmse_gain_structured(x, sigma2, eta)?;
    let sigma = sigma2.sqrt();
    let level = (eta / 2.0).sqrt();

    // stacked E[x_q], diag of C_xq (beyond the rank-one part), diag E of C_{xd xq}
    let sx = stack_complex(x);
    let phi = sx.map(|v| erf_real(v / sigma));
    let dq = phi.map(|p| (eta / 2.0) * (1.0 - p * p));
    let e_diag = sx.map(|v| level * sigma / PI.sqrt() * (-(v / sigma).powi(2)).exp());
    let mean_q = CVector::from_fn(n, |i, _| Complex64::new(phi[i], phi[n + i]) * level);

    let u = real_rep(h);
    let t = real_rep(&gain.left_mul(h));
    let hm = stack_complex(&(h * &mean_q));
    let f = stack_complex(&(h * gain.apply(x)));

    let mut ud = u.clone();
    scale_columns(&mut ud, &dq);
    let k_q = &ud * u.transpose();
    let mut te = t.clone();
    scale_columns(&mut te, &e_diag);
    let k_e = &te * u.transpose();
    let k_t = &t * t.transpose() * (sigma2 / 2.0);

    // (H C_pd H^T)' = (H C_xq H^T)' - (H P1 H^T)' - (H P2 H^T)' + dither + signal
    let c_q = &hm * hm.transpose() + k_q;
    let p1 = &f * hm.transpose() + &k_e;
    let c_pd = c_q - &p1 - p1.transpose() + &k_t + &f * f.transpose();
    // (H G E[d p^T] H^T)' with E[d' p'^T] = E - (sigma2/2) G~^T
    let gd_p = &k_e - &k_t;
    let mut c_n = (c_pd + &gd_p + gd_p.transpose() + &k_t) * rho;
    for i in 0..2 * m {
        c_n[(i, i)] += 0.5;
    }
    let mu_n = (&hm - &f) * rho.sqrt();

    let f = f * rho.sqrt();
    let mu_y = &f + &mu_n;
    let c_y = &f * f.transpose() + &f * mu_n.transpose() + &mu_n * f.transpose() + c_n;
    let mut sigma_y = c_y - &mu_y * mu_y.transpose();
    symmetrize(&mut sigma_y);
    let chol = chol_logdet(&sigma_y)?;
    Ok(SymbolStats { x: x.clone(), gain, mu_y, sigma_y, chol })
}

fn scale_columns(a: &mut RMatrix, d: &RVector) {
    for (j, mut col) in a.column_iter_mut().enumerate() {
        col *= d[j];
    }
}

fn symmetrize(a: &mut RMatrix) {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{complex_normal, Constellation, Purpose, SeededRng};
    use crate::stats::{lmmse_gain, noise_stats};
    use nalgebra::SymmetricEigen;

    fn instance(m: usize, n: usize, seed: u64) -> (CMatrix, CVector) {
        let mut r = SeededRng::new(seed).stream(0, 0, Purpose::Oracle);
        let h = CMatrix::from_fn(m, n, |_, _| complex_normal(&mut r, 1.0));
        let x = CVector::from_fn(n, |_, _| complex_normal(&mut r, 1.0 / n as f64));
        (h, x)
    }

    /// Second route: `y = sqrt(rho) H x_q + z` with independent quantizer
    /// outputs, so the covariance is `rho U D_q U^T + I/2` directly.
    fn direct_sigma(h: &CMatrix, x: &CVector, sigma2: f64, eta: f64, rho: f64) -> (RVector, RMatrix) {
        let sx = stack_complex(x);
        let phi = sx.map(|v| erf_real(v / sigma2.sqrt()));
        let n = x.len();
        let mq = CVector::from_fn(n, |i, _| Complex64::new(phi[i], phi[n + i]) * (eta / 2.0).sqrt());
        let u = real_rep(h);
        let d = RMatrix::from_diagonal(&phi.map(|p| eta / 2.0 * (1.0 - p * p)));
        let mut s = &u * d * u.transpose() * rho;
        for i in 0..s.nrows() {
            s[(i, i)] += 0.5;
        }
        (stack_complex(&(h * mq)) * rho.sqrt(), s)
    }

    #[test]
    fn zero_snr() {
        let (h, x) = instance(3, 4, 1);
        let st = symbol_stats_for_x(&h, &x, 0.1, 0.25, 0.0).unwrap();
        assert_eq!(st.mu_y.camax(), 0.0);
        assert!((&st.sigma_y - RMatrix::identity(6, 6) * 0.5).camax() < 1e-16);
        assert!((st.logdet() - 6.0 * 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sigma_equals_noise_covariance() {
        for seed in 0..8 {
            let n = [2, 4, 8][seed as usize % 3];
            let (h, x) = instance(3, n, seed);
            let sigma2 = [0.01, 0.1, 1.0][seed as usize % 3];
            let eta = 1.0 / n as f64;
            let rho = 3.0 + seed as f64;
            let g = lmmse_gain(&x, sigma2, eta).unwrap();
            let ns = noise_stats(&h, &x, &g, sigma2, eta, rho).unwrap();
            let st = symbol_stats_for_x(&h, &x, sigma2, eta, rho).unwrap();
            let scale = ns.sigma.camax();
            assert!((&st.sigma_y - &ns.sigma).camax() < 1e-9 * scale, "seed {seed}");

            // mean = sqrt(rho) f' + mu_n
            let f = stack_complex(&(&h * &g * &x)) * rho.sqrt();
            assert!((&st.mu_y - (f + &ns.mu)).camax() < 1e-12);

            let (mu, sigma) = direct_sigma(&h, &x, sigma2, eta, rho);
            assert!((&st.mu_y - mu).camax() < 1e-12);
            assert!((&st.sigma_y - sigma).camax() < 1e-9 * scale);
        }
    }

    #[test]
    fn spectrum_is_floored_by_awgn() {
        let (h, x) = instance(4, 8, 5);
        let st = symbol_stats_for_x(&h, &x, 0.01, 0.125, 30.0).unwrap();
        let eig = SymmetricEigen::new(st.sigma_y.clone());
        assert!(eig.eigenvalues.min() >= 0.5 - 1e-9);
        assert!((st.chol.reconstruct() - &st.sigma_y).camax() < 1e-8 * st.sigma_y.camax());
        assert_eq!(st.chol.jitter, 0.0);
    }

    #[test]
    fn from_symbols() {
        let (h, _) = instance(2, 4, 7);
        let w = crate::channel::make_precoder(&h, 1).unwrap();
        let cfg = TxConfig::new(4, 0.05, Constellation::qam16()).unwrap();
        let s = CVector::from_element(1, cfg.constellation.point(6));
        let a = symbol_stats(&h, &w, &s, &cfg, 2.0).unwrap();
        let b = symbol_stats_for_x(&h, &(&w * &s), 0.05, 0.25, 2.0).unwrap();
        assert_eq!(a.mu_y, b.mu_y);
        let bad = CVector::zeros(2);
        assert!(symbol_stats(&h, &w, &bad, &cfg, 2.0).is_err());
    }
}
