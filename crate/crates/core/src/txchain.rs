//! Transmit chain: precoding, Gaussian dithering and 1-bit quantization,
//! plus the unconditional second-order statistics used by the Bussgang
//! linearization.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::num::{complex_normal, quantize_1bit, CMatrix, CVector, Constellation};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct TxConfig {
    /// Dither power per antenna (complex variance).
    pub sigma2: f64,
    /// Quantizer scale, `1/N` for unit transmit power.
    pub eta: f64,
    pub constellation: Constellation,
}

impl TxConfig {
    pub fn new(n_tx: usize, sigma2: f64, constellation: Constellation) -> Result<Self> {
        if n_tx == 0 {
            return Err(Error::InvalidParameter("n_tx must be positive".into()));
        }
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidParameter(format!("dither power {sigma2} must be >= 0")));
        }
        Ok(Self { sigma2, eta: 1.0 / n_tx as f64, constellation })
    }
}

/// Every intermediate signal of one transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct TxRealization {
    pub s: CVector,
    /// Precoded, `W s`.
    pub x: CVector,
    /// Dithered, `x + d`.
    pub x_d: CVector,
    /// Quantized, `Q(x_d)`.
    pub x_q: CVector,
}

/// Precodes `s`, adds fresh dither `CN(0, sigma2 I)` and quantizes.
pub fn transmit<R: Rng + ?Sized>(
    w: &CMatrix,
    s: &CVector,
    cfg: &TxConfig,
    rng: &mut R,
) -> Result<TxRealization> {
    if w.ncols() != s.len() {
        return Err(Error::DimensionMismatch(format!(
            "precoder has {} columns but s has {} entries",
            w.ncols(),
            s.len()
        )));
    }
    let x = w * s;
    let x_d = CVector::from_fn(x.len(), |i, _| x[i] + complex_normal(rng, cfg.sigma2));
    let x_q = quantize_1bit(&x_d, cfg.eta)?;
    Ok(TxRealization { s: s.clone(), x, x_d, x_q })
}

/// `C_xd = W W^H + sigma2 I` for `s ~ CN(0, I)`.
pub fn cov_xd(w: &CMatrix, sigma2: f64) -> CMatrix {
    let n = w.nrows();
    w * w.adjoint() + CMatrix::identity(n, n) * Complex64::new(sigma2, 0.0)
}

/// Bussgang gain `sqrt(2 eta / pi) Diag(C_xd)^{-1/2}`.
pub fn bussgang_gain(c_xd: &CMatrix, eta: f64) -> Result<CMatrix> {
    let n = c_xd.nrows();
    let scale = (2.0 * eta / PI).sqrt();
    let mut b = CMatrix::zeros(n, n);
    for i in 0..n {
        let d = c_xd[(i, i)].re;
        if !(d > 0.0) {
            return Err(Error::Singular(format!("C_xd diagonal entry {i} is {d}")));
        }
        b[(i, i)] = Complex64::new(scale / d.sqrt(), 0.0);
    }
    Ok(b)
}

const ARCSINE_CLAMP: f64 = 1.0 - 1e-15;

/// Covariance of `Q(x_d)` for Gaussian `x_d` by the arcsine law:
/// `(2 eta / pi) (asin(Re R) + j asin(Im R))` with `R` the normalized `C_xd`.
pub fn cov_xq_unconditional(c_xd: &CMatrix, eta: f64) -> Result<CMatrix> {
    let n = c_xd.nrows();
    let inv_sd: Vec<f64> = (0..n)
        .map(|i| {
            let d = c_xd[(i, i)].re;
            if d > 0.0 {
                Ok(1.0 / d.sqrt())
            } else {
                Err(Error::Singular(format!("C_xd diagonal entry {i} is {d}")))
            }
        })
        .collect::<Result<_>>()?;
    let scale = 2.0 * eta / PI;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return Complex64::new(eta, 0.0);
        }
        let r = c_xd[(i, j)] * (inv_sd[i] * inv_sd[j]);
        let re = r.re.clamp(-ARCSINE_CLAMP, ARCSINE_CLAMP).asin();
        let im = r.im.clamp(-ARCSINE_CLAMP, ARCSINE_CLAMP).asin();
        Complex64::new(scale * re, scale * im)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{hermitian_asymmetry, Purpose, SeededRng};
    use nalgebra::SymmetricEigen;

    fn random_w(n: usize, k: usize, seed: u64) -> CMatrix {
        let mut r = SeededRng::new(seed).stream(0, 0, Purpose::Oracle);
        CMatrix::from_fn(n, k, |_, _| complex_normal(&mut r, 1.0 / n as f64))
    }

    #[test]
    fn zero_dither_is_deterministic() {
        let w = random_w(8, 2, 1);
        let cfg = TxConfig::new(8, 0.0, Constellation::qam16()).unwrap();
        let s = CVector::from_vec(vec![cfg.constellation.point(3), cfg.constellation.point(12)]);
        let mut r = SeededRng::new(2).stream(0, 0, Purpose::Dither);
        let t = transmit(&w, &s, &cfg, &mut r).unwrap();
        assert_eq!(t.x_d, t.x);
        assert_eq!(t.x_q, quantize_1bit(&(&w * &s), cfg.eta).unwrap());
    }

    #[test]
    fn transmit_is_reproducible() {
        let w = random_w(8, 2, 1);
        let cfg = TxConfig::new(8, 0.1, Constellation::qam16()).unwrap();
        let s = CVector::from_vec(vec![cfg.constellation.point(1), cfg.constellation.point(2)]);
        let root = SeededRng::new(5);
        let a = transmit(&w, &s, &cfg, &mut root.stream(3, 4, Purpose::Dither)).unwrap();
        let b = transmit(&w, &s, &cfg, &mut root.stream(3, 4, Purpose::Dither)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_symbol_gives_fair_signs() {
        let n = 4;
        let w = random_w(n, 1, 3);
        let cfg = TxConfig::new(n, 0.5, Constellation::qam16()).unwrap();
        let s = CVector::zeros(1);
        let mut r = SeededRng::new(4).stream(0, 0, Purpose::Dither);
        let draws = 20_000;
        let mut pos = vec![0usize; 2 * n];
        for _ in 0..draws {
            let t = transmit(&w, &s, &cfg, &mut r).unwrap();
            for i in 0..n {
                pos[i] += (t.x_q[i].re > 0.0) as usize;
                pos[n + i] += (t.x_q[i].im > 0.0) as usize;
            }
        }
        for p in pos {
            let frac = p as f64 / draws as f64;
            assert!((frac - 0.5).abs() < 4.0 * 0.5 / (draws as f64).sqrt());
        }
    }

    #[test]
    fn dithered_covariance_for_fixed_symbol() {
        let n = 3;
        let w = random_w(n, 1, 6);
        let sigma2 = 0.2;
        let cfg = TxConfig::new(n, sigma2, Constellation::qam16()).unwrap();
        let s = CVector::from_element(1, cfg.constellation.point(7));
        let x = &w * &s;
        let expect = &x * x.adjoint() + CMatrix::identity(n, n) * Complex64::new(sigma2, 0.0);
        let mut r = SeededRng::new(7).stream(0, 0, Purpose::Dither);
        let draws = 100_000;
        let mut acc = CMatrix::zeros(n, n);
        for _ in 0..draws {
            let t = transmit(&w, &s, &cfg, &mut r).unwrap();
            acc += &t.x_d * t.x_d.adjoint();
        }
        acc /= Complex64::new(draws as f64, 0.0);
        // per-entry SE is about sigma2 / sqrt(draws)
        assert!((acc - expect).camax() < 5.0 * sigma2 / (draws as f64).sqrt() * 1.5);
    }

    #[test]
    fn closed_forms_trivial_cases() {
        let sigma2 = 0.3;
        let q = CMatrix::identity(4, 4);
        let c = cov_xd(&q, sigma2);
        assert!((c - CMatrix::identity(4, 4) * Complex64::new(1.0 + sigma2, 0.0)).camax() < 1e-15);
        let c = cov_xd(&CMatrix::zeros(4, 2), sigma2);
        assert!((&c - CMatrix::identity(4, 4) * Complex64::new(sigma2, 0.0)).camax() < 1e-15);

        let eta = 0.25;
        let b = bussgang_gain(&c, eta).unwrap();
        let expect = (2.0 * eta / (PI * sigma2)).sqrt();
        for i in 0..4 {
            assert!((b[(i, i)].re - expect).abs() < 1e-15);
        }
        let b = bussgang_gain(&cov_xd(&CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)), 1.0), 0.5).unwrap();
        assert!((b[(0, 0)].re - (0.5 / PI).sqrt()).abs() < 1e-15);

        let cq = cov_xq_unconditional(&c, eta).unwrap();
        assert!((cq - CMatrix::identity(4, 4) * Complex64::new(eta, 0.0)).camax() < 1e-15);
        let one = cov_xq_unconditional(&CMatrix::from_element(1, 1, Complex64::new(2.0, 0.0)), 0.7).unwrap();
        assert_eq!(one[(0, 0)], Complex64::new(0.7, 0.0));
    }

    #[test]
    fn bussgang_rejects_unused_antenna() {
        let mut w = random_w(3, 1, 1);
        w[(2, 0)] = Complex64::new(0.0, 0.0);
        assert!(matches!(bussgang_gain(&cov_xd(&w, 0.0), 1.0 / 3.0), Err(Error::Singular(_))));
    }

    #[test]
    fn arcsine_covariance_is_hermitian_psd() {
        for seed in 0..10 {
            let n = 6;
            let w = random_w(n, 2, seed);
            let c = cov_xq_unconditional(&cov_xd(&w, 0.01), 1.0 / n as f64).unwrap();
            assert!(hermitian_asymmetry(&c) < 1e-14);
            for i in 0..n {
                assert_eq!(c[(i, i)], Complex64::new(1.0 / n as f64, 0.0));
            }
            let eig = SymmetricEigen::new(c);
            assert!(eig.eigenvalues.min() >= -1e-10);
        }
        // perfectly correlated antennas exercise the clamp
        let w = CMatrix::from_element(2, 1, Complex64::new(1.0, 0.0));
        let c = cov_xq_unconditional(&cov_xd(&w, 0.0), 0.5).unwrap();
        assert!(c.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }
}
