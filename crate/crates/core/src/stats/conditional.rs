use std::f64::consts::PI;

use num_complex::Complex64;

use super::Axis;
use crate::num::{erf_real, real_rep, stack_complex, CMatrix, CVector, RMatrix, RVector, axis_block};
use crate::{Error, Result};

fn check_sigma2(sigma2: f64) -> Result<f64> {
    if sigma2 > 0.0 && sigma2.is_finite() {
        Ok(sigma2.sqrt())
    } else {
        Err(Error::Singular(format!(
            "symbol-conditioned linearization needs dither power > 0, got {sigma2}"
        )))
    }
}

/// Per-axis pieces shared by all conditional moments.
struct AxisTerms {
    /// `erf(A[x_n] / sigma)`, stacked `[Re; Im]`.
    phi: RVector,
    /// `sqrt(eta/2) sqrt(sigma^2/pi) exp(-(A[x_n]/sigma)^2)`, stacked.
    diag: RVector,
    level: f64,
}

impl AxisTerms {
    fn new(x: &CVector, sigma2: f64, eta: f64) -> Result<Self> {
        let sigma = check_sigma2(sigma2)?;
        let level = (eta / 2.0).sqrt();
        let sx = stack_complex(x);
        let phi = sx.map(|v| erf_real(v / sigma));
        let k = level * sigma / PI.sqrt();
        let diag = sx.map(|v| k * (-(v / sigma).powi(2)).exp());
        Ok(Self { phi, diag, level })
    }

    /// Stacked `E[x_q]`.
    fn mean_q(&self) -> RVector {
        &self.phi * self.level
    }
}

/// `E[x_d' x_q'^T | x]`, all four axis blocks.
pub fn cross_corr_stacked(x: &CVector, sigma2: f64, eta: f64) -> Result<RMatrix> {
    let t = AxisTerms::new(x, sigma2, eta)?;
    let mut out = stack_complex(x) * t.mean_q().transpose();
    for i in 0..out.nrows() {
        out[(i, i)] += t.diag[i];
    }
    Ok(out)
}

/// `sqrt(eta/2) E[A[x_d,n] sgn(B[x_d,m]) | x]` for all `n, m`.
pub fn cross_corr_cond(x: &CVector, sigma2: f64, eta: f64, a: Axis, b: Axis) -> Result<RMatrix> {
    Ok(axis_block(&cross_corr_stacked(x, sigma2, eta)?, a, b))
}

/// `E[x_d x_q^H | x]`, assembled from the four axis blocks.
pub fn cross_corr_cond_complex(x: &CVector, sigma2: f64, eta: f64) -> Result<CMatrix> {
    let st = cross_corr_stacked(x, sigma2, eta)?;
    let n = x.len();
    let rr = axis_block(&st, Axis::Re, Axis::Re);
    let ii = axis_block(&st, Axis::Im, Axis::Im);
    let ri = axis_block(&st, Axis::Re, Axis::Im);
    let ir = axis_block(&st, Axis::Im, Axis::Re);
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(rr[(i, j)] + ii[(i, j)], ir[(i, j)] - ri[(i, j)])
    }))
}

/// `(x x^H + sigma2 I)^{-1}` by the rank-one update identity.
pub fn rank_one_inverse(x: &CVector, sigma2: f64) -> Result<CMatrix> {
    check_sigma2(sigma2)?;
    let n = x.len();
    let c = 1.0 / (sigma2 + x.norm_squared());
    let mut inv = x * x.adjoint() * Complex64::new(-c, 0.0);
    for i in 0..n {
        inv[(i, i)] += 1.0;
    }
    Ok(inv / Complex64::new(sigma2, 0.0))
}

/// Symbol-dependent LMMSE gain `G(x) = C_{xd xq|x}^H (x x^H + sigma2 I)^{-1}`.
pub fn lmmse_gain(x: &CVector, sigma2: f64, eta: f64) -> Result<CMatrix> {
    let c = cross_corr_cond_complex(x, sigma2, eta)?;
    Ok(c.adjoint() * rank_one_inverse(x, sigma2)?)
}

/// The LMMSE gain in its native form `Diag(diag) + outer x^H`.
///
/// The cross-correlation is `x E[x_q]^H` plus a real diagonal, so the gain
/// is diagonal plus rank one and never needs to be stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct LmmseGain {
    pub diag: RVector,
    pub outer: CVector,
    pub x: CVector,
}

impl LmmseGain {
    pub fn to_dense(&self) -> CMatrix {
        let mut g = &self.outer * self.x.adjoint();
        for i in 0..self.diag.len() {
            g[(i, i)] += self.diag[i];
        }
        g
    }

    /// `G v` in O(N).
    pub fn apply(&self, v: &CVector) -> CVector {
        let ip = self.x.dotc(v);
        CVector::from_fn(v.len(), |i, _| v[i] * self.diag[i] + self.outer[i] * ip)
    }

    /// `H G` in O(MN).
    pub fn left_mul(&self, h: &CMatrix) -> CMatrix {
        let hg_outer = h * &self.outer;
        let (m, n) = h.shape();
        CMatrix::from_fn(m, n, |i, j| h[(i, j)] * self.diag[j] + hg_outer[i] * self.x[j].conj())
    }
}

pub fn lmmse_gain_structured(x: &CVector, sigma2: f64, eta: f64) -> Result<LmmseGain> {
    let t = AxisTerms::new(x, sigma2, eta)?;
    let n = x.len();
    let m = CVector::from_fn(n, |i, _| Complex64::new(t.phi[i], t.phi[n + i]) * t.level);
    let delta = RVector::from_fn(n, |i, _| t.diag[i] + t.diag[n + i]);
    let c = 1.0 / (sigma2 + x.norm_squared());
    let outer = CVector::from_fn(n, |i, _| (m[i] - x[i] * (delta[i] / sigma2)) * c);
    Ok(LmmseGain { diag: delta / sigma2, outer, x: x.clone() })
}

/// `E[x_q | x] = sqrt(eta/2) Phi_c(x / sigma)`.
pub fn mean_xq_cond(x: &CVector, sigma2: f64, eta: f64) -> Result<CVector> {
    let t = AxisTerms::new(x, sigma2, eta)?;
    let n = x.len();
    Ok(CVector::from_fn(n, |i, _| Complex64::new(t.phi[i], t.phi[n + i]) * t.level))
}

/// `E[p_d | x] = E[x_q | x] - G x`.
pub fn mean_pd(x: &CVector, g: &CMatrix, sigma2: f64, eta: f64) -> Result<CVector> {
    Ok(mean_xq_cond(x, sigma2, eta)? - g * x)
}

/// `E[x_q' x_q'^T | x]`, all four axis blocks.
pub fn cov_xq_cond_stacked(x: &CVector, sigma2: f64, eta: f64) -> Result<RMatrix> {
    let t = AxisTerms::new(x, sigma2, eta)?;
    let m = t.mean_q();
    let mut out = &m * m.transpose();
    for i in 0..out.nrows() {
        out[(i, i)] += (eta / 2.0) * (1.0 - t.phi[i] * t.phi[i]);
    }
    Ok(out)
}

/// `E[A[x_q] B[x_q]^T | x]`.
pub fn cov_xq_cond(x: &CVector, sigma2: f64, eta: f64, a: Axis, b: Axis) -> Result<RMatrix> {
    Ok(axis_block(&cov_xq_cond_stacked(x, sigma2, eta)?, a, b))
}

fn check_gain(x: &CVector, g: &CMatrix) -> Result<()> {
    let n = x.len();
    if g.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "gain is {}x{}, expected {n}x{n}",
            g.nrows(),
            g.ncols()
        )));
    }
    Ok(())
}

/// `E[d' p_d'^T | x] = E[x_d' x_q'^T] - E[d' (G d)'^T] - x' E[x_q']^T`.
///
/// The dither has variance `sigma2 / 2` per real axis, so the middle term
/// is `(sigma2/2) real_rep(G)^T`.
pub fn cross_dither_pd_stacked(x: &CVector, g: &CMatrix, sigma2: f64, eta: f64) -> Result<RMatrix> {
    check_gain(x, g)?;
    let t = AxisTerms::new(x, sigma2, eta)?;
    let cross = cross_corr_stacked(x, sigma2, eta)?;
    let dither = real_rep(g).transpose() * (sigma2 / 2.0);
    Ok(cross - dither - stack_complex(x) * t.mean_q().transpose())
}

pub fn cross_dither_pd(
    x: &CVector,
    g: &CMatrix,
    sigma2: f64,
    eta: f64,
    a: Axis,
    b: Axis,
) -> Result<RMatrix> {
    Ok(axis_block(&cross_dither_pd_stacked(x, g, sigma2, eta)?, a, b))
}

/// `E[p_d' p_d'^T | x] = C_xq - P1 - P2 + (sigma2/2) G~ G~^T + (G~x')(G~x')^T`
/// with `P1 = E[(G x_d)' x_q'^T]`, `P2 = E[x_q' (G x_d)'^T]` and `G~` the
/// real representation of `G`.
pub fn cov_pd_stacked(x: &CVector, g: &CMatrix, sigma2: f64, eta: f64) -> Result<RMatrix> {
    check_gain(x, g)?;
    let gt = real_rep(g);
    let cross = cross_corr_stacked(x, sigma2, eta)?;
    let p1 = &gt * &cross;
    let p2 = p1.transpose();
    let gx = &gt * stack_complex(x);
    Ok(cov_xq_cond_stacked(x, sigma2, eta)? - p1 - p2
        + &gt * gt.transpose() * (sigma2 / 2.0)
        + &gx * gx.transpose())
}

pub fn cov_pd(x: &CVector, g: &CMatrix, sigma2: f64, eta: f64, a: Axis, b: Axis) -> Result<RMatrix> {
    Ok(axis_block(&cov_pd_stacked(x, g, sigma2, eta)?, a, b))
}
