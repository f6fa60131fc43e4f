//! Brute-force Monte-Carlo estimators for the closed-form moments.
//!
//! Each estimator simulates the exact nonlinear chain (dither, quantize,
//! residual, channel, AWGN) and averages. Nothing here calls the
//! closed-form moment code, so the two can be compared entry by entry.
//!
//! Draws are taken in fixed-size chunks, each with its own sub-stream of
//! the supplied [`SeededRng`], and chunk sums are added in chunk order, so
//! results depend only on the seed and the draw count.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::num::{quantize_into, quantizer_level, CMatrix, CVector, Purpose, RMatrix, SeededRng};
use crate::{Error, Result};

pub mod validation;

pub const MIN_DRAWS: usize = 10_000;
const CHUNK: usize = 1 << 14;

/// Symbol-conditioned quantities the oracle can estimate.
///
/// Vector kinds come back as a `2n x 1` column, matrix kinds as the full
/// `2n x 2n` stacked second moment. `NoiseCov` and `YCov` are second
/// moments `E[v v^T]`, not centered covariances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    MeanXq,
    CrossXdXq,
    CovXq,
    MeanPd,
    CrossDPd,
    CovPd,
    NoiseMean,
    NoiseCov,
    YMean,
    YCov,
}

/// Quantities averaged over Gaussian symbols `s ~ CN(0, I)` and dither.
///
/// Each comes back as an `n x 2n` matrix `[Re C | Im C]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UncondKind {
    /// `E[x_d x_d^H]`
    CovXd,
    /// `E[x_q x_d^H]`
    CrossXqXd,
    /// `E[x_q x_q^H]`
    CovXq,
    /// `E[y y^H]`
    CovY,
    /// `E[(x_q - B x_d) x_d^H]` for a supplied diagonal gain `B`.
    BussgangResidual,
}

#[derive(Debug, Clone)]
pub struct OracleEstimate {
    pub mean: RMatrix,
    /// Elementwise standard error of `mean`.
    pub std_err: RMatrix,
    pub draws: usize,
}

impl OracleEstimate {
    /// Standard error used for comparisons.
    ///
    /// A sample that never moved (say, a sign that flips with probability
    /// 1e-7) reports zero variance although the true one is not. One
    /// deviating draw would shift the mean by about `|mean| / draws`, so
    /// that is the resolution floor.
    pub fn effective_se(&self, i: usize) -> f64 {
        self.std_err.as_slice()[i].max(self.mean.as_slice()[i].abs() / self.draws as f64)
    }

    /// Entries of `closed` within `k` standard errors (plus a round-off floor).
    pub fn agreement(&self, closed: &RMatrix, k: f64) -> (usize, usize) {
        assert_eq!(closed.shape(), self.mean.shape(), "shape mismatch against oracle");
        let within = (0..closed.len())
            .filter(|&i| {
                let (c, m) = (closed.as_slice()[i], self.mean.as_slice()[i]);
                (c - m).abs() <= k * self.effective_se(i) + 1e-12 * (1.0 + c.abs())
            })
            .count();
        (within, closed.len())
    }

    /// Largest `|closed - mean| / se` over entries with positive SE.
    pub fn max_z(&self, closed: &RMatrix) -> f64 {
        (0..closed.len())
            .map(|i| (closed.as_slice()[i] - self.mean.as_slice()[i]).abs() / self.effective_se(i))
            .filter(|z| z.is_finite())
            .fold(0.0, f64::max)
    }
}

/// Running sums of one sampled matrix.
struct Accum {
    rows: usize,
    cols: usize,
    total: Vec<f64>,
    total_sq: Vec<f64>,
    chunk: Vec<f64>,
    chunk_sq: Vec<f64>,
}

impl Accum {
    fn new(rows: usize, cols: usize) -> Self {
        let z = vec![0.0; rows * cols];
        Self { rows, cols, total: z.clone(), total_sq: z.clone(), chunk: z.clone(), chunk_sq: z }
    }

    #[inline]
    fn add_outer(&mut self, a: &[f64], b: &[f64]) {
        for (i, &ai) in a.iter().enumerate() {
            let row = &mut self.chunk[i * self.cols..(i + 1) * self.cols];
            let row_sq = &mut self.chunk_sq[i * self.cols..(i + 1) * self.cols];
            for j in 0..b.len() {
                let v = ai * b[j];
                row[j] += v;
                row_sq[j] += v * v;
            }
        }
    }

    #[inline]
    fn add_vec(&mut self, a: &[f64]) {
        for (i, &v) in a.iter().enumerate() {
            self.chunk[i] += v;
            self.chunk_sq[i] += v * v;
        }
    }

    /// `[Re(a b^H) | Im(a b^H)]`
    #[inline]
    fn add_complex_outer(&mut self, a: &[Complex64], b: &[Complex64]) {
        let n = b.len();
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                let v = ai * bj.conj();
                let (r, c) = (i * self.cols + j, i * self.cols + n + j);
                self.chunk[r] += v.re;
                self.chunk_sq[r] += v.re * v.re;
                self.chunk[c] += v.im;
                self.chunk_sq[c] += v.im * v.im;
            }
        }
    }

    fn flush(&mut self) {
        for i in 0..self.total.len() {
            self.total[i] += self.chunk[i];
            self.total_sq[i] += self.chunk_sq[i];
            self.chunk[i] = 0.0;
            self.chunk_sq[i] = 0.0;
        }
    }

    fn finish(mut self, draws: usize) -> OracleEstimate {
        self.flush();
        let n = draws as f64;
        let mean = RMatrix::from_fn(self.rows, self.cols, |i, j| self.total[i * self.cols + j] / n);
        let std_err = RMatrix::from_fn(self.rows, self.cols, |i, j| {
            let m = mean[(i, j)];
            let var = (self.total_sq[i * self.cols + j] / n - m * m).max(0.0) * n / (n - 1.0);
            (var / n).sqrt()
        });
        OracleEstimate { mean, std_err, draws }
    }
}

/// Inputs for the symbol-conditioned estimators.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalSetup<'a> {
    pub h: &'a CMatrix,
    pub x: &'a CVector,
    /// Linear gain defining the residual `p_d = x_q - G x_d`.
    pub gain: &'a CMatrix,
    pub sigma2: f64,
    pub eta: f64,
    pub rho: f64,
}

/// Inputs for the symbol-averaged estimators.
#[derive(Debug, Clone, Copy)]
pub struct UnconditionalSetup<'a> {
    pub h: &'a CMatrix,
    pub w: &'a CMatrix,
    /// Diagonal gain for [`UncondKind::BussgangResidual`].
    pub bussgang: &'a CMatrix,
    pub sigma2: f64,
    pub eta: f64,
    pub rho: f64,
}

fn check_draws(draws: usize) -> Result<()> {
    if draws < MIN_DRAWS {
        return Err(Error::InvalidParameter(format!("oracle needs at least {MIN_DRAWS} draws")));
    }
    Ok(())
}

#[inline]
fn stack_into(v: &[Complex64], out: &mut [f64]) {
    let n = v.len();
    for (i, z) in v.iter().enumerate() {
        out[i] = z.re;
        out[n + i] = z.im;
    }
}

#[inline]
fn mat_vec(a: &CMatrix, v: &[Complex64], out: &mut [Complex64]) {
    let (rows, cols) = a.shape();
    out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
    for j in 0..cols {
        let vj = v[j];
        let col = a.column(j);
        for i in 0..rows {
            out[i] += col[i] * vj;
        }
    }
}

#[inline]
fn cn<R: rand::Rng + ?Sized>(rng: &mut R, sd_axis: f64) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(sd_axis * re, sd_axis * im)
}

/// Estimates several conditional moments from one shared set of draws.
pub fn mc_moments(
    kinds: &[MomentKind],
    setup: &ConditionalSetup<'_>,
    draws: usize,
    rng: &SeededRng,
) -> Result<Vec<OracleEstimate>> {
    check_draws(draws)?;
    let (m, n) = setup.h.shape();
    if setup.x.len() != n || setup.gain.shape() != (n, n) {
        return Err(Error::DimensionMismatch("oracle setup dimensions disagree".into()));
    }
    let mut acc: Vec<Accum> = kinds
        .iter()
        .map(|k| match k {
            MomentKind::MeanXq | MomentKind::MeanPd => Accum::new(2 * n, 1),
            MomentKind::CrossXdXq | MomentKind::CovXq | MomentKind::CrossDPd | MomentKind::CovPd => {
                Accum::new(2 * n, 2 * n)
            }
            MomentKind::NoiseMean | MomentKind::YMean => Accum::new(2 * m, 1),
            MomentKind::NoiseCov | MomentKind::YCov => Accum::new(2 * m, 2 * m),
        })
        .collect();

    let level = quantizer_level(setup.eta);
    let d_sd = (setup.sigma2 / 2.0).sqrt();
    let sqrt_rho = setup.rho.sqrt();
    let x = setup.x.as_slice();

    let zero = Complex64::new(0.0, 0.0);
    let (mut d, mut xd, mut xq, mut gxd, mut p) =
        (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let (mut eff, mut hv, mut z, mut noise, mut y) =
        (vec![zero; n], vec![zero; m], vec![zero; m], vec![zero; m], vec![zero; m]);
    let (mut sd, mut sxd, mut sxq, mut sp) =
        (vec![0.0; 2 * n], vec![0.0; 2 * n], vec![0.0; 2 * n], vec![0.0; 2 * n]);
    let (mut sn, mut sy) = (vec![0.0; 2 * m], vec![0.0; 2 * m]);

    let mut done = 0;
    let mut chunk_idx = 0u64;
    while done < draws {
        let count = CHUNK.min(draws - done);
        let mut r = rng.stream(chunk_idx, 0, Purpose::Oracle);
        for _ in 0..count {
            for i in 0..n {
                d[i] = cn(&mut r, d_sd);
                xd[i] = x[i] + d[i];
            }
            quantize_into(&xd, level, &mut xq);
            mat_vec(setup.gain, &xd, &mut gxd);
            for i in 0..n {
                p[i] = xq[i] - gxd[i];
            }
            for zi in z.iter_mut() {
                *zi = cn(&mut r, std::f64::consts::FRAC_1_SQRT_2);
            }
            // n~ = sqrt(rho) H (G d + p_d) + z, with G d = G x_d - G x
            mat_vec(setup.gain, x, &mut eff);
            for i in 0..n {
                eff[i] = gxd[i] - eff[i] + p[i];
            }
            mat_vec(setup.h, &eff, &mut hv);
            for i in 0..m {
                noise[i] = hv[i] * sqrt_rho + z[i];
            }
            mat_vec(setup.h, &xq, &mut hv);
            for i in 0..m {
                y[i] = hv[i] * sqrt_rho + z[i];
            }
            stack_into(&d, &mut sd);
            stack_into(&xd, &mut sxd);
            stack_into(&xq, &mut sxq);
            stack_into(&p, &mut sp);
            stack_into(&noise, &mut sn);
            stack_into(&y, &mut sy);
            for (k, a) in kinds.iter().zip(acc.iter_mut()) {
                match k {
                    MomentKind::MeanXq => a.add_vec(&sxq),
                    MomentKind::CrossXdXq => a.add_outer(&sxd, &sxq),
                    MomentKind::CovXq => a.add_outer(&sxq, &sxq),
                    MomentKind::MeanPd => a.add_vec(&sp),
                    MomentKind::CrossDPd => a.add_outer(&sd, &sp),
                    MomentKind::CovPd => a.add_outer(&sp, &sp),
                    MomentKind::NoiseMean => a.add_vec(&sn),
                    MomentKind::NoiseCov => a.add_outer(&sn, &sn),
                    MomentKind::YMean => a.add_vec(&sy),
                    MomentKind::YCov => a.add_outer(&sy, &sy),
                }
            }
        }
        acc.iter_mut().for_each(Accum::flush);
        done += count;
        chunk_idx += 1;
    }
    Ok(acc.into_iter().map(|a| a.finish(draws)).collect())
}

pub fn mc_moment(
    kind: MomentKind,
    setup: &ConditionalSetup<'_>,
    draws: usize,
    rng: &SeededRng,
) -> Result<OracleEstimate> {
    Ok(mc_moments(&[kind], setup, draws, rng)?.remove(0))
}

/// Estimates symbol-averaged moments with `s ~ CN(0, I_K)`.
pub fn mc_unconditional(
    kinds: &[UncondKind],
    setup: &UnconditionalSetup<'_>,
    draws: usize,
    rng: &SeededRng,
) -> Result<Vec<OracleEstimate>> {
    check_draws(draws)?;
    let (m, n) = setup.h.shape();
    let k = setup.w.ncols();
    if setup.w.nrows() != n || setup.bussgang.shape() != (n, n) {
        return Err(Error::DimensionMismatch("oracle setup dimensions disagree".into()));
    }
    let mut acc: Vec<Accum> = kinds
        .iter()
        .map(|kd| match kd {
            UncondKind::CovY => Accum::new(m, 2 * m),
            _ => Accum::new(n, 2 * n),
        })
        .collect();
    let level = quantizer_level(setup.eta);
    let d_sd = (setup.sigma2 / 2.0).sqrt();
    let sqrt_rho = setup.rho.sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let (mut s, mut xd, mut xq, mut q) = (vec![zero; k], vec![zero; n], vec![zero; n], vec![zero; n]);
    let (mut hv, mut y) = (vec![zero; m], vec![zero; m]);
    let bdiag: Vec<Complex64> = (0..n).map(|i| setup.bussgang[(i, i)]).collect();

    let mut done = 0;
    let mut chunk_idx = 0u64;
    while done < draws {
        let count = CHUNK.min(draws - done);
        let mut r = rng.stream(chunk_idx, 1, Purpose::Oracle);
        for _ in 0..count {
            for si in s.iter_mut() {
                *si = cn(&mut r, std::f64::consts::FRAC_1_SQRT_2);
            }
            mat_vec(setup.w, &s, &mut xd);
            for v in xd.iter_mut() {
                *v += cn(&mut r, d_sd);
            }
            quantize_into(&xd, level, &mut xq);
            for i in 0..n {
                q[i] = xq[i] - bdiag[i] * xd[i];
            }
            mat_vec(setup.h, &xq, &mut hv);
            for i in 0..m {
                y[i] = hv[i] * sqrt_rho + cn(&mut r, std::f64::consts::FRAC_1_SQRT_2);
            }
            for (kd, a) in kinds.iter().zip(acc.iter_mut()) {
                match kd {
                    UncondKind::CovXd => a.add_complex_outer(&xd, &xd),
                    UncondKind::CrossXqXd => a.add_complex_outer(&xq, &xd),
                    UncondKind::CovXq => a.add_complex_outer(&xq, &xq),
                    UncondKind::CovY => a.add_complex_outer(&y, &y),
                    UncondKind::BussgangResidual => a.add_complex_outer(&q, &xd),
                }
            }
        }
        acc.iter_mut().for_each(Accum::flush);
        done += count;
        chunk_idx += 1;
    }
    Ok(acc.into_iter().map(|a| a.finish(draws)).collect())
}

/// `[Re C | Im C]`, the layout of [`UncondKind`] estimates.
pub fn complex_parts(c: &CMatrix) -> RMatrix {
    let (r, k) = c.shape();
    RMatrix::from_fn(r, 2 * k, |i, j| if j < k { c[(i, j)].re } else { c[(i, j - k)].im })
}

/// Gaussian ML objective by explicit inverse and determinant.
pub fn mc_gaussian_loglike(y_prime: &crate::num::RVector, mu: &crate::num::RVector, sigma: &RMatrix) -> Result<f64> {
    let inv = sigma
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("covariance is not invertible".into()))?;
    let det = sigma.determinant();
    if !(det > 0.0) {
        return Err(Error::Singular(format!("covariance determinant is {det}")));
    }
    let r = y_prime - mu;
    Ok((r.transpose() * inv * &r)[0] + det.ln())
}
