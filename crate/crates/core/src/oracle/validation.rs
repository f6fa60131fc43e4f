//! Randomized closed-form vs Monte-Carlo comparison suite.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use super::{
    complex_parts, mc_moments, mc_unconditional, ConditionalSetup, MomentKind, OracleEstimate,
    UncondKind, UnconditionalSetup,
};
use crate::channel::make_precoder;
use crate::num::{complex_normal, stack_complex, CMatrix, CVector, Constellation, Purpose, RMatrix, SeededRng};
use crate::stats::{
    cov_pd_stacked, cov_xq_cond_stacked, cross_corr_stacked, cross_dither_pd_stacked, lmmse_gain,
    mean_pd, mean_xq_cond, noise_stats, symbol_stats_for_x,
};
use crate::txchain::{bussgang_gain, cov_xd, cov_xq_unconditional};
use crate::Result;

pub const SIGMA2_GRID: [f64; 3] = [0.01, 0.1, 1.0];
pub const N_GRID: [usize; 3] = [2, 4, 8];

/// One randomized test point.
#[derive(Debug, Clone)]
pub struct Instance {
    pub index: usize,
    pub h: CMatrix,
    pub w: CMatrix,
    pub s: CVector,
    pub x: CVector,
    pub sigma2: f64,
    pub eta: f64,
    pub rho: f64,
}

impl Instance {
    /// Cycles through every (N, K, sigma^2) combination as `index` grows.
    pub fn generate(index: usize, rng: &SeededRng) -> Result<Self> {
        let n = N_GRID[index % 3];
        let k = 1 + (index / 3) % 2;
        let sigma2 = SIGMA2_GRID[(index / 6) % 3];
        let mut r = rng.stream(index as u64, 0, Purpose::Custom(0x5e1f));
        let m = r.random_range(2..=4usize);
        let h = CMatrix::from_fn(m, n, |_, _| complex_normal(&mut r, 1.0));
        let w = make_precoder(&h, k.min(m))?;
        let qam = Constellation::qam16();
        let s = CVector::from_fn(w.ncols(), |_, _| qam.point(r.random_range(0..qam.len())));
        let x = &w * &s;
        let rho = 10f64.powf(r.random_range(-0.5..1.5));
        Ok(Self { index, h, w, s, x, sigma2, eta: 1.0 / n as f64, rho })
    }

    pub fn n_tx(&self) -> usize {
        self.h.ncols()
    }
}

/// Agreement of one closed-form quantity with its oracle on one instance.
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub instance: usize,
    pub quantity: &'static str,
    pub within: usize,
    pub total: usize,
    pub max_z: f64,
}

impl CheckRow {
    fn new(instance: usize, quantity: &'static str, closed: &RMatrix, est: &OracleEstimate, k: f64) -> Self {
        let (within, total) = est.agreement(closed, k);
        Self { instance, quantity, within, total, max_z: est.max_z(closed) }
    }
}

/// Compares every closed-form moment on `inst` against `draws` MC samples.
pub fn check_instance(inst: &Instance, draws: usize, rng: &SeededRng, k_se: f64) -> Result<Vec<CheckRow>> {
    let (x, s2, eta, rho) = (&inst.x, inst.sigma2, inst.eta, inst.rho);
    let g = lmmse_gain(x, s2, eta)?;
    let sub = SeededRng::new(rng.seed() ^ (inst.index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));

    let kinds = [
        (MomentKind::MeanXq, "mean_xq"),
        (MomentKind::CrossXdXq, "cross_xd_xq"),
        (MomentKind::CovXq, "cov_xq"),
        (MomentKind::MeanPd, "mean_pd"),
        (MomentKind::CrossDPd, "cross_d_pd"),
        (MomentKind::CovPd, "cov_pd"),
        (MomentKind::NoiseMean, "noise_mean"),
        (MomentKind::NoiseCov, "noise_cov"),
        (MomentKind::YMean, "y_mean"),
        (MomentKind::YCov, "y_cov"),
    ];
    let setup = ConditionalSetup { h: &inst.h, x, gain: &g, sigma2: s2, eta, rho };
    let est = mc_moments(&kinds.map(|k| k.0), &setup, draws, &sub)?;

    let ns = noise_stats(&inst.h, x, &g, s2, eta, rho)?;
    let ys = symbol_stats_for_x(&inst.h, x, s2, eta, rho)?;
    let closed = [
        col(stack_complex(&mean_xq_cond(x, s2, eta)?)),
        cross_corr_stacked(x, s2, eta)?,
        cov_xq_cond_stacked(x, s2, eta)?,
        col(stack_complex(&mean_pd(x, &g, s2, eta)?)),
        cross_dither_pd_stacked(x, &g, s2, eta)?,
        cov_pd_stacked(x, &g, s2, eta)?,
        col(ns.mu.clone()),
        ns.c.clone(),
        col(ys.mu_y.clone()),
        &ys.sigma_y + &ys.mu_y * ys.mu_y.transpose(),
    ];
    let mut rows: Vec<CheckRow> = kinds
        .iter()
        .zip(closed.iter().zip(est.iter()))
        .map(|((_, name), (c, e))| CheckRow::new(inst.index, name, c, e, k_se))
        .collect();

    let c_xd = cov_xd(&inst.w, s2);
    let b = bussgang_gain(&c_xd, eta)?;
    let c_xq = cov_xq_unconditional(&c_xd, eta)?;
    let mut c_y = &inst.h * &c_xq * inst.h.adjoint() * Complex64::new(rho, 0.0);
    for i in 0..c_y.nrows() {
        c_y[(i, i)] += 1.0;
    }
    let ukinds = [
        (UncondKind::CovXd, "uncond_cov_xd", complex_parts(&c_xd)),
        (UncondKind::CrossXqXd, "uncond_cross_xq_xd", complex_parts(&(&b * &c_xd))),
        (UncondKind::CovXq, "uncond_cov_xq", complex_parts(&c_xq)),
        (UncondKind::CovY, "uncond_cov_y", complex_parts(&c_y)),
        (UncondKind::BussgangResidual, "bussgang_residual", RMatrix::zeros(inst.n_tx(), 2 * inst.n_tx())),
    ];
    let usetup = UnconditionalSetup { h: &inst.h, w: &inst.w, bussgang: &b, sigma2: s2, eta, rho };
    let uest = mc_unconditional(&ukinds.each_ref().map(|k| k.0), &usetup, draws, &sub)?;
    rows.extend(
        ukinds
            .iter()
            .zip(uest.iter())
            .map(|((_, name, c), e)| CheckRow::new(inst.index, name, c, e, k_se)),
    );
    Ok(rows)
}

fn col(v: crate::num::RVector) -> RMatrix {
    let n = v.len();
    RMatrix::from_column_slice(n, 1, v.as_slice())
}

/// Outcome of [`self_check`].
#[derive(Debug, Clone)]
pub struct SelfCheckReport {
    pub rows: Vec<CheckRow>,
    pub draws: usize,
    /// Required fraction of entries within the SE band.
    pub threshold: f64,
}

impl SelfCheckReport {
    pub fn within(&self) -> usize {
        self.rows.iter().map(|r| r.within).sum()
    }

    pub fn total(&self) -> usize {
        self.rows.iter().map(|r| r.total).sum()
    }

    pub fn fraction(&self) -> f64 {
        self.within() as f64 / self.total().max(1) as f64
    }

    pub fn passed(&self) -> bool {
        self.fraction() >= self.threshold
    }

    /// Per-quantity totals aggregated over instances, in first-seen order.
    pub fn by_quantity(&self) -> Vec<(&'static str, usize, usize, f64)> {
        let mut out: Vec<(&'static str, usize, usize, f64)> = Vec::new();
        for r in &self.rows {
            match out.iter_mut().find(|e| e.0 == r.quantity) {
                Some(e) => {
                    e.1 += r.within;
                    e.2 += r.total;
                    e.3 = e.3.max(r.max_z);
                }
                None => out.push((r.quantity, r.within, r.total, r.max_z)),
            }
        }
        out
    }
}

impl fmt::Display for SelfCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<22} {:>9} {:>9} {:>8} {:>7}", "quantity", "within", "entries", "max |z|", "result")?;
        for (q, w, t, z) in self.by_quantity() {
            let ok = w as f64 / t as f64 >= self.threshold;
            writeln!(f, "{q:<22} {w:>9} {t:>9} {z:>8.2} {:>7}", if ok { "PASS" } else { "FAIL" })?;
        }
        write!(
            f,
            "overall: {}/{} entries within 4 SE ({:.2}%) at {} draws -> {}",
            self.within(),
            self.total(),
            100.0 * self.fraction(),
            self.draws,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Runs the suite on `instances` generated points.
pub fn self_check(instances: usize, draws: usize, seed: u64) -> Result<SelfCheckReport> {
    let rng = SeededRng::new(seed);
    let mut rows = Vec::new();
    for i in 0..instances {
        let inst = Instance::generate(i, &rng)?;
        rows.extend(check_instance(&inst, draws, &rng, 4.0)?);
    }
    Ok(SelfCheckReport { rows, draws, threshold: 0.99 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_cover_grid() {
        let rng = SeededRng::new(1);
        let mut seen = std::collections::HashSet::new();
        for i in 0..18 {
            let inst = Instance::generate(i, &rng).unwrap();
            assert!((inst.eta - 1.0 / inst.n_tx() as f64).abs() < 1e-15);
            seen.insert((inst.n_tx(), inst.w.ncols(), inst.sigma2.to_bits()));
        }
        assert_eq!(seen.len(), 18);
    }

    #[test]
    fn small_self_check_runs() {
        let rep = self_check(2, 20_000, 3).unwrap();
        assert_eq!(rep.by_quantity().len(), 15);
        // loose: small draw counts can miss a few entries
        assert!(rep.fraction() > 0.95, "{rep}");
    }
}
