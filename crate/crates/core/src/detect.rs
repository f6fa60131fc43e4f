//! Data detection: the Gaussian-likelihood ML detector over all candidate
//! symbol vectors, and the Bussgang LMMSE (BLMMSE) linear receiver.

use nalgebra::Cholesky;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::num::{stack_complex, CMatrix, CVector, Constellation, RMatrix};
use crate::stats::{symbol_stats_for_x, SymbolStats};
use crate::txchain::TxConfig;
use crate::{Error, Result};

/// Detected per-stream constellation indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorResult {
    pub indices: Vec<usize>,
    /// ML objective, or squared slicing distance for the linear receiver.
    pub score: f64,
}

/// Statistics of every hypothesis `s in S^K` for one channel realization.
///
/// Candidate `c` has stream `k` set to constellation point
/// `(c / L^(K-1-k)) % L`, i.e. stream 0 is the most significant digit.
#[derive(Debug, Clone)]
pub struct CandidateTable {
    pub constellation: Constellation,
    pub n_streams: usize,
    pub entries: Vec<SymbolStats>,
}

/// Default ceiling on `L^K`.
pub const DEFAULT_MAX_CANDIDATES: usize = 1_000_000;

pub fn candidate_count(constellation_size: usize, n_streams: usize) -> Option<usize> {
    constellation_size.checked_pow(n_streams as u32)
}

impl CandidateTable {
    pub fn build(
        h: &CMatrix,
        w: &CMatrix,
        cfg: &TxConfig,
        rho: f64,
        max_candidates: usize,
    ) -> Result<Self> {
        let k = w.ncols();
        let l = cfg.constellation.len();
        let count = candidate_count(l, k)
            .filter(|&c| c <= max_candidates)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "{l}^{k} candidates exceeds the table cap of {max_candidates}"
                ))
            })?;
        let entries = (0..count)
            .into_par_iter()
            .map(|c| {
                let s = Self::symbols_of(&cfg.constellation, k, c);
                symbol_stats_for_x(h, &(w * s), cfg.sigma2, cfg.eta, rho)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { constellation: cfg.constellation.clone(), n_streams: k, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        digits(self.constellation.len(), self.n_streams, index)
    }

    pub fn symbols_of(constellation: &Constellation, k: usize, index: usize) -> CVector {
        let d = digits(constellation.len(), k, index);
        CVector::from_iterator(k, d.into_iter().map(|i| constellation.point(i)))
    }

    pub fn index_of(&self, indices: &[usize]) -> usize {
        indices.iter().fold(0, |acc, &d| acc * self.constellation.len() + d)
    }
}

fn digits(l: usize, k: usize, mut index: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = index % l;
        index /= l;
    }
    out
}

/// ML detection of one received vector.
pub fn ml_detect(y: &CVector, table: &CandidateTable) -> Result<DetectorResult> {
    let first = table
        .entries
        .first()
        .ok_or_else(|| Error::InvalidParameter("candidate table is empty".into()))?;
    if y.len() * 2 != first.mu_y.len() {
        return Err(Error::DimensionMismatch(format!(
            "y has {} entries, table expects {}",
            y.len(),
            first.mu_y.len() / 2
        )));
    }
    let ys = stack_complex(y);
    let mut best = (0, f64::INFINITY);
    for (c, st) in table.entries.iter().enumerate() {
        let v = st.objective(&ys);
        if v < best.1 {
            best = (c, v);
        }
    }
    Ok(DetectorResult { indices: table.digits(best.0), score: best.1 })
}

/// ML detection of a batch; column `j` of `y_stacked` is `[Re y_j; Im y_j]`.
///
/// Same decisions as calling [`ml_detect`] per column, but each candidate's
/// triangular solve runs once over the whole batch.
pub fn ml_detect_batch(y_stacked: &RMatrix, table: &CandidateTable) -> Result<Vec<DetectorResult>> {
    let first = table
        .entries
        .first()
        .ok_or_else(|| Error::InvalidParameter("candidate table is empty".into()))?;
    if y_stacked.nrows() != first.mu_y.len() {
        return Err(Error::DimensionMismatch(format!(
            "batch rows {} != {}",
            y_stacked.nrows(),
            first.mu_y.len()
        )));
    }
    let b = y_stacked.ncols();
    let mut best_c = vec![0usize; b];
    let mut best_v = vec![f64::INFINITY; b];
    let mut r = y_stacked.clone();
    for (c, st) in table.entries.iter().enumerate() {
        r.copy_from(y_stacked);
        for mut col in r.column_iter_mut() {
            col -= &st.mu_y;
        }
        st.chol.l.solve_lower_triangular_mut(&mut r);
        for (j, col) in r.column_iter().enumerate() {
            let v = col.norm_squared() + st.chol.logdet;
            if v < best_v[j] {
                best_v[j] = v;
                best_c[j] = c;
            }
        }
    }
    Ok(best_c
        .into_iter()
        .zip(best_v)
        .map(|(c, v)| DetectorResult { indices: table.digits(c), score: v })
        .collect())
}

/// `V = sqrt(rho) C_y^{-1} H B W` with `C_y = rho H C_xq H^H + I`.
pub fn blmmse_combiner(
    h: &CMatrix,
    w: &CMatrix,
    b: &CMatrix,
    c_xq: &CMatrix,
    rho: f64,
) -> Result<CMatrix> {
    let m = h.nrows();
    let mut c_y = h * c_xq * h.adjoint() * Complex64::new(rho, 0.0);
    for i in 0..m {
        c_y[(i, i)] += 1.0;
    }
    // force exact Hermitian symmetry before factoring
    let c_y = (&c_y + c_y.adjoint()) * Complex64::new(0.5, 0.0);
    let chol = Cholesky::new(c_y)
        .ok_or(Error::Factorization { pivot: 0, jitter: 0.0 })?;
    let rhs = h * b * w * Complex64::new(rho.sqrt(), 0.0);
    Ok(chol.solve(&rhs))
}

/// Per-stream nearest-point slicing; ties go to the lowest index.
pub fn slice_min_distance(s_hat: &CVector, constellation: &Constellation) -> DetectorResult {
    let mut score = 0.0;
    let indices = s_hat
        .iter()
        .map(|&z| {
            let i = constellation.nearest(z);
            score += (z - constellation.point(i)).norm_sqr();
            i
        })
        .collect();
    DetectorResult { indices, score }
}

/// Linear BLMMSE receiver followed by slicing.
#[derive(Debug, Clone)]
pub struct BlmmseDetector {
    pub combiner: CMatrix,
    pub constellation: Constellation,
}

impl BlmmseDetector {
    pub fn build(h: &CMatrix, w: &CMatrix, cfg: &TxConfig, rho: f64) -> Result<Self> {
        let c_xd = crate::txchain::cov_xd(w, cfg.sigma2);
        let b = crate::txchain::bussgang_gain(&c_xd, cfg.eta)?;
        let c_xq = crate::txchain::cov_xq_unconditional(&c_xd, cfg.eta)?;
        Ok(Self {
            combiner: blmmse_combiner(h, w, &b, &c_xq, rho)?,
            constellation: cfg.constellation.clone(),
        })
    }

    pub fn soft_estimate(&self, y: &CVector) -> CVector {
        self.combiner.adjoint() * y
    }

    pub fn detect(&self, y: &CVector) -> DetectorResult {
        slice_min_distance(&self.soft_estimate(y), &self.constellation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{complex_normal, Purpose, RVector, SeededRng};
    use crate::stats::symbol_stats_for_x;

    fn random_c(m: usize, n: usize, v: f64, seed: u64) -> CMatrix {
        let mut r = SeededRng::new(seed).stream(0, 0, Purpose::Oracle);
        CMatrix::from_fn(m, n, |_, _| complex_normal(&mut r, v))
    }

    #[test]
    fn digit_layout() {
        assert_eq!(digits(16, 3, 0), vec![0, 0, 0]);
        assert_eq!(digits(16, 3, 16 * 16 * 2 + 16 * 5 + 7), vec![2, 5, 7]);
        assert_eq!(candidate_count(16, 3), Some(4096));
    }

    #[test]
    fn single_point_constellation() {
        let h = random_c(2, 4, 1.0, 1);
        let w = crate::channel::make_precoder(&h, 1).unwrap();
        let cfg = TxConfig::new(4, 0.1, Constellation::single()).unwrap();
        let table = CandidateTable::build(&h, &w, &cfg, 3.0, 10).unwrap();
        assert_eq!(table.len(), 1);
        let y = random_c(2, 1, 1.0, 2).column(0).into_owned();
        let r = ml_detect(&y, &table).unwrap();
        assert_eq!(r.indices, vec![0]);
        assert_eq!(r.score, table.entries[0].objective(&stack_complex(&y)));
    }

    #[test]
    fn table_cap_enforced() {
        let h = random_c(2, 4, 1.0, 1);
        let w = crate::channel::make_precoder(&h, 2).unwrap();
        let cfg = TxConfig::new(4, 0.1, Constellation::qam16()).unwrap();
        assert!(CandidateTable::build(&h, &w, &cfg, 3.0, 255).is_err());
    }

    #[test]
    fn empty_table_rejected() {
        let table = CandidateTable { constellation: Constellation::qam16(), n_streams: 1, entries: vec![] };
        assert!(ml_detect(&CVector::zeros(2), &table).is_err());
    }

    #[test]
    fn mean_of_candidate_wins_with_shared_covariance() {
        let h = random_c(2, 3, 1.0, 4);
        let x = random_c(3, 1, 0.3, 5).column(0).into_owned();
        let a = symbol_stats_for_x(&h, &x, 0.1, 1.0 / 3.0, 2.0).unwrap();
        let mut b = a.clone();
        b.mu_y = &a.mu_y + RVector::from_element(4, 0.3);
        let table = CandidateTable { constellation: Constellation::bpsk(), n_streams: 1, entries: vec![b, a.clone()] };
        let y = crate::num::unstack_real(&a.mu_y);
        assert_eq!(ml_detect(&y, &table).unwrap().indices, vec![1]);
    }

    #[test]
    fn batch_matches_single() {
        let h = random_c(3, 8, 1.0, 6);
        let w = crate::channel::make_precoder(&h, 1).unwrap();
        let cfg = TxConfig::new(8, 0.02, Constellation::qam16()).unwrap();
        let table = CandidateTable::build(&h, &w, &cfg, 3.0, 100).unwrap();
        let ys = random_c(3, 40, 1.0, 7);
        let stacked = RMatrix::from_fn(6, 40, |i, j| if i < 3 { ys[(i, j)].re } else { ys[(i - 3, j)].im });
        let batch = ml_detect_batch(&stacked, &table).unwrap();
        for j in 0..40 {
            let single = ml_detect(&ys.column(j).into_owned(), &table).unwrap();
            assert_eq!(single.indices, batch[j].indices);
            assert!((single.score - batch[j].score).abs() < 1e-9 * single.score.abs().max(1.0));
        }
    }

    #[test]
    fn logdet_shift_does_not_change_decisions() {
        let h = random_c(2, 8, 1.0, 8);
        let w = crate::channel::make_precoder(&h, 1).unwrap();
        let cfg = TxConfig::new(8, 0.05, Constellation::qam16()).unwrap();
        let table = CandidateTable::build(&h, &w, &cfg, 3.0, 100).unwrap();
        let mut shifted = table.clone();
        for e in &mut shifted.entries {
            e.chol.logdet += 7.0;
        }
        let ys = random_c(2, 200, 1.0, 9);
        for j in 0..200 {
            let y = ys.column(j).into_owned();
            assert_eq!(ml_detect(&y, &table).unwrap().indices, ml_detect(&y, &shifted).unwrap().indices);
        }
    }

    #[test]
    fn slicer_behaviour() {
        let c = Constellation::qam16();
        let s = CVector::from_vec(vec![c.point(9), Complex64::new(0.0, 0.0)]);
        let r = slice_min_distance(&s, &c);
        assert_eq!(r.indices, vec![9, 5]);
        let mut rng = SeededRng::new(3).stream(0, 0, Purpose::Oracle);
        for _ in 0..1000 {
            let z = complex_normal(&mut rng, 2.0);
            let got = slice_min_distance(&CVector::from_element(1, z), &c).indices[0];
            let exhaustive = (0..16)
                .min_by(|&a, &b| (z - c.point(a)).norm_sqr().total_cmp(&(z - c.point(b)).norm_sqr()))
                .unwrap();
            assert_eq!(got, exhaustive);
        }
    }

    #[test]
    fn blmmse_zero_snr() {
        let h = random_c(3, 6, 1.0, 10);
        let w = crate::channel::make_precoder(&h, 2).unwrap();
        let cfg = TxConfig::new(6, 0.1, Constellation::qam16()).unwrap();
        let det = BlmmseDetector::build(&h, &w, &cfg, 0.0).unwrap();
        assert_eq!(det.combiner.camax(), 0.0);
    }

    #[test]
    fn blmmse_high_snr_scaling() {
        // square, well conditioned: V(rho) ~ (H C_xq H^H)^{-1} H B W / sqrt(rho)
        let n = 3;
        let h = random_c(n, n, 1.0, 11) + CMatrix::identity(n, n) * Complex64::new(3.0, 0.0);
        let w = crate::channel::make_precoder(&h, n).unwrap();
        let cfg = TxConfig::new(n, 0.1, Constellation::qam16()).unwrap();
        let rho = 1e6;
        let v1 = BlmmseDetector::build(&h, &w, &cfg, rho).unwrap().combiner;
        let v2 = BlmmseDetector::build(&h, &w, &cfg, 100.0 * rho).unwrap().combiner;
        let ratio = (v2 * Complex64::new(10.0, 0.0) - &v1).camax() / v1.camax();
        assert!(ratio < 1e-4, "ratio {ratio}");
    }
}
