use nalgebra::SVD;
use num_complex::Complex64;

use super::{CMatrix, CVector, RMatrix, RVector};
use crate::{Error, Result};

/// Real representation `[[Re A, -Im A], [Im A, Re A]]` of a complex matrix,
/// so that `[Re(Av); Im(Av)] = real_rep(A) * [Re v; Im v]`.
pub fn real_rep(a: &CMatrix) -> RMatrix {
    let (p, q) = a.shape();
    RMatrix::from_fn(2 * p, 2 * q, |i, j| {
        let z = a[(i % p, j % q)];
        match (i < p, j < q) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Stacks a complex vector as `[Re v; Im v]`.
pub fn stack_complex(v: &CVector) -> RVector {
    let n = v.len();
    RVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

/// Inverse of [`stack_complex`].
pub fn unstack_real(v: &RVector) -> CVector {
    let n = v.len() / 2;
    CVector::from_fn(n, |i, _| Complex64::new(v[i], v[i + n]))
}

/// `max |A - A^H| / max |A|`, zero for an exactly Hermitian matrix.
pub fn hermitian_asymmetry(a: &CMatrix) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if scale == 0.0 {
        return 0.0;
    }
    (a - a.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm())) / scale
}

fn real_asymmetry(s: &RMatrix) -> f64 {
    let scale = s.camax();
    if scale == 0.0 {
        return 0.0;
    }
    (s - s.transpose()).camax() / scale
}

/// Lower Cholesky factor of a real SPD matrix together with its log-determinant.
#[derive(Debug, Clone)]
pub struct CholFactor {
    pub l: RMatrix,
    pub logdet: f64,
    /// Diagonal loading that was added before the factorization succeeded.
    pub jitter: f64,
}

impl CholFactor {
    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Solves `L z = r` in place.
    pub fn whiten_mut(&self, r: &mut [f64]) {
        let n = self.dim();
        debug_assert_eq!(r.len(), n);
        for i in 0..n {
            let mut acc = r[i];
            for k in 0..i {
                acc -= self.l[(i, k)] * r[k];
            }
            r[i] = acc / self.l[(i, i)];
        }
    }

    /// `r^T S^{-1} r` through one triangular solve.
    pub fn quad_form(&self, r: &RVector) -> f64 {
        let mut z = r.as_slice().to_vec();
        self.whiten_mut(&mut z);
        z.iter().map(|v| v * v).sum()
    }

    pub fn reconstruct(&self) -> RMatrix {
        &self.l * self.l.transpose()
    }
}

fn cholesky_shifted(s: &RMatrix, shift: f64) -> std::result::Result<RMatrix, usize> {
    let n = s.nrows();
    let mut l = RMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)] + shift;
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(j);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut acc = s[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = acc / d;
        }
    }
    Ok(l)
}

/// Cholesky factorization with escalating diagonal jitter.
///
/// On failure the matrix is retried with `1e-12 * trace/dim * I`, growing
/// tenfold up to `1e-6 * trace/dim * I`.
pub fn chol_logdet(s: &RMatrix) -> Result<CholFactor> {
    let n = s.nrows();
    if n == 0 || s.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "cholesky needs a non-empty square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let asym = real_asymmetry(s);
    if asym > 1e-9 {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let base = s.trace() / n as f64;
    let mut jitter = 0.0;
    let mut exponent = -12;
    loop {
        match cholesky_shifted(s, jitter) {
            Ok(l) => {
                let logdet = 2.0 * (0..n).map(|i| l[(i, i)].ln()).sum::<f64>();
                return Ok(CholFactor { l, logdet, jitter });
            }
            Err(pivot) => {
                if exponent > -6 || !(base > 0.0) {
                    return Err(Error::Factorization { pivot, jitter });
                }
                jitter = base * 10f64.powi(exponent);
                exponent += 1;
            }
        }
    }
}

/// Leading right singular vectors of a matrix.
#[derive(Debug, Clone)]
pub struct TopSingular {
    /// `N x k`, orthonormal columns, ordered by singular value.
    pub vectors: CMatrix,
    /// Non-increasing.
    pub values: RVector,
}

/// The `k` principal right singular vectors of `h` (`M x N`).
///
/// Each column is rotated so its largest-magnitude entry is real positive.
pub fn svd_topk(h: &CMatrix, k: usize) -> Result<TopSingular> {
    let (m, n) = h.shape();
    if k == 0 || k > m.min(n) {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be in 1..={} for a {m}x{n} matrix",
            m.min(n)
        )));
    }
    let svd = SVD::new(h.clone(), false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut vectors = CMatrix::zeros(n, k);
    let mut values = RVector::zeros(k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        values[col] = svd.singular_values[idx];
        let mut pivot = 0;
        let mut best = -1.0;
        for j in 0..n {
            let mag = v_t[(idx, j)].norm();
            if mag > best * (1.0 + 1e-12) {
                best = mag;
                pivot = j;
            }
        }
        let p = v_t[(idx, pivot)].conj();
        let phase = if p.norm() > 0.0 { p.conj() / p.norm() } else { Complex64::new(1.0, 0.0) };
        for j in 0..n {
            vectors[(j, col)] = v_t[(idx, j)].conj() * phase;
        }
    }
    Ok(TopSingular { vectors, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{complex_normal, Purpose, SeededRng};
    use nalgebra::SymmetricEigen;

    fn random_cmatrix(m: usize, n: usize, seed: u64) -> CMatrix {
        let mut r = SeededRng::new(seed).stream(0, 0, Purpose::Oracle);
        CMatrix::from_fn(m, n, |_, _| complex_normal(&mut r, 1.0))
    }

    #[test]
    fn real_rep_matches_complex_product() {
        let a = random_cmatrix(3, 4, 1);
        let v = random_cmatrix(4, 1, 2).column(0).into_owned();
        let lhs = stack_complex(&(&a * &v));
        let rhs = real_rep(&a) * stack_complex(&v);
        assert!((lhs - rhs).camax() < 1e-12);
        assert_eq!(unstack_real(&stack_complex(&v)), v);
    }

    #[test]
    fn chol_identity_and_diagonal() {
        let f = chol_logdet(&RMatrix::identity(4, 4)).unwrap();
        assert_eq!(f.l, RMatrix::identity(4, 4));
        assert_eq!(f.logdet, 0.0);
        assert_eq!(f.jitter, 0.0);
        let f = chol_logdet(&RMatrix::from_diagonal(&RVector::from_vec(vec![2.0, 3.0]))).unwrap();
        assert!((f.logdet - 6f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn chol_reconstructs_random_spd() {
        let mut r = SeededRng::new(3).stream(0, 0, Purpose::Oracle);
        let a = RMatrix::from_fn(7, 7, |_, _| complex_normal(&mut r, 2.0).re);
        let s = a.transpose() * &a + RMatrix::identity(7, 7);
        let f = chol_logdet(&s).unwrap();
        let rel = (f.reconstruct() - &s).camax() / s.camax();
        assert!(rel < 1e-8);
        let det = s.clone().determinant();
        assert!((f.logdet - det.ln()).abs() < 1e-9);
        let v = RVector::from_fn(7, |i, _| i as f64 - 3.0);
        let direct = (v.transpose() * s.try_inverse().unwrap() * &v)[0];
        assert!((f.quad_form(&v) - direct).abs() < 1e-9 * direct.abs().max(1.0));
    }

    #[test]
    fn chol_jitter_rescues_semidefinite() {
        // rank one, PSD: needs loading
        let v = RVector::from_vec(vec![1.0, 2.0, 3.0]);
        let s = &v * v.transpose();
        let f = chol_logdet(&s).unwrap();
        assert!(f.jitter > 0.0 && f.jitter <= 1e-6 * s.trace() / 3.0);
    }

    #[test]
    fn chol_reports_failing_pivot() {
        let s = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        match chol_logdet(&s) {
            Err(Error::Factorization { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("unexpected {other:?}"),
        }
        let s = RMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(chol_logdet(&s), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn svd_ordering_on_diagonal_like() {
        let mut h = CMatrix::zeros(3, 4);
        h[(0, 2)] = Complex64::new(2.0, 0.0);
        h[(1, 0)] = Complex64::new(3.0, 0.0);
        h[(2, 3)] = Complex64::new(1.0, 0.0);
        let top = svd_topk(&h, 2).unwrap();
        assert!((top.values[0] - 3.0).abs() < 1e-12 && (top.values[1] - 2.0).abs() < 1e-12);
        let n1 = (&h * top.vectors.column(0)).norm();
        let n2 = (&h * top.vectors.column(1)).norm();
        assert!(n1 >= n2);
        assert!((top.vectors[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((top.vectors[(2, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn svd_unitary_tie() {
        let u = random_cmatrix(4, 4, 9).qr().q();
        let top = svd_topk(&u, 1).unwrap();
        assert!(((&u * top.vectors.column(0)).norm() - 1.0).abs() < 1e-10);
        assert!((top.vectors.column(0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn svd_rejects_large_k() {
        let h = random_cmatrix(2, 5, 4);
        assert!(svd_topk(&h, 3).is_err());
        assert!(svd_topk(&h, 0).is_err());
    }

    #[test]
    fn svd_matches_gram_eigenvectors() {
        let h = random_cmatrix(8, 16, 5);
        let k = 4;
        let top = svd_topk(&h, k).unwrap();
        let w = &top.vectors;
        assert!((w.adjoint() * w - CMatrix::identity(k, k)).camax() < 1e-10);

        let gram = h.adjoint() * &h;
        let eig = SymmetricEigen::new(gram);
        let mut idx: Vec<usize> = (0..16).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        for (col, &e) in idx.iter().take(k).enumerate() {
            assert!((eig.eigenvalues[e].sqrt() - top.values[col]).abs() < 1e-9);
            // equal up to a unit-modulus phase
            let v = eig.eigenvectors.column(e);
            let ip = v.dotc(&w.column(col));
            assert!((ip.norm() - 1.0).abs() < 1e-9, "column {col}: |<v,w>| = {}", ip.norm());
        }
        for i in 1..k {
            assert!(top.values[i] <= top.values[i - 1]);
        }
    }
}
