//! Numeric building blocks shared by every other module.

mod constellation;
mod erf;
mod linalg;
mod quantizer;
mod rng;

pub use constellation::Constellation;
pub use erf::{erf_complex, erf_real};
pub use linalg::{
    chol_logdet, hermitian_asymmetry, real_rep, stack_complex, svd_topk, unstack_real,
    CholFactor, TopSingular,
};
pub use quantizer::{quantize_1bit, quantize_into, quantizer_level};
pub use rng::{complex_normal, Purpose, SeededRng, StreamRng};

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

/// Selects the real or imaginary part of a complex quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Re,
    Im,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::Re, Axis::Im];

    #[inline]
    pub fn part(self, z: Complex64) -> f64 {
        match self {
            Axis::Re => z.re,
            Axis::Im => z.im,
        }
    }

    /// Block offset of this axis in a `[Re; Im]` stacked vector of length `2n`.
    #[inline]
    pub fn offset(self, n: usize) -> usize {
        match self {
            Axis::Re => 0,
            Axis::Im => n,
        }
    }

    /// Kronecker delta between two axis selectors.
    #[inline]
    pub fn delta(self, other: Axis) -> f64 {
        if self == other {
            1.0
        } else {
            0.0
        }
    }
}

/// Extracts the `(a, b)` axis block of a `2n x 2n` stacked real matrix.
pub fn axis_block(stacked: &RMatrix, a: Axis, b: Axis) -> RMatrix {
    let n = stacked.nrows() / 2;
    stacked
        .view((a.offset(n), b.offset(n)), (n, n))
        .into_owned()
}

/// Converts dBm to linear power, taking a unit-power transmit signal as 1 W.
pub fn dbm_to_linear(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_mapping() {
        assert_eq!(dbm_to_linear(30.0), 1.0);
        assert!((dbm_to_linear(0.0) - 1e-3).abs() < 1e-18);
        assert!((dbm_to_linear(2.0) - 1.584_893_192_461_113_5e-3).abs() < 1e-15);
    }

    #[test]
    fn axis_delta() {
        assert_eq!(Axis::Re.delta(Axis::Re), 1.0);
        assert_eq!(Axis::Re.delta(Axis::Im), 0.0);
        assert_eq!(Axis::Im.offset(4), 4);
    }
}
