use num_complex::Complex64;

use super::CVector;
use crate::{Error, Result};

/// Output magnitude per real axis, `sqrt(eta / 2)`.
#[inline]
pub fn quantizer_level(eta: f64) -> f64 {
    (eta / 2.0).sqrt()
}

#[inline]
fn sgn(v: f64) -> f64 {
    // sgn(0) = +1
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// 1-bit DAC: `sqrt(eta/2) * (sgn(Re x) + j sgn(Im x))` per entry.
pub fn quantize_1bit(x: &CVector, eta: f64) -> Result<CVector> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "quantizer scale must be positive, got {eta}"
        )));
    }
    let mut out = CVector::zeros(x.len());
    quantize_into(x.as_slice(), quantizer_level(eta), out.as_mut_slice());
    Ok(out)
}

/// Allocation-free quantizer for hot loops; `level` is `sqrt(eta/2)`.
#[inline]
pub fn quantize_into(x: &[Complex64], level: f64, out: &mut [Complex64]) {
    debug_assert_eq!(x.len(), out.len());
    for (o, v) in out.iter_mut().zip(x) {
        *o = Complex64::new(level * sgn(v.re), level * sgn(v.im));
    }
}
