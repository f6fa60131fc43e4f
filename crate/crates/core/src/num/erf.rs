use num_complex::Complex64;

/// Real error function, `(2/sqrt(pi)) * int_0^t exp(-u^2) du`.
#[inline]
pub fn erf_real(t: f64) -> f64 {
    libm::erf(t)
}

/// Axis-wise error function: `erf(Re z) + j erf(Im z)`.
///
/// This is not the analytic continuation of `erf`; it is the per-axis form
/// that appears in the moments of a 1-bit quantized complex Gaussian.
#[inline]
pub fn erf_complex(z: Complex64) -> Complex64 {
    Complex64::new(erf_real(z.re), erf_real(z.im))
}
