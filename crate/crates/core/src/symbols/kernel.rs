use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Truncated reproducing kernel `k_ω(z) = 1/(1 − ω̄z) = Σ ω̄ⁿ zⁿ` of the Hardy space.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelVector {
    omega: Complex64,
    coeffs: DVector<Complex64>,
}

impl KernelVector {
    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DVector<Complex64> {
        self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn normalized(&self) -> DVector<Complex64> {
        self.coeffs.unscale(self.norm())
    }

    /// `(1 − |ω|^{2N})/(1 − |ω|²)`: squared norm of the length-`N` truncation.
    pub fn truncated_norm_sq(omega: Complex64, n: usize) -> f64 {
        let r2 = omega.norm_sqr();
        (1.0 - r2.powi(n as i32)) / (1.0 - r2)
    }

    /// `1/(1 − |ω|²)`, the squared norm of the full kernel.
    pub fn full_norm_sq(omega: Complex64) -> f64 {
        1.0 / (1.0 - omega.norm_sqr())
    }

    /// Bound on the gap between truncated and full squared norm: `|ω|^{2N}/(1 − |ω|²)`.
    pub fn tail_bound(omega: Complex64, n: usize) -> f64 {
        let r2 = omega.norm_sqr();
        r2.powi(n as i32) / (1.0 - r2)
    }
}

/// Coefficients `conj(ω)ⁿ` for `n < N`.
pub fn kernel_vector(omega: Complex64, n: usize) -> Result<KernelVector> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if !(omega.norm() < 1.0) {
        return Err(Error::KernelDomain(omega.norm()));
    }
    Ok(KernelVector { omega, coeffs: geometric(omega.conj(), n) })
}

/// `(1, q, q², …)` of length `n`, by repeated multiplication.
pub(crate) fn geometric(q: Complex64, n: usize) -> DVector<Complex64> {
    let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
    let mut p = Complex64::new(1.0, 0.0);
    for k in 0..n {
        v[k] = p;
        p *= q;
    }
    v
}
