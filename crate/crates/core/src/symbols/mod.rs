//! Laurent-polynomial symbols, their Toeplitz finite sections, and Hardy-space
//! reproducing kernels.
//!
//! The matrix of `T_f` in the basis `{e₀, e₁, …}` has entry `(m, n) = c_{m−n}`,
//! so positive indices of `f` fill subdiagonals and powers of `z̄` fill
//! superdiagonals. A finite section is the compression `P_N T_f P_N`.

mod family;
mod kernel;
mod laurent;
mod truncated;

pub use family::{Family, FamilyParams};
pub use kernel::{kernel_vector, KernelVector};
pub use laurent::{parse_complex, LaurentSymbol};
pub use truncated::{BuildMode, Provenance, TruncatedOperator};

pub(crate) use kernel::geometric;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `N×N` finite section of `T_f`.
pub fn toeplitz_matrix(f: &LaurentSymbol, n: usize) -> Result<TruncatedOperator> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut m = DMatrix::zeros(n, n);
    for (k, c) in f.terms() {
        let shift = k.unsigned_abs() as usize;
        if shift >= n {
            continue;
        }
        for j in 0..n - shift {
            if k >= 0 {
                m[(j + shift, j)] = c;
            } else {
                m[(j, j + shift)] = c;
            }
        }
    }
    TruncatedOperator::new(m, Provenance::Toeplitz { symbol: f.clone() })
}

/// Taylor coefficients `h₀ … h_{n−1}` of `1/g` for analytic `g` with `g(0) ≠ 0`.
///
/// Computed by the recurrence `h_k = −(Σ_{j=1..k} g_j h_{k−j}) / g₀`; for
/// `g = 1 + βz` this is exactly repeated multiplication by `−β`.
pub fn reciprocal_series(g: &LaurentSymbol, n: usize) -> Result<Vec<Complex64>> {
    g.require_analytic()?;
    let g0 = g.coeff(0);
    if g0 == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularSymbol);
    }
    let higher: Vec<(usize, Complex64)> = g.terms().filter(|&(k, _)| k > 0).map(|(k, c)| (k as usize, c)).collect();
    let mut h = Vec::with_capacity(n);
    let inv0 = g0.inv();
    for k in 0..n {
        if k == 0 {
            h.push(inv0);
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &(j, gj) in &higher {
            if j <= k {
                acc += gj * h[k - j];
            }
        }
        h.push(-acc * inv0);
    }
    Ok(h)
}

/// `N×N` truncation of `T_{1/g}`, the exact inverse of the lower-triangular
/// `toeplitz_matrix(g, N)`.
pub fn analytic_toeplitz_inverse(g: &LaurentSymbol, n: usize) -> Result<TruncatedOperator> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    g.require_analytic()?;
    if g.upper_bandwidth() == 0 && g.lower_bandwidth() == 1 {
        let g0 = g.coeff(0);
        if g0 != Complex64::new(0.0, 0.0) {
            let ratio = (g.coeff(1) / g0).norm();
            if ratio >= 1.0 {
                return Err(Error::NonInvertibleSymbol(ratio));
            }
        }
    }
    let h = reciprocal_series(g, n)?;
    let m = DMatrix::from_fn(n, n, |i, j| if i >= j { h[i - j] } else { Complex64::new(0.0, 0.0) });
    TruncatedOperator::new(m, Provenance::AnalyticInverse { symbol: g.clone() })
}

/// `‖T_g* k_ω − conj(g(ω)) k_ω‖` on the `N`-truncation.
///
/// Only the last `deg(g)` rows of the truncated adjoint miss part of the
/// kernel, so the residual is of order `|ω|^{N − deg g}`.
pub fn apply_adjoint_kernel_check(g: &LaurentSymbol, omega: Complex64, n: usize) -> Result<f64> {
    g.require_analytic()?;
    let k = kernel_vector(omega, n)?;
    let tg = toeplitz_matrix(g, n)?;
    let lhs: DVector<Complex64> = tg.data().adjoint() * k.coeffs();
    let rhs = k.coeffs() * g.eval(omega).conj();
    Ok((lhs - rhs).norm())
}
