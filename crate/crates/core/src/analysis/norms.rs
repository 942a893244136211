use nalgebra::DMatrix;

use super::{BoundReport, Quantity};
use crate::error::{Error, Result};
use crate::linalg::{largest_singular_value, LinearMap, NormEstimate, PowerMap, C64};
use crate::operators::StructuredOperator;
use crate::rng::Lcg;
use crate::symbols::TruncatedOperator;

/// Seed of every Lanczos start vector.
pub const NORM_SEED: u64 = 0;

/// Largest dimension for which slow Lanczos falls back to a full SVD.
pub const DENSE_FALLBACK_DIM: usize = 512;

/// Power-bound iterations stop once `‖Aⁿ‖` exceeds this.
pub const OVERFLOW_GUARD: f64 = 1e12;

/// Largest singular value of an arbitrary linear map, with SVD fallback.
pub fn norm_of(m: &(impl LinearMap + ?Sized), tol: f64) -> Result<NormEstimate> {
    let est = largest_singular_value(m, tol, NORM_SEED);
    if est.converged {
        return Ok(est);
    }
    if m.dim() <= DENSE_FALLBACK_DIM {
        let value = m.to_dense().singular_values().max();
        return Ok(NormEstimate { value, converged: true, iterations: est.iterations });
    }
    Err(Error::NoConvergence { best: est.value })
}

/// `σ_max(M)` within relative `tol`.
pub fn operator_norm(m: &TruncatedOperator, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Invalid("norm tolerance must be positive".into()));
    }
    Ok(norm_of(m.data(), tol)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralRadius {
    pub value: f64,
    /// False when the estimate is only indicative.
    pub converged: bool,
}

/// Largest eigenvalue modulus.
///
/// A power iteration of `N + 1` steps first detects nilpotent matrices
/// exactly (the iterate vanishes). Otherwise the eigenvalues of a Schur
/// decomposition are used for `N ≤ 512`, and a windowed growth-rate power
/// iteration beyond that. Accuracy is advisory: defective spectra are
/// ill-conditioned.
pub fn spectral_radius(m: &TruncatedOperator) -> SpectralRadius {
    let s = StructuredOperator::from_operator(m);
    let n = m.dim();
    let mut x = Lcg::new(NORM_SEED).complex_vec(n);
    for _ in 0..=n {
        x = s.apply(&x);
        let nx = crate::linalg::norm2(&x);
        if nx == 0.0 {
            return SpectralRadius { value: 0.0, converged: true };
        }
        x.iter_mut().for_each(|z| *z /= nx);
    }
    if n <= DENSE_FALLBACK_DIM {
        if let Some(eig) = m.data().clone().try_schur(1e-14, 100_000).and_then(|s| s.eigenvalues()) {
            let value = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
            return SpectralRadius { value, converged: true };
        }
    }
    // windowed log-growth of ‖Aᵏx‖
    let window = 200;
    let mut prev = f64::NAN;
    for _round in 0..50 {
        let mut log_growth = 0.0;
        for _ in 0..window {
            x = s.apply(&x);
            let nx = crate::linalg::norm2(&x);
            if nx == 0.0 {
                return SpectralRadius { value: 0.0, converged: true };
            }
            log_growth += nx.ln();
            x.iter_mut().for_each(|z| *z /= nx);
        }
        let est = (log_growth / window as f64).exp();
        if (est - prev).abs() <= 1e-8 * est {
            return SpectralRadius { value: est, converged: true };
        }
        prev = est;
    }
    SpectralRadius { value: prev, converged: false }
}

/// `max_{0 ≤ n ≤ n_max} ‖Aⁿ‖`.
pub fn power_bound(a: &TruncatedOperator, n_max: usize, tol: f64) -> Result<BoundReport> {
    power_bound_of(&StructuredOperator::from_operator(a), n_max, tol)
}

/// [`power_bound`] for an operator in structured form.
///
/// Dense operators are powered by repeated multiplication with the running
/// matrix kept at unit scale and the scale tracked separately; structured
/// ones apply `Aⁿ` matrix-free. The argmax is exterior when `‖A^{n_max}‖`
/// still exceeds every earlier norm by more than `tol`; the estimate then
/// counts as unconverged.
pub fn power_bound_of(s: &StructuredOperator, n_max: usize, tol: f64) -> Result<BoundReport> {
    if n_max == 0 {
        return Err(Error::Invalid("n_max must be at least 1".into()));
    }
    let mut norms = vec![1.0];
    let mut all_converged = true;
    let mut overflow = false;
    match s {
        StructuredOperator::Dense(a) => {
            let n = a.nrows();
            let mut p = DMatrix::<C64>::identity(n, n);
            let mut log_scale = 0.0f64;
            for _ in 1..=n_max {
                p = a * &p;
                let est = norm_of(&p, tol)?;
                let value = est.value * log_scale.exp();
                norms.push(value);
                if value > OVERFLOW_GUARD {
                    overflow = true;
                    break;
                }
                if est.value == 0.0 {
                    norms.resize(n_max + 1, 0.0);
                    break;
                }
                p.unscale_mut(est.value);
                log_scale += est.value.ln();
            }
        }
        _ => {
            for k in 1..=n_max {
                let est = norm_of(&PowerMap { base: s, power: k }, tol);
                let est = match est {
                    Ok(e) => e,
                    Err(Error::NoConvergence { best }) => {
                        all_converged = false;
                        NormEstimate { value: best, converged: false, iterations: 0 }
                    }
                    Err(e) => return Err(e),
                };
                norms.push(est.value);
                if est.value > OVERFLOW_GUARD {
                    overflow = true;
                    break;
                }
                if est.value == 0.0 {
                    norms.resize(n_max + 1, 0.0);
                    break;
                }
            }
        }
    }

    let (argmax, value) = norms
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
    let earlier = norms[..norms.len() - 1].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exterior = !overflow && *norms.last().unwrap() > earlier * (1.0 + tol.max(1e-6));
    let converged = all_converged && !exterior && !overflow;
    let mut r = BoundReport::new(Quantity::M, value, converged)
        .with_diagnostic("n_max", n_max)
        .with_diagnostic("argmax_interior", !exterior)
        .with_diagnostic("power_bounded", !overflow)
        .with_diagnostic("norm_tol", tol);
    r.argmax_n = Some(argmax);
    r.series = norms;
    Ok(r)
}
