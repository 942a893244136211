use nalgebra::{DMatrix, SymmetricEigen};

use super::{dot, norm2, LinearMap, C64};
use crate::rng::Lcg;

/// Result of a largest-singular-value iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    /// `√θ` for the largest Ritz value `θ` of `M*M`. Never exceeds `‖M‖`
    /// beyond rounding.
    pub value: f64,
    pub converged: bool,
    /// Number of `M*M` applications.
    pub iterations: usize,
}

const KRYLOV_DIM: usize = 40;
const MAX_RESTARTS: usize = 25;

/// Largest singular value of `m` by Lanczos iteration on `M*M` with full
/// reorthogonalization and explicit restarts from the best Ritz vector.
///
/// The start vector is drawn from the seeded LCG, so repeated calls are
/// bit-identical. Convergence is declared when the Ritz residual `r` drops
/// below `tol·θ`.
pub fn largest_singular_value(m: &(impl LinearMap + ?Sized), tol: f64, seed: u64) -> NormEstimate {
    largest_singular_value_within(m, tol, seed, MAX_RESTARTS)
}

/// [`largest_singular_value`] capped at `max_restarts` Krylov cycles.
///
/// When the top singular values cluster tightly the residual test can take
/// hundreds of iterations; an unconverged result is still a Ritz value and
/// hence a lower bound on `‖M‖`.
pub fn largest_singular_value_within(
    m: &(impl LinearMap + ?Sized),
    tol: f64,
    seed: u64,
    max_restarts: usize,
) -> NormEstimate {
    let n = m.dim();
    if n == 0 {
        return NormEstimate { value: 0.0, converged: true, iterations: 0 };
    }
    let mut rng = Lcg::new(seed);
    let mut start = rng.complex_vec(n);
    let mut iterations = 0;
    let mut best = 0.0f64;
    let kmax = n.min(KRYLOV_DIM);

    for _restart in 0..max_restarts.max(1) {
        let s = norm2(&start);
        if s == 0.0 {
            return NormEstimate { value: 0.0, converged: true, iterations };
        }
        start.iter_mut().for_each(|z| *z /= s);

        let mut basis: Vec<Vec<C64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(kmax);
        let mut beta: Vec<f64> = Vec::with_capacity(kmax);
        let mut ritz = (0.0, Vec::new());

        for j in 0..kmax {
            let mv = m.apply(&basis[j]);
            iterations += 1;
            let mut w = m.apply_adjoint(&mv);
            if j > 0 {
                let bp = beta[j - 1];
                for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= vi * bp;
                }
            }
            let a = dot(&w, &basis[j]).re;
            for (wi, vi) in w.iter_mut().zip(&basis[j]) {
                *wi -= vi * a;
            }
            alpha.push(a);
            // full reorthogonalization, repeated only on heavy cancellation
            let mut b = norm2(&w);
            for _pass in 0..2 {
                let before = b;
                for v in &basis {
                    let h = dot(&w, v);
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi -= h * vi;
                    }
                }
                b = norm2(&w);
                if b > 0.7 * before {
                    break;
                }
            }

            let (theta, vec) = top_ritz_pair(&alpha, &beta);
            let theta = theta.max(0.0);
            best = best.max(theta);
            let residual = b * vec[j].abs();
            ritz = (theta, vec);

            // Residual test only: the gap between Ritz values can badly
            // overstate the true gap when the top singular values cluster.
            let exhausted = b <= 1e-14 * theta.max(f64::MIN_POSITIVE) || j + 1 == n;
            if theta == 0.0 && exhausted {
                return NormEstimate { value: 0.0, converged: true, iterations };
            }
            if residual <= tol * theta || exhausted {
                return NormEstimate { value: best.sqrt(), converged: true, iterations };
            }
            if j + 1 < kmax {
                beta.push(b);
                basis.push(w.into_iter().map(|z| z / b).collect());
            }
        }

        // restart from the current Ritz vector
        let (_, y) = &ritz;
        let mut next = vec![C64::new(0.0, 0.0); n];
        for (coef, v) in y.iter().zip(&basis) {
            for (ni, vi) in next.iter_mut().zip(v) {
                *ni += vi * *coef;
            }
        }
        start = next;
    }
    NormEstimate { value: best.sqrt(), converged: false, iterations }
}

/// Largest eigenpair of the symmetric tridiagonal matrix with diagonal `alpha`
/// and off-diagonal `beta`: Sturm bisection for the eigenvalue, then inverse
/// iteration for the vector. Falls back to a dense eigensolver if the
/// inverse iteration breaks down.
fn top_ritz_pair(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    if k == 1 {
        return (alpha[0], vec![1.0]);
    }
    let theta = top_eigenvalue(alpha, beta);
    let scale = alpha.iter().chain(beta).fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let shift = theta + 1e-13 * scale;
    let mut y = vec![1.0; k];
    for _ in 0..3 {
        match tridiagonal_solve(alpha, beta, shift, &y) {
            Some(z) => {
                let nz = z.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(nz.is_finite() && nz > 0.0) {
                    return dense_top_pair(alpha, beta);
                }
                y = z.into_iter().map(|x| x / nz).collect();
            }
            None => return dense_top_pair(alpha, beta),
        }
    }
    (theta, y)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..alpha.len() {
        let off = if i == 0 { 0.0 } else { beta[i - 1] * beta[i - 1] / d };
        d = alpha[i] - x - off;
        if d == 0.0 {
            d = -f64::EPSILON * (alpha[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn top_eigenvalue(alpha: &[f64], beta: &[f64]) -> f64 {
    let k = alpha.len();
    let radius = |i: usize| {
        let l = if i > 0 { beta[i - 1].abs() } else { 0.0 };
        let r = if i + 1 < k { beta[i].abs() } else { 0.0 };
        l + r
    };
    let mut lo = (0..k).map(|i| alpha[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..k).map(|i| alpha[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    while hi - lo > 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alpha, beta, mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Solves `(T − σI) z = y` by Gaussian elimination with partial pivoting.
fn tridiagonal_solve(alpha: &[f64], beta: &[f64], sigma: f64, y: &[f64]) -> Option<Vec<f64>> {
    let k = alpha.len();
    // rows hold (sub, diag, sup, sup2) after pivoting
    let mut diag: Vec<f64> = alpha.iter().map(|a| a - sigma).collect();
    let mut sup: Vec<f64> = (0..k).map(|i| if i + 1 < k { beta[i] } else { 0.0 }).collect();
    let mut sup2 = vec![0.0; k];
    let mut rhs = y.to_vec();
    for i in 0..k - 1 {
        let sub = beta[i];
        if sub.abs() > diag[i].abs() {
            // swap rows i and i+1
            let (d1, s1, t1) = (diag[i], sup[i], sup2[i]);
            diag[i] = sub;
            sup[i] = diag[i + 1];
            sup2[i] = sup[i + 1];
            let (nd, ns, nt) = (s1, t1, 0.0);
            rhs.swap(i, i + 1);
            let l = d1 / sub;
            diag[i + 1] = nd - l * sup[i];
            sup[i + 1] = ns - l * sup2[i];
            sup2[i + 1] = nt;
            rhs[i + 1] -= l * rhs[i];
        } else {
            if diag[i] == 0.0 {
                return None;
            }
            let l = sub / diag[i];
            diag[i + 1] -= l * sup[i];
            sup[i + 1] -= l * sup2[i];
            rhs[i + 1] -= l * rhs[i];
        }
    }
    let mut z = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        if i + 1 < k {
            acc -= sup[i] * z[i + 1];
        }
        if i + 2 < k {
            acc -= sup2[i] * z[i + 2];
        }
        let d = if diag[i] == 0.0 { f64::EPSILON } else { diag[i] };
        z[i] = acc / d;
    }
    Some(z)
}

fn dense_top_pair(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let top = eig.eigenvalues.imax();
    let vec = eig.eigenvectors.column(top).iter().copied().collect();
    (eig.eigenvalues[top], vec)
}
