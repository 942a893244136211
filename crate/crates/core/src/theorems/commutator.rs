use nalgebra::DMatrix;

use crate::analysis::{BoundReport, Quantity};
use crate::error::{Error, Result};

/// `X ↦ (S + S*)X` for the tridiagonal `S + S*` of size `N`.
fn apply_sum(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    DMatrix::from_fn(n, x.ncols(), |i, j| {
        let up = if i > 0 { x[(i - 1, j)] } else { 0.0 };
        let down = if i + 1 < n { x[(i + 1, j)] } else { 0.0 };
        up + down
    })
}

/// `‖[(T_z + T_z*)ⁿ, T_z]‖` on the leading `(N − n − 2)`-block, where the
/// finite section agrees with the compression of the infinite commutator.
pub fn commutator_norm(n: usize, dim: usize) -> Result<f64> {
    if 4 * n >= dim {
        return Err(Error::TruncationTooSmall { power: n, dim });
    }
    let mut p = DMatrix::<f64>::identity(dim, dim);
    for _ in 0..n {
        p = apply_sum(&p);
    }
    let k = dim - n - 2;
    // (XⁿS)(i, j) = Xⁿ(i, j + 1) and (SXⁿ)(i, j) = Xⁿ(i − 1, j)
    let c = DMatrix::from_fn(k, k, |i, j| {
        let right = p[(i, j + 1)];
        let left = if i > 0 { p[(i - 1, j)] } else { 0.0 };
        right - left
    });
    Ok(c.singular_values().max())
}

/// Checks `‖[(T_z + T_z*)ⁿ, T_z]‖ ≤ 2(n + 1)` for `n ≤ n_max`.
///
/// The value is the worst ratio `‖C_n‖/(2(n + 1))` against the upper bound 1;
/// `series` holds the norms. The verdict is advisory: the bound counts terms
/// of the expansion, not their binomial weights.
pub fn commutator_growth_check(n_max: usize, dim: usize) -> Result<BoundReport> {
    if 4 * n_max >= dim {
        return Err(Error::TruncationTooSmall { power: n_max, dim });
    }
    let mut norms = Vec::with_capacity(n_max + 1);
    let mut worst: f64 = 0.0;
    let mut first_violation = None;
    for n in 0..=n_max {
        let v = commutator_norm(n, dim)?;
        let bound = 2.0 * (n + 1) as f64;
        if v > bound + 1e-6 && first_violation.is_none() {
            first_violation = Some(n);
        }
        worst = worst.max(v / bound);
        norms.push(v);
    }
    let scaled = norms.iter().enumerate().map(|(n, v)| v / 2f64.powi(n as i32)).fold(0.0, f64::max);
    let mut r = BoundReport::new(Quantity::Norm, worst, true)
        .with_bounds(None, Some(1.0), 1e-6)
        .with_diagnostic("n_max", n_max)
        .with_diagnostic("dim", dim)
        .with_diagnostic("first_violation_n", first_violation.map_or("none".to_string(), |n| n.to_string()))
        .with_diagnostic("max_norm_over_2^n", scaled)
        .advisory();
    r.series = norms;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_powers() {
        assert_eq!(commutator_norm(0, 64).unwrap(), 0.0);
        assert!((commutator_norm(1, 64).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interior_is_dimension_independent() {
        for n in [2, 5, 9] {
            let a = commutator_norm(n, 64).unwrap();
            let b = commutator_norm(n, 128).unwrap();
            assert!((a - b).abs() < 1e-9 * a.max(1.0), "{n}: {a} vs {b}");
        }
    }

    #[test]
    fn report_is_advisory() {
        let r = commutator_growth_check(12, 64).unwrap();
        assert_eq!(r.series.len(), 13);
        assert_ne!(r.verdict, crate::analysis::Verdict::Fail);
        assert!(commutator_growth_check(16, 64).is_err());
    }
}
