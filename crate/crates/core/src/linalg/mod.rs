//! Matrix-free operator plumbing: the [`LinearMap`] trait, banded
//! factorizations and largest-singular-value estimation.

mod banded;
mod norm;

pub use banded::{Banded, BandedLu};
pub use norm::{largest_singular_value, largest_singular_value_within, NormEstimate};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Square linear operator that can be applied together with its adjoint.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[C64]) -> Vec<C64>;

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64>;

    /// Dense materialization, one basis vector at a time.
    fn to_dense(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![ZERO; n];
        for j in 0..n {
            e[j] = ONE;
            let col = self.apply(&e);
            e[j] = ZERO;
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }
}

impl LinearMap for DMatrix<C64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.nrows()];
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            for (yi, a) in y.iter_mut().zip(self.column(j).iter()) {
                *yi += a * xj;
            }
        }
        y
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        (0..self.ncols())
            .map(|j| self.column(j).iter().zip(x).map(|(a, xi)| a.conj() * xi).sum())
            .collect()
    }

    fn to_dense(&self) -> DMatrix<C64> {
        self.clone()
    }
}

/// `A^n` applied as `n` successive applications.
pub struct PowerMap<'a, M: LinearMap + ?Sized> {
    pub base: &'a M,
    pub power: usize,
}

impl<M: LinearMap + ?Sized> LinearMap for PowerMap<'_, M> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = x.to_vec();
        for _ in 0..self.power {
            y = self.base.apply(&y);
        }
        y
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let mut y = x.to_vec();
        for _ in 0..self.power {
            y = self.base.apply_adjoint(&y);
        }
        y
    }
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[C64], y: &[C64]) -> C64 {
    // ⟨x, y⟩ = Σ x_i conj(y_i)
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_apply_and_adjoint() {
        let m = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 1.0), C64::new(2.0, 0.0), C64::new(0.0, -1.0), C64::new(3.0, 0.5)]);
        let x = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let y = m.apply(&x);
        let expected = &m * nalgebra::DVector::from_column_slice(&x);
        assert!((y[0] - expected[0]).norm() < 1e-15 && (y[1] - expected[1]).norm() < 1e-15);
        let ya = m.apply_adjoint(&x);
        let expected = m.adjoint() * nalgebra::DVector::from_column_slice(&x);
        assert!((ya[0] - expected[0]).norm() < 1e-15 && (ya[1] - expected[1]).norm() < 1e-15);
        assert_eq!(m.to_dense(), m);
    }

    #[test]
    fn power_map_matches_matrix_power() {
        let m = DMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.3, 0.2)]);
        let p = PowerMap { base: &m, power: 3 };
        let dense = &m * &m * &m;
        assert!((p.to_dense() - dense).norm() < 1e-15);
    }
}
