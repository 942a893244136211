use super::{LinearMap, C64, ZERO};
use crate::error::{Error, Result};
use crate::symbols::LaurentSymbol;

/// Square banded matrix with `kl` sub- and `ku` superdiagonals, row-major band storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<C64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Banded { n, kl, ku, data: vec![ZERO; n * (kl + ku + 1)] }
    }

    /// Finite section of `T_f` in band form.
    pub fn toeplitz(f: &LaurentSymbol, n: usize) -> Self {
        let kl = f.lower_bandwidth().min(n.saturating_sub(1));
        let ku = f.upper_bandwidth().min(n.saturating_sub(1));
        let mut b = Banded::zeros(n, kl, ku);
        for (k, c) in f.terms() {
            let shift = k.unsigned_abs() as usize;
            if shift >= n {
                continue;
            }
            for j in 0..n - shift {
                if k >= 0 {
                    b.set(j + shift, j, c);
                } else {
                    b.set(j, j + shift, c);
                }
            }
        }
        b
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.kl
    }

    pub fn upper(&self) -> usize {
        self.ku
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && i + self.ku >= j
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if self.in_band(i, j) {
            self.data[self.index(i, j)]
        } else {
            ZERO
        }
    }

    /// Panics when `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        assert!(self.in_band(i, j), "({i},{j}) outside band kl={} ku={}", self.kl, self.ku);
        let idx = self.index(i, j);
        self.data[idx] = v;
    }

    fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    /// `λI − self`.
    pub fn shifted_negation(&self, lambda: C64) -> Banded {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = -*v;
        }
        for i in 0..self.n {
            let idx = out.index(i, i);
            out.data[idx] += lambda;
        }
        out
    }

    pub fn adjoint(&self) -> Banded {
        let mut out = Banded::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            for j in self.row_range(i) {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Solves `self · x = b` for lower-triangular `self` (`ku = 0`).
    pub fn solve_lower(&self, b: &[C64]) -> Vec<C64> {
        debug_assert_eq!(self.ku, 0);
        let mut x = b.to_vec();
        for i in 0..self.n {
            let mut acc = x[i];
            for j in i.saturating_sub(self.kl)..i {
                acc -= self.get(i, j) * x[j];
            }
            x[i] = acc / self.get(i, i);
        }
        x
    }

    /// Solves `self^H · x = b` for lower-triangular `self`.
    pub fn solve_lower_adjoint(&self, b: &[C64]) -> Vec<C64> {
        debug_assert_eq!(self.ku, 0);
        let mut x = b.to_vec();
        for i in (0..self.n).rev() {
            let mut acc = x[i];
            for j in i + 1..(i + self.kl + 1).min(self.n) {
                acc -= self.get(j, i).conj() * x[j];
            }
            x[i] = acc / self.get(i, i).conj();
        }
        x
    }
}

impl LinearMap for Banded {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.n];
        for i in 0..self.n {
            let xi = x[i];
            for j in self.row_range(i) {
                y[j] += self.get(i, j).conj() * xi;
            }
        }
        y
    }
}

/// LU factorization with partial pivoting of a banded matrix.
///
/// Storage follows the LAPACK `gbtrf` convention: column-major band with
/// `kl` extra superdiagonals for the fill-in caused by row interchanges.
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<C64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn factor(a: &Banded) -> Result<Self> {
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        let ldab = 2 * kl + ku + 1;
        let mut lu = BandedLu { n, kl, ku, ldab, ab: vec![ZERO; ldab * n], pivots: vec![0; n] };
        for i in 0..n {
            for j in a.row_range(i) {
                lu.set(i, j, a.get(i, j));
            }
        }
        let mut scale = 0.0f64;
        for v in &a.data {
            scale = scale.max(v.norm());
        }
        let width = kl + ku;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.get(k, k).norm();
            for i in k + 1..=last {
                let v = lu.get(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            lu.pivots[k] = p;
            if best == 0.0 || best <= f64::EPSILON * scale * 1e-4 {
                return Err(Error::SingularSolve { cond: f64::INFINITY });
            }
            let jmax = (k + width).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let t = lu.get(k, j);
                    lu.set(k, j, lu.get(p, j));
                    lu.set(p, j, t);
                }
            }
            let pivot = lu.get(k, k);
            for i in k + 1..=last {
                let l = lu.get(i, k) / pivot;
                lu.set(i, k, l);
                if l == ZERO {
                    continue;
                }
                for j in k + 1..=jmax {
                    let v = lu.get(i, j) - l * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
        }
        Ok(lu)
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    fn get(&self, i: usize, j: usize) -> C64 {
        self.ab[self.idx(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, v: C64) {
        let idx = self.idx(i, j);
        self.ab[idx] = v;
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk == ZERO {
                continue;
            }
            for i in k + 1..=(k + self.kl).min(n - 1) {
                x[i] -= self.get(i, k) * xk;
            }
        }
        let width = self.kl + self.ku;
        for k in (0..n).rev() {
            let mut acc = x[k];
            for j in k + 1..=(k + width).min(n - 1) {
                acc -= self.get(k, j) * x[j];
            }
            x[k] = acc / self.get(k, k);
        }
        x
    }

    /// Solves `A^H x = b` with the same factors.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let width = self.kl + self.ku;
        let mut x = b.to_vec();
        // U^H y = b
        for k in 0..n {
            let mut acc = x[k];
            for i in k.saturating_sub(width)..k {
                acc -= self.get(i, k).conj() * x[i];
            }
            x[k] = acc / self.get(k, k).conj();
        }
        // then the unit-lower factors and interchanges in reverse order
        for k in (0..n).rev() {
            let mut acc = x[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                acc -= self.get(i, k).conj() * x[i];
            }
            x[k] = acc;
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
        }
        x
    }
}
