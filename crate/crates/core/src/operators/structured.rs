//! Structured representations of the operators built by this crate, used to
//! apply them, their powers and their resolvents in `O(N·bandwidth)` time.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{Banded, BandedLu, LinearMap, C64, ONE, ZERO};
use crate::rng::Lcg;
use crate::symbols::{geometric, BuildMode, Family, FamilyParams, LaurentSymbol, Provenance, TruncatedOperator};

/// Operator in a form that admits fast application and fast resolvent solves.
#[derive(Clone, Debug)]
pub enum StructuredOperator {
    Dense(DMatrix<C64>),
    Banded(Banded),
    /// `G⁻¹ F G` with banded `F` and lower-banded `G`, `G` invertible.
    Similarity { f: Banded, g: Banded },
    /// `B + u v*`.
    BandedRankOne { band: Banded, u: Vec<C64>, v: Vec<C64> },
}

impl StructuredOperator {
    pub fn family(p: &FamilyParams, n: usize, mode: BuildMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        match mode {
            BuildMode::FiniteSection => {
                let g = p.g();
                g.require_analytic()?;
                if g.coeff(0) == ZERO {
                    return Err(Error::SingularSymbol);
                }
                Ok(StructuredOperator::Similarity { f: Banded::toeplitz(&p.f(), n), g: Banded::toeplitz(&g, n) })
            }
            BuildMode::ClosedForm => {
                let beta = p.beta();
                let scale = match p.family() {
                    Family::ConjugateShift => beta,
                    Family::RealPart => beta * 0.5,
                    Family::Custom { .. } => return Err(Error::UnsupportedMode("custom family".into())),
                };
                let u: Vec<C64> = geometric(-beta, n).iter().map(|k| k * scale).collect();
                let mut v = vec![ZERO; n];
                v[0] = ONE;
                Ok(StructuredOperator::BandedRankOne { band: Banded::toeplitz(&p.f(), n), u, v })
            }
        }
    }

    /// `(T_z*)ⁿ + β k_{−β̄} e_{n−1}*` on the `N`-truncation.
    pub fn conj_shift_power(beta: C64, power: usize, n: usize) -> Result<Self> {
        if power == 0 || power >= n {
            return Err(Error::TruncationTooSmall { power, dim: n });
        }
        let shift = LaurentSymbol::monomial(-(power as i64), ONE);
        let u: Vec<C64> = geometric(-beta, n).iter().map(|k| k * beta).collect();
        let mut v = vec![ZERO; n];
        v[power - 1] = ONE;
        Ok(StructuredOperator::BandedRankOne { band: Banded::toeplitz(&shift, n), u, v })
    }

    /// Reconstructs the structure recorded in the provenance, falling back to
    /// the dense matrix when there is none or when it disagrees with the data.
    pub fn from_operator(op: &TruncatedOperator) -> Self {
        let n = op.dim();
        let candidate = match op.provenance() {
            Provenance::Toeplitz { symbol } => Some(StructuredOperator::Banded(Banded::toeplitz(symbol, n))),
            Provenance::Family { family, beta, f, g, mode, .. } => {
                let params = match family {
                    Family::Custom { .. } => FamilyParams::custom(f.clone(), g.clone()),
                    other => FamilyParams::new(other.clone(), *beta),
                };
                params.ok().and_then(|p| StructuredOperator::family(&p, n, *mode).ok())
            }
            Provenance::ClosedFormPower { beta, power, .. } => StructuredOperator::conj_shift_power(*beta, *power, n).ok(),
            _ => None,
        };
        match candidate {
            Some(s) if s.agrees_with(op.data()) => s,
            Some(_) => {
                log::warn!("operator data does not match its provenance; using dense arithmetic");
                StructuredOperator::Dense(op.data().clone())
            }
            None => StructuredOperator::Dense(op.data().clone()),
        }
    }

    fn agrees_with(&self, dense: &DMatrix<C64>) -> bool {
        let n = dense.nrows();
        let x = Lcg::new(17).complex_vec(n);
        let a = self.apply(&x);
        let b = dense.apply(&x);
        let scale = b.iter().map(|z| z.norm()).fold(1.0, f64::max);
        a.iter().zip(&b).all(|(p, q)| (p - q).norm() <= 1e-9 * scale)
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, StructuredOperator::Dense(_))
    }

    /// Resolvent `(λI − A)⁻¹` as an operator.
    pub fn resolvent(&self, lambda: C64) -> Result<ResolventMap> {
        match self {
            StructuredOperator::Dense(m) => {
                let n = m.nrows();
                let shifted = DMatrix::from_diagonal_element(n, n, lambda) - m;
                let inv = shifted.try_inverse().ok_or(Error::SingularSolve { cond: f64::INFINITY })?;
                if !inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::SingularSolve { cond: f64::INFINITY });
                }
                Ok(ResolventMap::Dense(inv))
            }
            StructuredOperator::Banded(b) => Ok(ResolventMap::Banded(BandedLu::factor(&b.shifted_negation(lambda))?)),
            StructuredOperator::Similarity { f, g } => {
                let lu = BandedLu::factor(&f.shifted_negation(lambda))?;
                Ok(ResolventMap::Similarity { g: g.clone(), lu })
            }
            StructuredOperator::BandedRankOne { band, u, v } => {
                let lu = BandedLu::factor(&band.shifted_negation(lambda))?;
                // (M − u v*)⁻¹ = M⁻¹ + M⁻¹u v* M⁻¹ / (1 − v* M⁻¹ u)
                let w = lu.solve(u);
                let q = lu.solve_adjoint(v);
                let denom = ONE - crate::linalg::dot(&w, v);
                let scale = crate::linalg::norm2(&w) * crate::linalg::norm2(v);
                if denom.norm() <= 1e-14 * scale.max(1.0) {
                    return Err(Error::SingularSolve { cond: f64::INFINITY });
                }
                Ok(ResolventMap::RankOne { lu, w, q, v: v.clone(), u: u.clone(), denom })
            }
        }
    }
}

impl LinearMap for StructuredOperator {
    fn dim(&self) -> usize {
        match self {
            StructuredOperator::Dense(m) => m.nrows(),
            StructuredOperator::Banded(b) => b.dim(),
            StructuredOperator::Similarity { f, .. } => f.dim(),
            StructuredOperator::BandedRankOne { band, .. } => band.dim(),
        }
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        match self {
            StructuredOperator::Dense(m) => m.apply(x),
            StructuredOperator::Banded(b) => b.apply(x),
            StructuredOperator::Similarity { f, g } => g.solve_lower(&f.apply(&g.apply(x))),
            StructuredOperator::BandedRankOne { band, u, v } => {
                let mut y = band.apply(x);
                axpy(&mut y, crate::linalg::dot(x, v), u);
                y
            }
        }
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        match self {
            StructuredOperator::Dense(m) => m.apply_adjoint(x),
            StructuredOperator::Banded(b) => b.apply_adjoint(x),
            StructuredOperator::Similarity { f, g } => g.apply_adjoint(&f.apply_adjoint(&g.solve_lower_adjoint(x))),
            StructuredOperator::BandedRankOne { band, u, v } => {
                let mut y = band.apply_adjoint(x);
                axpy(&mut y, crate::linalg::dot(x, u), v);
                y
            }
        }
    }
}

/// `(λI − A)⁻¹` for a [`StructuredOperator`], or the closed-form resolvent of
/// the conjugated backward shift.
#[derive(Clone, Debug)]
pub enum ResolventMap {
    Dense(DMatrix<C64>),
    Banded(BandedLu),
    Similarity { g: Banded, lu: BandedLu },
    RankOne { lu: BandedLu, w: Vec<C64>, q: Vec<C64>, u: Vec<C64>, v: Vec<C64>, denom: C64 },
    /// Upper-triangular Toeplitz part `Σ_k (T_z*)ᵏ/λ^{k+1}` plus `c · u v*`.
    ConjShiftClosedForm { lambda: C64, n: usize, c: C64, u: Vec<C64>, v: Vec<C64> },
}

impl ResolventMap {
    /// `T_{1/(λ − z̄)} + (β/λ²) k_{−β̄} k_{1/λ}*`, truncated to `N`.
    pub fn conj_shift_closed_form(beta: C64, lambda: C64, n: usize) -> Result<Self> {
        if !(lambda.norm() > 1.0) {
            return Err(Error::OutsideResolventDomain(lambda.norm()));
        }
        Ok(ResolventMap::ConjShiftClosedForm {
            lambda,
            n,
            c: beta / (lambda * lambda),
            u: geometric(-beta, n).iter().copied().collect(),
            v: geometric(lambda.inv().conj(), n).iter().copied().collect(),
        })
    }
}

impl LinearMap for ResolventMap {
    fn dim(&self) -> usize {
        match self {
            ResolventMap::Dense(m) => m.nrows(),
            ResolventMap::Banded(lu) | ResolventMap::RankOne { lu, .. } => lu.dim(),
            ResolventMap::Similarity { g, .. } => g.dim(),
            ResolventMap::ConjShiftClosedForm { n, .. } => *n,
        }
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        match self {
            ResolventMap::Dense(m) => m.apply(x),
            ResolventMap::Banded(lu) => lu.solve(x),
            ResolventMap::Similarity { g, lu } => g.solve_lower(&lu.solve(&g.apply(x))),
            ResolventMap::RankOne { lu, w, v, denom, .. } => {
                let mut y = lu.solve(x);
                let s = crate::linalg::dot(&y, v) / denom;
                axpy(&mut y, s, w);
                y
            }
            ResolventMap::ConjShiftClosedForm { lambda, n, c, u, v } => {
                // y_m = (x_m + y_{m+1}) / λ solves (λ − T_z*) y = x.
                let mut y = vec![ZERO; *n];
                let mut carry = ZERO;
                for m in (0..*n).rev() {
                    carry = (x[m] + carry) / lambda;
                    y[m] = carry;
                }
                axpy(&mut y, *c * crate::linalg::dot(x, v), u);
                y
            }
        }
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        match self {
            ResolventMap::Dense(m) => m.apply_adjoint(x),
            ResolventMap::Banded(lu) => lu.solve_adjoint(x),
            ResolventMap::Similarity { g, lu } => g.apply_adjoint(&lu.solve_adjoint(&g.solve_lower_adjoint(x))),
            ResolventMap::RankOne { lu, q, w, denom, .. } => {
                // R* = M⁻* + M⁻* v w* / conj(denom), with w = M⁻¹u
                let mut y = lu.solve_adjoint(x);
                let s = crate::linalg::dot(x, w) / denom.conj();
                axpy(&mut y, s, q);
                y
            }
            ResolventMap::ConjShiftClosedForm { lambda, n, c, u, v } => {
                let lc = lambda.conj();
                let mut y = vec![ZERO; *n];
                let mut carry = ZERO;
                for m in 0..*n {
                    carry = (x[m] + carry) / lc;
                    y[m] = carry;
                }
                axpy(&mut y, c.conj() * crate::linalg::dot(x, u), v);
                y
            }
        }
    }
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    if a == ZERO {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
