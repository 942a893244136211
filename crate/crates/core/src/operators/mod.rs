//! The conjugated families `A = T_{1+βz}⁻¹ T_f T_{1+βz}` in two independent
//! constructions (finite-section products and the rank-one closed forms),
//! their powers, resolvents and kernel pairings.

mod structured;

pub use structured::{ResolventMap, StructuredOperator};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{LinearMap, C64};
use crate::symbols::{kernel_vector, BuildMode, Family, FamilyParams, Provenance, TruncatedOperator};

/// Condition number above which a finite-section resolvent gets one step of
/// iterative refinement.
pub const REFINE_CONDITION: f64 = 1e8;

fn family_formula(family: &Family, mode: BuildMode) -> &'static str {
    match (family, mode) {
        (Family::ConjugateShift, BuildMode::FiniteSection) => "T_{1+βz}^{-1} T_{z̄} T_{1+βz}",
        (Family::RealPart, BuildMode::FiniteSection) => "T_{1+βz}^{-1} T_{(z+z̄)/2} T_{1+βz}",
        (Family::Custom { .. }, _) => "T_g^{-1} T_f T_g",
        (Family::ConjugateShift, BuildMode::ClosedForm) => "T_z* + β k_{-conj(β)} e_0*",
        (Family::RealPart, BuildMode::ClosedForm) => "T_{(z+z̄)/2} + (β/2) k_{-conj(β)} e_0*",
    }
}

/// `N×N` finite section of the family operator.
///
/// `FiniteSection` forms `(T_g)_N⁻¹ (T_f)_N (T_g)_N`; `ClosedForm` truncates
/// the rank-one expression and exists only for the two named families.
pub fn build_operator(p: &FamilyParams, n: usize, mode: BuildMode) -> Result<TruncatedOperator> {
    let s = StructuredOperator::family(p, n, mode)?;
    TruncatedOperator::new(
        s.to_dense(),
        Provenance::Family {
            family: p.family().clone(),
            beta: p.beta(),
            f: p.f(),
            g: p.g(),
            mode,
            formula: family_formula(p.family(), mode).into(),
        },
    )
}

/// `((T_z)_N*)ⁿ + β k_{−β̄} e_{n−1}*`, the `n`-th power of the conjugated
/// backward shift.
pub fn power_closed_form(p: &FamilyParams, power: usize, n: usize) -> Result<TruncatedOperator> {
    if !matches!(p.family(), Family::ConjugateShift) {
        return Err(Error::UnsupportedMode(format!("closed-form powers of the {} family", p.family().label())));
    }
    let s = StructuredOperator::conj_shift_power(p.beta(), power, n)?;
    TruncatedOperator::new(
        s.to_dense(),
        Provenance::ClosedFormPower {
            beta: p.beta(),
            power,
            formula: "(T_z*)^n + β k_{-conj(β)} e_{n-1}*".into(),
        },
    )
}

/// `XY − YX`.
pub fn commutator(x: &TruncatedOperator, y: &TruncatedOperator) -> Result<TruncatedOperator> {
    x.require_same_dim(y)?;
    let xy = x.data() * y.data();
    let yx = y.data() * x.data();
    TruncatedOperator::new(xy - yx, Provenance::Derived { operation: "commutator".into() })
}

/// Truncation of `T_{1/(λ−z̄)} + (β/λ²) k_{−β̄} k_{1/λ}*`, the resolvent of the
/// conjugated backward shift.
pub fn resolvent_closed_form(p: &FamilyParams, lambda: C64, n: usize) -> Result<TruncatedOperator> {
    if !matches!(p.family(), Family::ConjugateShift) {
        return Err(Error::UnsupportedMode(format!("closed-form resolvent of the {} family", p.family().label())));
    }
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let r = ResolventMap::conj_shift_closed_form(p.beta(), lambda, n)?;
    TruncatedOperator::new(r.to_dense(), Provenance::ClosedFormResolvent { beta: p.beta(), lambda })
}

fn norm_one(m: &DMatrix<C64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `(λI − A)⁻¹` by dense LU.
///
/// The 1-norm condition number is recorded in the provenance; above
/// [`REFINE_CONDITION`] one step of iterative refinement is applied.
pub fn resolvent_finite_section(a: &TruncatedOperator, lambda: C64) -> Result<TruncatedOperator> {
    if !(lambda.norm() > 1.0) {
        return Err(Error::OutsideResolventDomain(lambda.norm()));
    }
    let n = a.dim();
    let shifted = DMatrix::from_diagonal_element(n, n, lambda) - a.data();
    let lu = shifted.clone().lu();
    let identity = DMatrix::<C64>::identity(n, n);
    let mut inv = lu.solve(&identity).ok_or(Error::SingularSolve { cond: f64::INFINITY })?;
    let cond = norm_one(&shifted) * norm_one(&inv);
    if !cond.is_finite() {
        return Err(Error::SingularSolve { cond });
    }
    let refined = cond > REFINE_CONDITION;
    if refined {
        let residual = &identity - &shifted * &inv;
        let correction = lu.solve(&residual).ok_or(Error::SingularSolve { cond })?;
        inv += correction;
    }
    if !inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::SingularSolve { cond });
    }
    TruncatedOperator::new(inv, Provenance::FiniteSectionResolvent { lambda, condition_estimate: cond, refined })
}

/// Residuals of the similarity-resolvent identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityResidual {
    /// `‖(λ − S⁻¹BS)⁻¹ − [(λ − B)⁻¹ + S⁻¹[(λ − B)⁻¹, S]]‖`.
    pub proof_form: f64,
    /// Same with `(λ − S)⁻¹` in the commutator, as the identity is sometimes
    /// written. `None` when `λ ∈ σ(S)`.
    pub statement_form: Option<f64>,
}

/// Spectral-norm residuals of `(λI − S⁻¹BS)⁻¹ = (λI − B)⁻¹ + S⁻¹[(λI − B)⁻¹, S]`.
pub fn similarity_resolvent_identity_check(
    b: &TruncatedOperator,
    s: &TruncatedOperator,
    lambda: C64,
) -> Result<SimilarityResidual> {
    b.require_same_dim(s)?;
    let n = b.dim();
    let s_inv = s.data().clone().try_inverse().ok_or(Error::SingularSolve { cond: f64::INFINITY })?;
    let lam = DMatrix::from_diagonal_element(n, n, lambda);
    let conjugated = &s_inv * b.data() * s.data();
    let lhs = (&lam - conjugated).try_inverse().ok_or(Error::SingularSolve { cond: f64::INFINITY })?;
    let r = (&lam - b.data()).try_inverse().ok_or(Error::SingularSolve { cond: f64::INFINITY })?;
    let comm = |x: &DMatrix<C64>| x * s.data() - s.data() * x;
    let proof_rhs = &r + &s_inv * comm(&r);
    let proof_form = spectral_norm(&(&lhs - proof_rhs));
    let statement_form = (&lam - s.data()).try_inverse().map(|rs| {
        let rhs = &r + &s_inv * comm(&rs);
        spectral_norm(&(&lhs - rhs))
    });
    Ok(SimilarityResidual { proof_form, statement_form })
}

pub(crate) fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// `⟨Mx, k̂_ω⟩` with `k̂_ω` the normalized truncated kernel; equals `(Mx)(ω)/‖k_ω‖`.
pub fn pair_with_kernel(m: &TruncatedOperator, x: &[C64], omega: C64) -> Result<C64> {
    if x.len() != m.dim() {
        return Err(Error::DimensionMismatch(m.dim(), x.len()));
    }
    let k = kernel_vector(omega, m.dim())?;
    let mx = m.data() * DVector::from_column_slice(x);
    Ok(mx.dotc(&k.normalized()).conj())
}
