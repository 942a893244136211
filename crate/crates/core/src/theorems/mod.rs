//! Executable checks of the power-bound and resolvent-condition inequalities
//! for the two operator families, growth-rate sweeps and the commutator bound.

mod brackets;
mod commutator;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use brackets::{c0, conj_shift_brackets, real_part_brackets, real_part_p_floor, ConjShiftBrackets, RealPartBrackets};
pub use commutator::{commutator_growth_check, commutator_norm};
pub use sweep::{fit_slope, sweep_growth, SlopeFit, SweepConfig, SweepReport, SweepRow};

use crate::analysis::{
    power_bound, power_bound_of, resolvent_condition_at, resolvent_condition_of, BoundReport, GridSpec, Quantity,
    ResolventMode, ResolventSource, SpectrumModel, Verdict,
};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::operators::StructuredOperator;
use crate::symbols::{BuildMode, Family, FamilyParams, KernelVector, TruncatedOperator};

const E: f64 = std::f64::consts::E;

/// Tolerance of the exact orderings `P ≤ M` and `P_σ ≤ P_{−1,1}`.
pub const ORDER_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    Thm3_1,
    Thm3_2,
    Thm3_3,
    Prop2_2,
    Prop1_1,
    #[serde(rename = "ER_Thm1_1")]
    ErThm1_1,
    Cor3_1,
    Cor3_2,
    #[serde(rename = "Lem6_1_norm")]
    Lem6_1Norm,
}

impl TheoremId {
    /// Prefix of the verdict lines.
    pub fn tag(&self) -> &'static str {
        match self {
            TheoremId::Thm3_1 => "THM3.1",
            TheoremId::Thm3_2 => "THM3.2",
            TheoremId::Thm3_3 => "THM3.3",
            TheoremId::Prop2_2 => "PROP2.2",
            TheoremId::Prop1_1 => "PROP1.1",
            TheoremId::ErThm1_1 => "ER",
            TheoremId::Cor3_1 => "COR3.1",
            TheoremId::Cor3_2 => "COR3.2",
            TheoremId::Lem6_1Norm => "LEM6.1",
        }
    }

    /// The family a case must belong to, if any.
    pub fn required_family(&self) -> Option<Family> {
        match self {
            TheoremId::Thm3_1 | TheoremId::Cor3_1 | TheoremId::Prop2_2 => Some(Family::ConjugateShift),
            TheoremId::Thm3_2 | TheoremId::Thm3_3 | TheoremId::Cor3_2 => Some(Family::RealPart),
            _ => None,
        }
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "3.1" => TheoremId::Thm3_1,
            "3.2" => TheoremId::Thm3_2,
            "3.3" => TheoremId::Thm3_3,
            "prop2.2" => TheoremId::Prop2_2,
            "prop1.1" => TheoremId::Prop1_1,
            "er" => TheoremId::ErThm1_1,
            "cor3.1" => TheoremId::Cor3_1,
            "cor3.2" => TheoremId::Cor3_2,
            "lem6.1" => TheoremId::Lem6_1Norm,
            other => return Err(Error::Invalid(format!("unknown theorem `{other}`"))),
        })
    }
}

/// Numeric settings shared by every verifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub dim: usize,
    pub n_max: usize,
    pub grid: GridSpec,
    pub norm_tol: f64,
    pub mode: ResolventMode,
    /// Base tolerance of `M` brackets.
    pub m_tol: f64,
    /// Base tolerance of `P` brackets.
    pub p_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            dim: 512,
            n_max: 64,
            grid: GridSpec::default(),
            norm_tol: 1e-10,
            mode: ResolventMode::Auto,
            m_tol: 1e-3,
            p_tol: 1e-2,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if self.n_max == 0 {
            return Err(Error::Invalid("n_max must be at least 1".into()));
        }
        if !(self.norm_tol > 0.0) || !(self.m_tol >= 0.0) || !(self.p_tol >= 0.0) {
            return Err(Error::Invalid("tolerances must be non-negative and norm_tol positive".into()));
        }
        self.grid.validate()
    }
}

/// Operator under test.
#[derive(Clone, Debug)]
pub enum CaseInput {
    Family(FamilyParams),
    Matrix(TruncatedOperator),
}

/// A theorem together with the operator and settings to check it on.
#[derive(Clone, Debug)]
pub struct TheoremCase {
    pub id: TheoremId,
    pub input: CaseInput,
    pub config: VerifyConfig,
    /// Point set `E` for the El-Fallah–Ransford bound.
    pub points: Option<Vec<C64>>,
}

impl TheoremCase {
    pub fn new(id: TheoremId, input: CaseInput, config: VerifyConfig) -> Result<Self> {
        config.validate()?;
        if let Some(required) = id.required_family() {
            let ok = matches!(&input, CaseInput::Family(p) if *p.family() == required);
            if !ok {
                return Err(Error::Invalid(format!("{} requires the {} family", id.tag(), required.label())));
            }
        }
        Ok(TheoremCase { id, input, config, points: None })
    }

    pub fn with_points(mut self, points: Vec<C64>) -> Self {
        self.points = Some(points);
        self
    }

    pub fn run(&self) -> Result<Vec<Check>> {
        let cfg = &self.config;
        let beta = match &self.input {
            CaseInput::Family(p) => Some(p.beta()),
            CaseInput::Matrix(_) => None,
        };
        match (self.id, &self.input) {
            (TheoremId::Thm3_1, _) => verify_thm_3_1(beta.unwrap(), cfg),
            (TheoremId::Thm3_2, _) => verify_thm_3_2(beta.unwrap(), cfg),
            (TheoremId::Thm3_3, _) => verify_thm_3_3(beta.unwrap(), cfg),
            (TheoremId::Prop2_2 | TheoremId::Prop1_1, _) => verify_prop_2_2(beta.unwrap(), cfg),
            (TheoremId::ErThm1_1, input) => {
                let points = self.points.clone().unwrap_or_else(|| vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]);
                match input {
                    CaseInput::Family(p) => Ok(vec![verify_er_bound_family(p, &points, cfg)?]),
                    CaseInput::Matrix(a) => Ok(vec![verify_er_bound(a, &points, cfg)?]),
                }
            }
            (TheoremId::Lem6_1Norm, _) => {
                let n_max = cfg.n_max.min(cfg.dim.saturating_sub(1) / 4);
                let report = commutator_growth_check(n_max, cfg.dim)?;
                Ok(vec![Check::new(TheoremId::Lem6_1Norm, "norm", None, report)])
            }
            (TheoremId::Cor3_1 | TheoremId::Cor3_2, _) => {
                Err(Error::UnsupportedMode("growth corollaries are checked by sweep_growth".into()))
            }
        }
    }
}

/// One verdict line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub theorem: TheoremId,
    pub label: String,
    pub beta: Option<[f64; 2]>,
    pub report: BoundReport,
}

impl Check {
    pub fn new(theorem: TheoremId, label: &str, beta: Option<C64>, report: BoundReport) -> Self {
        Check { theorem, label: label.to_string(), beta: beta.map(|b| [b.re, b.im]), report }
    }

    pub fn verdict(&self) -> Verdict {
        self.report.verdict
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.theorem.tag(), self.label)?;
        if let Some([re, im]) = self.beta {
            write!(f, " beta={}", format_complex(C64::new(re, im)))?;
        }
        let r = &self.report;
        let lo = r.lower.map_or("-inf".to_string(), format_number);
        let hi = r.upper.map_or("inf".to_string(), format_number);
        write!(f, " value={} in [{lo},{hi}] {}", format_number(r.value), r.verdict)
    }
}

/// Worst verdict of a list of checks (`Pass` for an empty list).
pub fn overall_verdict(checks: &[Check]) -> Verdict {
    checks.iter().map(Check::verdict).max().unwrap_or(Verdict::Pass)
}

/// Up to six significant digits, trailing zeros trimmed.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = (5 - x.abs().log10().floor() as i32).clamp(0, 12) as usize;
    let s = format!("{x:.digits$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// `0.9`, `0.6i`, `0.353553+0.353553i`.
pub fn format_complex(z: C64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => format_number(z.re),
        (true, false) => format!("{}i", format_number(z.im)),
        _ => {
            let sign = if z.im < 0.0 { '-' } else { '+' };
            format!("{}{sign}{}i", format_number(z.re), format_number(z.im.abs()))
        }
    }
}

/// `‖Aⁿ‖` maximized over `n ≤ n_max` on the finite section.
pub fn measure_m(p: &FamilyParams, cfg: &VerifyConfig) -> Result<BoundReport> {
    let s = StructuredOperator::family(p, cfg.dim, BuildMode::FiniteSection)?;
    power_bound_of(&s, cfg.n_max, cfg.norm_tol)
}

/// Resolvent condition of the family against `spectrum`.
pub fn measure_p(p: &FamilyParams, spectrum: &SpectrumModel, cfg: &VerifyConfig) -> Result<BoundReport> {
    let src = ResolventSource::family(p, cfg.dim, cfg.mode)?;
    resolvent_condition_of(&src, spectrum, &cfg.grid)
}

/// Truncation tail `|β|^{N+1}/√(1 − |β|²)`: the norm of the discarded part
/// of the rank-one term `β k_{−β̄}`.
pub fn truncation_tail(beta: C64, dim: usize) -> f64 {
    beta.norm() * KernelVector::tail_bound(-beta.conj(), dim).sqrt()
}

/// Last absolute increment of a refined grid search.
fn grid_gap(r: &BoundReport) -> f64 {
    match r.quantity {
        Quantity::P | Quantity::K | Quantity::HY if r.series.len() >= 2 => {
            let n = r.series.len();
            (r.series[n - 1] - r.series[n - 2]).abs()
        }
        _ => 0.0,
    }
}

/// Brackets `r` with a tolerance of `base` plus truncation, grid and norm
/// contributions, each recorded in the diagnostics.
fn bracket(r: &BoundReport, lower: Option<f64>, upper: Option<f64>, base: f64, tail: f64, norm_tol: f64) -> BoundReport {
    let grid = grid_gap(r);
    let norm = norm_tol * r.value.abs();
    r.clone()
        .with_bounds(lower, upper, base + tail + grid + norm)
        .with_diagnostic("tol_base", base)
        .with_diagnostic("tol_truncation", tail)
        .with_diagnostic("tol_grid", grid)
        .with_diagnostic("tol_norm", norm)
}

/// Comparison `lhs ≤ rhs + tol` where `rhs` is built from lower estimates of
/// suprema: a violation is a hard failure only if every input converged.
fn ordering(q: Quantity, lhs: f64, rhs: f64, tol: f64, converged: bool) -> BoundReport {
    let r = BoundReport::new(q, lhs, converged).with_bounds(None, Some(rhs), tol);
    if converged {
        r
    } else {
        r.advisory()
    }
}

/// Brackets for the conjugated backward shift from measured `M̂` and `P̂`.
pub fn thm_3_1_checks(beta: C64, m: &BoundReport, p: &BoundReport, cfg: &VerifyConfig) -> Vec<Check> {
    let b = conj_shift_brackets(beta);
    let tail = truncation_tail(beta, cfg.dim);
    let m_check = bracket(m, Some(b.m_lower), Some(b.m_upper), cfg.m_tol, tail, cfg.norm_tol);
    let p_check = bracket(p, Some(b.p_lower), Some(b.p_upper_const.min(m.value)), cfg.p_tol, tail, cfg.norm_tol)
        .with_diagnostic("c0", c0());
    vec![
        Check::new(TheoremId::Thm3_1, "M", Some(beta), m_check),
        Check::new(TheoremId::Thm3_1, "P", Some(beta), p_check),
    ]
}

pub fn verify_thm_3_1(beta: C64, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let p = FamilyParams::conjugate_shift(beta)?;
    let m = measure_m(&p, cfg)?;
    let pr = measure_p(&p, &SpectrumModel::UnitDisk, cfg)?;
    Ok(thm_3_1_checks(beta, &m, &pr, cfg))
}

/// `1 ≤ P̂` and `P̂ ≤ M̂` from measured values.
pub fn prop_2_2_checks(beta: C64, m: &BoundReport, p: &BoundReport) -> Vec<Check> {
    let floor = p.clone().with_bounds(Some(1.0), None, ORDER_TOL);
    let order = ordering(Quantity::P, p.value, m.value, ORDER_TOL, m.converged && p.converged);
    vec![
        Check::new(TheoremId::Prop1_1, "P>=1", Some(beta), floor),
        Check::new(TheoremId::Prop2_2, "P<=M", Some(beta), order),
    ]
}

/// `P(A) ≤ M(A)` for the conjugated backward shift, whose spectrum is the
/// closed disk, together with `P(A) ≥ 1`.
pub fn verify_prop_2_2(beta: C64, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let p = FamilyParams::conjugate_shift(beta)?;
    let m = measure_m(&p, cfg)?;
    let pr = measure_p(&p, &SpectrumModel::UnitDisk, cfg)?;
    Ok(prop_2_2_checks(beta, &m, &pr))
}

/// Measured inputs of the real-part chain.
#[derive(Clone, Debug)]
pub struct ChainInputs {
    pub m: BoundReport,
    /// Against the interval `[−1, 1]`.
    pub p_sigma: BoundReport,
    /// Against the endpoints `{−1, 1}`.
    pub p_ends: BoundReport,
}

/// Computes `M̂`, `P̂_σ` and `P̂_{−1,1}`. Each resolvent condition is also
/// evaluated at the other's argmax, so both are lower estimates over a
/// common set of points and the pointwise ordering carries over.
pub fn measure_chain(p: &FamilyParams, cfg: &VerifyConfig) -> Result<ChainInputs> {
    let m = measure_m(p, cfg)?;
    let src = ResolventSource::family(p, cfg.dim, cfg.mode)?;
    let ends = SpectrumModel::FinitePoints(vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]);
    let mut p_sigma = resolvent_condition_of(&src, &SpectrumModel::Interval, &cfg.grid)?;
    let mut p_ends = resolvent_condition_of(&src, &ends, &cfg.grid)?;
    let cross = |r: &mut BoundReport, at: Option<[f64; 2]>, model: &SpectrumModel| -> Result<()> {
        if let Some([re, im]) = at {
            let v = resolvent_condition_at(&src, model, C64::new(re, im))?;
            if v > r.value {
                r.value = v;
                r.argmax_lambda = Some([re, im]);
                r.judge();
            }
        }
        Ok(())
    };
    let (sigma_at, ends_at) = (p_sigma.argmax_lambda, p_ends.argmax_lambda);
    cross(&mut p_ends, sigma_at, &ends)?;
    cross(&mut p_sigma, ends_at, &SpectrumModel::Interval)?;
    Ok(ChainInputs { m, p_sigma, p_ends })
}

pub fn thm_3_2_checks(beta: C64, c: &ChainInputs, cfg: &VerifyConfig) -> Vec<Check> {
    let (m, ps, pe) = (c.m.value, c.p_sigma.value, c.p_ends.value);
    let conv_p = c.p_sigma.converged && c.p_ends.converged;
    let conv_all = conv_p && c.m.converged;
    let order = ordering(Quantity::P, ps, pe, ORDER_TOL, conv_p);
    let link1 = ordering(Quantity::M, m, E * pe * pe, cfg.m_tol, conv_all);
    let link2 = ordering(Quantity::P, E * pe * pe, 2.0 * E * ps * ps, cfg.m_tol, conv_p);
    let floor = bracket(&c.p_sigma, Some(real_part_p_floor(m)), None, cfg.p_tol, 0.0, cfg.norm_tol);
    vec![
        Check::new(TheoremId::Thm3_2, "P_sigma<=P_ends", Some(beta), order),
        Check::new(TheoremId::Thm3_2, "M<=e*P_ends^2", Some(beta), link1),
        Check::new(TheoremId::Thm3_2, "e*P_ends^2<=2e*P_sigma^2", Some(beta), link2),
        Check::new(TheoremId::Thm3_2, "P_sigma>=sqrt(M/2e)", Some(beta), floor),
    ]
}

pub fn verify_thm_3_2(beta: C64, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let p = FamilyParams::real_part(beta)?;
    Ok(thm_3_2_checks(beta, &measure_chain(&p, cfg)?, cfg))
}

/// Brackets for the real-part family from measured `M̂` and `P̂_σ`.
pub fn thm_3_3_checks(beta: C64, m: &BoundReport, p: &BoundReport, cfg: &VerifyConfig) -> Vec<Check> {
    let b = real_part_brackets(beta);
    let tail = truncation_tail(beta, cfg.dim);
    let m_check = bracket(m, Some(b.m_floor()), Some(b.upper), cfg.m_tol, tail, cfg.norm_tol)
        .with_diagnostic("lower_first", b.first)
        .with_diagnostic("lower_second_plus", b.second_plus)
        .with_diagnostic("lower_second_minus", b.second_minus);
    let p_check = bracket(p, Some(real_part_p_floor(m.value)), Some(b.upper), cfg.p_tol, tail, cfg.norm_tol);
    let proof = bracket(m, None, Some(b.proof_upper), cfg.m_tol, tail, cfg.norm_tol).advisory();
    vec![
        Check::new(TheoremId::Thm3_3, "M", Some(beta), m_check),
        Check::new(TheoremId::Thm3_3, "P", Some(beta), p_check),
        Check::new(TheoremId::Thm3_3, "M-proof", Some(beta), proof),
    ]
}

pub fn verify_thm_3_3(beta: C64, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let p = FamilyParams::real_part(beta)?;
    let m = measure_m(&p, cfg)?;
    let pr = measure_p(&p, &SpectrumModel::Interval, cfg)?;
    Ok(thm_3_3_checks(beta, &m, &pr, cfg))
}

fn check_points(points: &[C64]) -> Result<SpectrumModel> {
    if points.is_empty() {
        return Err(Error::Invalid("E must be nonempty".into()));
    }
    if let Some(z) = points.iter().find(|z| (z.norm() - 1.0).abs() > 1e-12) {
        return Err(Error::Invalid(format!("E must lie on the unit circle, got {z}")));
    }
    Ok(SpectrumModel::FinitePoints(points.to_vec()))
}

/// `M̂ ≤ (e/2)·Ĉ²·#E` from measured values, `Ĉ = P̂_E`.
pub fn er_check(m: &BoundReport, c: &BoundReport, points: usize, cfg: &VerifyConfig) -> Check {
    let bound = E / 2.0 * c.value * c.value * points as f64;
    let r = ordering(Quantity::M, m.value, bound, cfg.m_tol, m.converged && c.converged)
        .with_diagnostic("C_hat", c.value)
        .with_diagnostic("card_E", points);
    Check::new(TheoremId::ErThm1_1, "M<=e/2*C^2*#E", None, r)
}

pub fn verify_er_bound(a: &TruncatedOperator, points: &[C64], cfg: &VerifyConfig) -> Result<Check> {
    cfg.validate()?;
    let model = check_points(points)?;
    let m = power_bound(a, cfg.n_max, cfg.norm_tol)?;
    let src = ResolventSource::for_operator(a, cfg.mode)?;
    let c = resolvent_condition_of(&src, &model, &cfg.grid)?;
    Ok(er_check(&m, &c, points.len(), cfg))
}

pub fn verify_er_bound_family(p: &FamilyParams, points: &[C64], cfg: &VerifyConfig) -> Result<Check> {
    cfg.validate()?;
    let model = check_points(points)?;
    let m = measure_m(p, cfg)?;
    let c = measure_p(p, &model, cfg)?;
    let mut check = er_check(&m, &c, points.len(), cfg);
    check.beta = Some([p.beta().re, p.beta().im]);
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn quick() -> VerifyConfig {
        VerifyConfig { dim: 96, n_max: 24, grid: GridSpec::logarithmic(16, 32), ..VerifyConfig::default() }
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(2.0647), "2.0647");
        assert_eq!(format_number(3.064_700_001), "3.0647");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(19.0), "19");
        assert_eq!(format_number(1234567.0), "1234567");
        assert_eq!(format_complex(c(0.9, 0.0)), "0.9");
        assert_eq!(format_complex(c(0.0, 0.6)), "0.6i");
        assert_eq!(format_complex(c(0.5, -0.25)), "0.5-0.25i");
    }

    #[test]
    fn line_format() {
        let r = BoundReport::new(Quantity::M, 2.31, true).with_bounds(Some(2.0647), Some(3.0647), 1e-3);
        let line = Check::new(TheoremId::Thm3_1, "M", Some(c(0.9, 0.0)), r).to_string();
        assert_eq!(line, "THM3.1[M] beta=0.9 value=2.31 in [2.0647,3.0647] PASS");
    }

    #[test]
    fn theorem_ids_parse() {
        assert_eq!("3.1".parse::<TheoremId>().unwrap(), TheoremId::Thm3_1);
        assert_eq!("PROP2.2".parse::<TheoremId>().unwrap(), TheoremId::Prop2_2);
        assert_eq!("lem6.1".parse::<TheoremId>().unwrap(), TheoremId::Lem6_1Norm);
        assert!("4.1".parse::<TheoremId>().is_err());
    }

    #[test]
    fn family_requirement_enforced() {
        let rp = FamilyParams::real_part(c(0.5, 0.0)).unwrap();
        assert!(TheoremCase::new(TheoremId::Thm3_1, CaseInput::Family(rp.clone()), quick()).is_err());
        assert!(TheoremCase::new(TheoremId::Thm3_3, CaseInput::Family(rp), quick()).is_ok());
        let m = TruncatedOperator::identity(3).unwrap();
        assert!(TheoremCase::new(TheoremId::Thm3_2, CaseInput::Matrix(m.clone()), quick()).is_err());
        assert!(TheoremCase::new(TheoremId::ErThm1_1, CaseInput::Matrix(m), quick()).is_ok());
    }

    #[test]
    fn invalid_beta_rejected() {
        assert!(verify_thm_3_1(c(0.0, 0.0), &quick()).is_err());
        assert!(verify_thm_3_3(c(1.0, 0.0), &quick()).is_err());
    }

    #[test]
    fn thm_3_1_small_case_passes() {
        let checks = verify_thm_3_1(c(0.5, 0.0), &quick()).unwrap();
        assert_eq!(checks.len(), 2);
        for ch in &checks {
            assert_eq!(ch.verdict(), Verdict::Pass, "{ch}");
        }
    }

    #[test]
    fn chain_on_self_adjoint_limit() {
        // g = 1 leaves T_{(z+z̄)/2} itself, a self-adjoint contraction.
        let p = FamilyParams::custom(crate::symbols::LaurentSymbol::real_part_z(), crate::symbols::LaurentSymbol::constant(c(1.0, 0.0))).unwrap();
        let m = measure_m(&p, &quick()).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn er_on_unimodular_diagonal() {
        let a = TruncatedOperator::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let ch = verify_er_bound(&a, &[c(-1.0, 0.0), c(1.0, 0.0)], &quick()).unwrap();
        assert!((ch.report.value - 1.0).abs() < 1e-12);
        assert!((ch.report.upper.unwrap() - E).abs() < 1e-6);
        assert_eq!(ch.verdict(), Verdict::Pass);
        assert!(verify_er_bound(&a, &[c(0.5, 0.0)], &quick()).is_err());
        assert!(verify_er_bound(&a, &[], &quick()).is_err());
    }

    #[test]
    fn unconverged_ordering_is_advisory() {
        let r = ordering(Quantity::M, 3.0, 2.0, 0.0, false);
        assert_eq!(r.verdict, Verdict::Advisory);
        let r = ordering(Quantity::M, 3.0, 2.0, 0.0, true);
        assert_eq!(r.verdict, Verdict::Fail);
    }
}
