use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::grid::{grid_sup, Accuracy, GridSpec, SupSearch};
use super::norms::{spectral_radius, NORM_SEED};
use super::{dist_to_spectrum, BoundReport, Quantity, SpectrumModel};
use crate::error::{Error, Result};
use crate::linalg::{largest_singular_value, largest_singular_value_within, LinearMap, PowerMap, C64};
use crate::operators::{ResolventMap, StructuredOperator};
use crate::symbols::{BuildMode, Family, FamilyParams, Provenance, TruncatedOperator};

/// Relative tolerance of every resolvent-norm evaluation on the grid.
pub const GRID_NORM_TOL: f64 = 1e-10;

/// Krylov cycles per point of the initial grid scan. Away from the spectrum
/// the top singular values of the resolvent cluster and the residual test
/// stalls; the Ritz value reached by then is a lower bound within a few 1e−4.
pub const SCAN_MAX_RESTARTS: usize = 1;

/// Dimension up to which the Kreiss precondition `ρ(A) ≤ 1` is checked.
const RADIUS_CHECK_DIM: usize = 128;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolventMode {
    /// Closed form when the provenance allows it, finite-section solve otherwise.
    #[default]
    Auto,
    ClosedForm,
    FiniteSection,
}

/// Where resolvents `(λI − A)⁻¹` come from.
#[derive(Clone, Debug)]
pub enum ResolventSource {
    /// Solve with the (structured) finite section itself.
    Operator(StructuredOperator),
    /// Compression of the exact resolvent of the conjugated backward shift.
    ConjShiftClosedForm { beta: C64, dim: usize },
}

impl ResolventSource {
    pub fn for_operator(a: &TruncatedOperator, mode: ResolventMode) -> Result<Self> {
        let closed = match a.provenance() {
            Provenance::Family { family: Family::ConjugateShift, beta, .. } => Some(*beta),
            _ => None,
        };
        match (mode, closed) {
            (ResolventMode::FiniteSection, _) | (ResolventMode::Auto, None) => {
                Ok(ResolventSource::Operator(StructuredOperator::from_operator(a)))
            }
            (_, Some(beta)) => Ok(ResolventSource::ConjShiftClosedForm { beta, dim: a.dim() }),
            (ResolventMode::ClosedForm, None) => {
                Err(Error::UnsupportedMode("closed-form resolvent for an operator without conjugate-shift provenance".into()))
            }
        }
    }

    /// Source for a family operator without materializing the dense matrix.
    pub fn family(p: &FamilyParams, n: usize, mode: ResolventMode) -> Result<Self> {
        match (mode, p.family()) {
            (ResolventMode::Auto | ResolventMode::ClosedForm, Family::ConjugateShift) => {
                Ok(ResolventSource::ConjShiftClosedForm { beta: p.beta(), dim: n })
            }
            (ResolventMode::ClosedForm, other) => {
                Err(Error::UnsupportedMode(format!("closed-form resolvent of the {} family", other.label())))
            }
            _ => Ok(ResolventSource::Operator(StructuredOperator::family(p, n, BuildMode::FiniteSection)?)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ResolventSource::Operator(s) => s.dim(),
            ResolventSource::ConjShiftClosedForm { dim, .. } => *dim,
        }
    }

    pub fn resolvent(&self, lambda: C64) -> Result<ResolventMap> {
        match self {
            ResolventSource::Operator(s) => s.resolvent(lambda),
            ResolventSource::ConjShiftClosedForm { beta, dim } => ResolventMap::conj_shift_closed_form(*beta, lambda, *dim),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ResolventSource::Operator(s) if s.is_dense() => "finite-section dense",
            ResolventSource::Operator(_) => "finite-section structured",
            ResolventSource::ConjShiftClosedForm { .. } => "closed-form",
        }
    }
}

/// `sup_{|λ|>1} dist(λ, S)·‖(λI − A)⁻¹‖` over the refined grid.
pub fn resolvent_condition(
    a: &TruncatedOperator,
    spectrum: &SpectrumModel,
    grid: &GridSpec,
    mode: ResolventMode,
) -> Result<BoundReport> {
    resolvent_condition_of(&ResolventSource::for_operator(a, mode)?, spectrum, grid)
}

pub fn resolvent_condition_of(src: &ResolventSource, spectrum: &SpectrumModel, grid: &GridSpec) -> Result<BoundReport> {
    let unconverged = AtomicUsize::new(0);
    let objective = |lambda: C64, acc: Accuracy| -> Result<f64> {
        let r = src.resolvent(lambda)?;
        Ok(dist_to_spectrum(lambda, spectrum) * resolvent_power_norm(&r, 1, acc, &unconverged))
    };
    let search = grid_sup(grid, &spectrum.anchor_angles(), 1.0, objective)?;
    Ok(sup_report(Quantity::P, &search, grid, src, unconverged.into_inner()).with_diagnostic("spectrum", spectrum.label()))
}

/// The objective `dist(λ, S)·‖(λI − A)⁻¹‖` at a single point.
pub fn resolvent_condition_at(src: &ResolventSource, spectrum: &SpectrumModel, lambda: C64) -> Result<f64> {
    let r = src.resolvent(lambda)?;
    let est = largest_singular_value(&r, GRID_NORM_TOL, NORM_SEED);
    Ok(dist_to_spectrum(lambda, spectrum) * est.value)
}

/// Kreiss constant `sup_{|λ|>1} (|λ| − 1)‖(λI − A)⁻¹‖`; identical to
/// [`resolvent_condition`] with the unit-disk model.
pub fn kreiss_constant(a: &TruncatedOperator, grid: &GridSpec) -> Result<BoundReport> {
    warn_if_not_in_disk(a);
    let src = ResolventSource::for_operator(a, ResolventMode::Auto)?;
    let mut r = resolvent_condition_of(&src, &SpectrumModel::UnitDisk, grid)?;
    r.quantity = Quantity::K;
    Ok(r)
}

/// `sup_{1 ≤ n ≤ n_max} sup_{|λ|>1} (|λ| − 1)ⁿ ‖(λI − A)⁻ⁿ‖`, resolvent powers
/// by repeated solves. At `n_max = 1` this is the Kreiss constant, computed by
/// exactly the same arithmetic.
pub fn hille_yosida_constant(a: &TruncatedOperator, n_max: usize, grid: &GridSpec) -> Result<BoundReport> {
    warn_if_not_in_disk(a);
    hille_yosida_of(&ResolventSource::for_operator(a, ResolventMode::Auto)?, n_max, grid)
}

pub fn hille_yosida_of(src: &ResolventSource, n_max: usize, grid: &GridSpec) -> Result<BoundReport> {
    if n_max == 0 {
        return Err(Error::Invalid("n_max must be at least 1".into()));
    }
    let unconverged = AtomicUsize::new(0);
    let objective = |lambda: C64, acc: Accuracy| -> Result<f64> {
        let r = src.resolvent(lambda)?;
        let d = dist_to_spectrum(lambda, &SpectrumModel::UnitDisk);
        let mut best = f64::NEG_INFINITY;
        for n in 1..=n_max {
            best = best.max(d.powi(n as i32) * resolvent_power_norm(&r, n, acc, &unconverged));
        }
        Ok(best)
    };
    let search = grid_sup(grid, &[], 1.0, objective)?;
    Ok(sup_report(Quantity::HY, &search, grid, src, unconverged.into_inner())
        .with_diagnostic("spectrum", SpectrumModel::UnitDisk.label())
        .with_diagnostic("hy_n_max", n_max))
}

/// Unconverged estimates are Ritz values, hence lower bounds, and are kept.
fn resolvent_power_norm(r: &ResolventMap, n: usize, acc: Accuracy, unconverged: &AtomicUsize) -> f64 {
    let map = PowerMap { base: r, power: n };
    let est = match acc {
        Accuracy::Scan => largest_singular_value_within(&map, GRID_NORM_TOL, NORM_SEED, SCAN_MAX_RESTARTS),
        Accuracy::Fine => largest_singular_value(&map, GRID_NORM_TOL, NORM_SEED),
    };
    if acc == Accuracy::Fine && !est.converged {
        unconverged.fetch_add(1, Ordering::Relaxed);
    }
    est.value
}

fn sup_report(q: Quantity, s: &SupSearch, grid: &GridSpec, src: &ResolventSource, unconverged: usize) -> BoundReport {
    let r_min = grid.radial.first().copied().unwrap_or(f64::NAN) - 1.0;
    let r_max = grid.radial.last().copied().unwrap_or(f64::NAN) - 1.0;
    let mut r = BoundReport::new(q, s.value, s.converged)
        .with_diagnostic("resolvent", src.label())
        .with_diagnostic("dim", src.dim())
        .with_diagnostic("annulus", format!("r-1 in [{r_min:e}, {r_max:e}]"))
        .with_diagnostic("grid_points", s.evaluated)
        .with_diagnostic("failed_points", s.failed)
        .with_diagnostic("grid_gap", if s.last_increment.is_finite() { s.last_increment } else { 0.0 })
        .with_diagnostic("far_field_limit", s.argmax.is_none())
        .with_diagnostic("fine_lanczos_unconverged", unconverged);
    r.argmax_lambda = s.argmax.map(|z| [z.re, z.im]);
    r.refine_depth = Some(s.depth);
    r.series = s.history.clone();
    r
}

fn warn_if_not_in_disk(a: &TruncatedOperator) {
    if a.dim() <= RADIUS_CHECK_DIM {
        let rho = spectral_radius(a);
        if rho.value > 1.0 + 1e-8 {
            log::warn!("spectral radius {} exceeds 1; resolvent sup may be unbounded", rho.value);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::build_operator;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn small_grid() -> GridSpec {
        GridSpec::logarithmic(24, 32)
    }

    #[test]
    fn trivial_kreiss_constants() {
        let g = small_grid();
        for a in [
            TruncatedOperator::identity(3).unwrap(),
            TruncatedOperator::zeros(3).unwrap(),
            TruncatedOperator::diagonal(&[c(0.5), c(-0.5)]).unwrap(),
        ] {
            let k = kreiss_constant(&a, &g).unwrap();
            assert!((k.value - 1.0).abs() < 1e-3, "{}", k.value);
            let hy = hille_yosida_constant(&a, 4, &g).unwrap();
            assert!((hy.value - 1.0).abs() < 1e-3, "{}", hy.value);
        }
    }

    #[test]
    fn hy_at_one_is_kreiss_bitwise() {
        let a = TruncatedOperator::from_real_rows(&[&[0.3, 0.8], &[0.0, -0.4]]).unwrap();
        let g = small_grid();
        let k = kreiss_constant(&a, &g).unwrap();
        let hy = hille_yosida_constant(&a, 1, &g).unwrap();
        assert_eq!(k.value.to_bits(), hy.value.to_bits());
        assert_eq!(k.argmax_lambda, hy.argmax_lambda);
    }

    #[test]
    fn jordan_block_matches_brute_force() {
        // ‖(λ − J)⁻¹‖ depends only on r = |λ|: the largest singular value of
        // [[1/r, 1/r²], [0, 1/r]] is (1 + √(1 + 4r²))/(2r²). The objective
        // increases towards its limit 1, so the oracle runs far past the grid.
        let oracle = (1..=300_000)
            .map(|i| 1.0 + 1e-4 * 1.0001f64.powi(i))
            .take_while(|r| *r < 1e6)
            .map(|r| (r - 1.0) * (1.0 + (1.0 + 4.0 * r * r).sqrt()) / (2.0 * r * r))
            .fold(0.0, f64::max);
        let j = TruncatedOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let k = kreiss_constant(&j, &GridSpec::default()).unwrap();
        assert!((k.value - oracle).abs() < 1e-3, "{} vs {oracle}", k.value);
    }

    #[test]
    fn diagonal_with_own_spectrum_is_one() {
        let d = [c(0.5), C64::new(0.0, -0.9), c(-1.0)];
        let a = TruncatedOperator::diagonal(&d).unwrap();
        let r = resolvent_condition(&a, &SpectrumModel::FinitePoints(d.to_vec()), &small_grid(), ResolventMode::Auto).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn interval_below_endpoints() {
        let p = FamilyParams::real_part(C64::new(0.0, 0.5)).unwrap();
        let a = build_operator(&p, 64, BuildMode::FiniteSection).unwrap();
        let g = small_grid();
        let pi = resolvent_condition(&a, &SpectrumModel::Interval, &g, ResolventMode::Auto).unwrap();
        let pe = resolvent_condition(&a, &SpectrumModel::endpoints(), &g, ResolventMode::Auto).unwrap();
        assert!(pi.value <= pe.value + 1e-6);
        assert!(pi.value >= 1.0);
    }

    #[test]
    fn closed_form_only_with_provenance() {
        let a = TruncatedOperator::identity(3).unwrap();
        assert!(matches!(
            resolvent_condition(&a, &SpectrumModel::UnitDisk, &small_grid(), ResolventMode::ClosedForm),
            Err(Error::UnsupportedMode(_))
        ));
        let p = FamilyParams::conjugate_shift(c(0.5)).unwrap();
        let a = build_operator(&p, 32, BuildMode::FiniteSection).unwrap();
        assert!(matches!(
            ResolventSource::for_operator(&a, ResolventMode::Auto).unwrap(),
            ResolventSource::ConjShiftClosedForm { .. }
        ));
    }

    #[test]
    fn thread_count_does_not_matter() {
        let p = FamilyParams::conjugate_shift(C64::new(0.3, 0.4)).unwrap();
        let a = build_operator(&p, 64, BuildMode::FiniteSection).unwrap();
        let g = small_grid();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| resolvent_condition(&a, &SpectrumModel::UnitDisk, &g, ResolventMode::Auto).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
