use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(1 + √5)/2`, always a radial grid point.
pub const GOLDEN: f64 = 1.618_033_988_749_895;

/// Sampling of the exterior `{|λ| > 1}` in polar coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Radii `r > 1`, sorted ascending.
    pub radial: Vec<f64>,
    /// Number of equispaced angles.
    pub angular: usize,
    /// Refinement stops once the relative increment of the sup drops below this.
    pub refine_tol: f64,
    pub max_refine: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::logarithmic(60, 256)
    }
}

impl GridSpec {
    /// `radial` radii with `r − 1` log-spaced over `[1e−4, 1e2]`, plus the golden ratio.
    pub fn logarithmic(radial: usize, angular: usize) -> Self {
        let radial = radial.max(2);
        let mut r: Vec<f64> = (0..radial)
            .map(|i| 1.0 + 10f64.powf(-4.0 + 6.0 * i as f64 / (radial - 1) as f64))
            .collect();
        r.push(GOLDEN);
        r.sort_by(f64::total_cmp);
        r.dedup();
        GridSpec { radial: r, angular: angular.max(1), refine_tol: 1e-4, max_refine: 6 }
    }

    pub fn with_refinement(mut self, refine_tol: f64, max_refine: usize) -> Self {
        self.refine_tol = refine_tol;
        self.max_refine = max_refine;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial.is_empty() || self.angular == 0 {
            return Err(Error::Invalid("grid needs at least one radius and one angle".into()));
        }
        if let Some(r) = self.radial.iter().find(|r| !(**r > 1.0) || !r.is_finite()) {
            return Err(Error::Invalid(format!("grid radius {r} is not > 1")));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::Invalid("refine_tol must be positive".into()));
        }
        Ok(())
    }

    fn log_offsets(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.radial.iter().map(|r| (r - 1.0).ln()).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    }
}

/// Accuracy requested from a grid objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Accuracy {
    /// Initial sweep over every grid point; may trade accuracy for speed as
    /// long as the value never exceeds the true objective.
    Scan,
    /// The scan argmax and all refinement points.
    Fine,
}

/// Outcome of a refined grid maximization.
#[derive(Clone, Debug, PartialEq)]
pub struct SupSearch {
    pub value: f64,
    /// `None` when the `|λ| → ∞` limit beat every sampled point.
    pub argmax: Option<Complex64>,
    pub depth: usize,
    pub converged: bool,
    /// Best value after the initial grid and after each refinement level.
    pub history: Vec<f64>,
    pub last_increment: f64,
    pub evaluated: usize,
    pub failed: usize,
}

fn point(s: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(1.0 + s.exp(), theta)
}

/// Maximizes `objective` over the grid, then refines around the argmax on a
/// 3×3 stencil in `(ln(r − 1), θ)` whose spacing halves at each level.
///
/// The scan argmax is re-evaluated at [`Accuracy::Fine`] before refinement.
/// Grid points are evaluated in parallel; the reduction scans them in a fixed
/// order, so the result does not depend on the thread count. Points whose
/// objective fails are skipped; more than 10% failures is an error.
/// `far_field` is the analytic limit as `|λ| → ∞` and counts as a candidate.
pub fn grid_sup<F>(grid: &GridSpec, anchors: &[f64], far_field: f64, objective: F) -> Result<SupSearch>
where
    F: Fn(Complex64, Accuracy) -> Result<f64> + Sync,
{
    grid.validate()?;
    let s_axis = grid.log_offsets();
    let mut thetas: Vec<f64> = (0..grid.angular).map(|j| 2.0 * PI * j as f64 / grid.angular as f64).collect();
    for &a in anchors {
        let a = a.rem_euclid(2.0 * PI);
        if !thetas.iter().any(|t| (t - a).abs() < 1e-12) {
            thetas.push(a);
        }
    }
    thetas.sort_by(f64::total_cmp);

    let points: Vec<(f64, f64)> = s_axis.iter().flat_map(|&s| thetas.iter().map(move |&t| (s, t))).collect();
    let values: Vec<Option<f64>> = points
        .par_iter()
        .map(|&(s, t)| objective(point(s, t), Accuracy::Scan).ok().filter(|v| v.is_finite()))
        .collect();

    let failed = values.iter().filter(|v| v.is_none()).count();
    if failed * 10 > points.len() {
        return Err(Error::GridFailure { failed, total: points.len() });
    }
    if failed > 0 {
        log::warn!("{failed} of {} grid points skipped after solver failure", points.len());
    }
    let mut best: Option<(f64, usize)> = None;
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            if best.map_or(true, |(b, _)| v > b) {
                best = Some((v, i));
            }
        }
    }
    let Some((scan_val, idx)) = best else {
        return Err(Error::GridFailure { failed, total: points.len() });
    };
    let (mut bs, mut bt) = points[idx];
    let mut evaluated = points.len() + 1;
    let mut failed = failed;
    let mut best_val = match objective(point(bs, bt), Accuracy::Fine).ok().filter(|v| v.is_finite()) {
        Some(v) => v.max(scan_val),
        None => {
            failed += 1;
            scan_val
        }
    };

    let ds = local_gap(&s_axis, bs).unwrap_or(1.0);
    let dt = local_gap(&thetas, bt).unwrap_or(PI).min(2.0 * PI - thetas.last().unwrap() + thetas[0]).max(1e-12);
    let (s_lo, s_hi) = (s_axis[0], *s_axis.last().unwrap());

    let mut history = vec![best_val];
    let mut converged = false;
    let mut depth = 0;
    let mut last_increment = f64::INFINITY;
    for level in 1..=grid.max_refine {
        depth = level;
        let hs = ds / f64::powi(2.0, level as i32);
        let ht = dt / f64::powi(2.0, level as i32);
        let mut stencil = Vec::with_capacity(8);
        for i in -1i32..=1 {
            for j in -1i32..=1 {
                if i == 0 && j == 0 {
                    continue;
                }
                let s = (bs + i as f64 * hs).clamp(s_lo, s_hi);
                stencil.push((s, bt + j as f64 * ht));
            }
        }
        let vals: Vec<Option<f64>> = stencil
            .par_iter()
            .map(|&(s, t)| objective(point(s, t), Accuracy::Fine).ok().filter(|v| v.is_finite()))
            .collect();
        evaluated += stencil.len();
        failed += vals.iter().filter(|v| v.is_none()).count();
        let previous = best_val;
        for (p, v) in stencil.iter().zip(&vals) {
            if let Some(v) = *v {
                if v > best_val {
                    best_val = v;
                    bs = p.0;
                    bt = p.1;
                }
            }
        }
        history.push(best_val);
        last_increment = (best_val - previous) / previous.abs().max(f64::MIN_POSITIVE);
        if last_increment < grid.refine_tol {
            converged = true;
            break;
        }
    }

    let (value, argmax) = if far_field > best_val { (far_field, None) } else { (best_val, Some(point(bs, bt))) };
    Ok(SupSearch { value, argmax, depth, converged, history, last_increment, evaluated, failed })
}

fn local_gap(axis: &[f64], x: f64) -> Option<f64> {
    let i = axis.iter().position(|&a| a == x)?;
    let left = if i > 0 { Some(axis[i] - axis[i - 1]) } else { None };
    let right = axis.get(i + 1).map(|a| a - axis[i]);
    match (left, right) {
        (Some(l), Some(r)) => Some(l.min(r)),
        (l, r) => l.or(r),
    }
}
