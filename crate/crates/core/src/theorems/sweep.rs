use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{measure_m, measure_p, thm_3_1_checks, thm_3_3_checks, Check, VerifyConfig};
use crate::analysis::{GridSpec, ResolventMode, SpectrumModel, Verdict};
use crate::error::{Error, Result};
use crate::export::csv_float;
use crate::linalg::C64;
use crate::symbols::{Family, FamilyParams};

/// Growth-rate sweep over `|β| = 1 − 2^{−k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: Family,
    pub betas: Vec<C64>,
    pub n_max: usize,
    pub grid: GridSpec,
    pub norm_tol: f64,
    pub mode: ResolventMode,
    /// `N` is the smallest dimension with `|β|^N` below this.
    pub tail_target: f64,
    pub min_dim: usize,
    /// Rows needing a larger `N` are skipped with a warning.
    pub max_dim: usize,
}

impl SweepConfig {
    /// `β = (1 − 2^{−k}) e^{iφ}` for `k` in `k_lo..=k_hi`.
    pub fn new(family: Family, phase: f64, k_lo: u32, k_hi: u32) -> Result<Self> {
        if !matches!(family, Family::ConjugateShift | Family::RealPart) {
            return Err(Error::UnsupportedMode("sweeps cover the two named families only".into()));
        }
        if k_lo == 0 || k_lo > k_hi || k_hi > 52 {
            return Err(Error::Invalid(format!("bad k range {k_lo}..{k_hi}")));
        }
        let betas = (k_lo..=k_hi).map(|k| C64::from_polar(1.0 - 2f64.powi(-(k as i32)), phase)).collect();
        Ok(SweepConfig {
            family,
            betas,
            n_max: 64,
            grid: GridSpec::logarithmic(30, 64),
            norm_tol: 1e-10,
            mode: ResolventMode::Auto,
            tail_target: 1e-8,
            min_dim: 64,
            max_dim: 8192,
        })
    }

    /// Smallest `N ≥ min_dim` with `|β|^N < tail_target`.
    pub fn dim_for(&self, beta: C64) -> usize {
        let n = (self.tail_target.ln() / beta.norm().ln()).ceil();
        (n.max(0.0) as usize + 1).max(self.min_dim)
    }

    /// Expected slope ranges of `log M̂` and `log P̂` against `log(1 − |β|)`,
    /// widened by the fit tolerances 0.1 and 0.15.
    pub fn expected(&self) -> ([f64; 2], [f64; 2]) {
        match self.family {
            Family::ConjugateShift => ([-0.6, -0.4], [-0.65, -0.35]),
            _ => ([-1.1, -0.4], [-1.15, -0.1]),
        }
    }
}

/// Least-squares line with a 95% confidence halfwidth on the slope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub halfwidth: f64,
    pub points: usize,
}

/// Fits `y = a + b x`; needs at least five points.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::DimensionMismatch(n, y.len()));
    }
    if n < 5 {
        return Err(Error::TooFewPoints(n));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Invalid("fit abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - intercept - slope * xi).powi(2)).sum();
    let se = (rss / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0).map_err(|e| Error::Invalid(e.to_string()))?.inverse_cdf(0.975);
    Ok(SlopeFit { slope, intercept, halfwidth: t * se, points: n })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: [f64; 2],
    pub dim: usize,
    pub n_max: usize,
    /// Bracket checks on `M̂` and `P̂`, in that order.
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl SweepRow {
    pub fn m(&self) -> f64 {
        self.checks[0].report.value
    }

    pub fn p(&self) -> f64 {
        self.checks[1].report.value
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub family: Family,
    pub rows: Vec<SweepRow>,
    /// `β` values skipped because they needed `N > max_dim`.
    pub skipped: Vec<[f64; 2]>,
    pub m_fit: SlopeFit,
    pub p_fit: SlopeFit,
    pub m_expected: [f64; 2],
    pub p_expected: [f64; 2],
    pub m_verdict: Verdict,
    pub p_verdict: Verdict,
}

impl SweepReport {
    /// One row per `β`; `_lo`/`_hi` are the bracket ends, empty when absent.
    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(csv_float).unwrap_or_default();
        let mut out = String::from("beta_re,beta_im,N,n_max,M_hat,M_lo,M_hi,P_hat,P_lo,P_hi,verdict\n");
        for r in &self.rows {
            let (m, p) = (&r.checks[0].report, &r.checks[1].report);
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                csv_float(r.beta[0]),
                csv_float(r.beta[1]),
                r.dim,
                r.n_max,
                csv_float(m.value),
                opt(m.lower),
                opt(m.upper),
                csv_float(p.value),
                opt(p.lower),
                opt(p.upper),
                r.verdict
            ));
        }
        out
    }

    /// `slope=…±…` lines for `M̂` and `P̂`.
    pub fn slope_lines(&self) -> Vec<String> {
        let line = |name: &str, f: &SlopeFit, range: [f64; 2], v: Verdict| {
            format!(
                "{name} slope={:.4}±{:.4} expected [{}, {}] {v}",
                f.slope, f.halfwidth, range[0], range[1]
            )
        };
        vec![
            line("M", &self.m_fit, self.m_expected, self.m_verdict),
            line("P", &self.p_fit, self.p_expected, self.p_verdict),
        ]
    }
}

fn slope_verdict(fit: &SlopeFit, range: [f64; 2]) -> Verdict {
    if fit.slope >= range[0] && fit.slope <= range[1] {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn run_row(cfg: &SweepConfig, beta: C64, dim: usize) -> Result<SweepRow> {
    let p = FamilyParams::new(cfg.family.clone(), beta)?;
    let vc = VerifyConfig {
        dim,
        n_max: cfg.n_max,
        grid: cfg.grid.clone(),
        norm_tol: cfg.norm_tol,
        mode: cfg.mode,
        ..VerifyConfig::default()
    };
    let (checks, spectrum) = match cfg.family {
        Family::ConjugateShift => (true, SpectrumModel::UnitDisk),
        _ => (false, SpectrumModel::Interval),
    };
    let m = measure_m(&p, &vc)?;
    let pr = measure_p(&p, &spectrum, &vc)?;
    let mut checks = if checks { thm_3_1_checks(beta, &m, &pr, &vc) } else { thm_3_3_checks(beta, &m, &pr, &vc) };
    checks.truncate(2);
    let verdict = checks.iter().map(Check::verdict).max().unwrap_or(Verdict::Pass);
    Ok(SweepRow { beta: [beta.re, beta.im], dim, n_max: cfg.n_max, checks, verdict })
}

/// Runs every row, then fits `log M̂` and `log P̂` against `log(1 − |β|)`.
pub fn sweep_growth(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.grid.validate()?;
    let mut planned = Vec::new();
    let mut skipped = Vec::new();
    for &b in &cfg.betas {
        if !(b.norm() > 0.0 && b.norm() < 1.0) {
            return Err(Error::InvalidBeta(b.norm()));
        }
        let dim = cfg.dim_for(b);
        if dim > cfg.max_dim {
            log::warn!("beta = {b} needs N = {dim} > {}; row skipped", cfg.max_dim);
            skipped.push([b.re, b.im]);
        } else {
            planned.push((b, dim));
        }
    }
    if planned.len() < 5 {
        return Err(Error::TooFewPoints(planned.len()));
    }
    let rows = planned.par_iter().map(|&(b, dim)| run_row(cfg, b, dim)).collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|r| (1.0 - C64::new(r.beta[0], r.beta[1]).norm()).ln()).collect();
    let m_fit = fit_slope(&x, &rows.iter().map(|r| r.m().ln()).collect::<Vec<_>>())?;
    let p_fit = fit_slope(&x, &rows.iter().map(|r| r.p().ln()).collect::<Vec<_>>())?;
    let (m_expected, p_expected) = cfg.expected();
    Ok(SweepReport {
        family: cfg.family.clone(),
        skipped,
        m_verdict: slope_verdict(&m_fit, m_expected),
        p_verdict: slope_verdict(&p_fit, p_expected),
        rows,
        m_fit,
        p_fit,
        m_expected,
        p_expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_fit() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 1.5 - 0.5 * v).collect();
        let f = fit_slope(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14);
        assert!((f.intercept - 1.5).abs() < 1e-14);
        assert!(f.halfwidth < 1e-12);
    }

    #[test]
    fn halfwidth_matches_textbook() {
        // residuals ±0.1 alternate; se = sqrt(rss/(n−2)/sxx)
        let x = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [0.1, 0.9, 2.1, 2.9, 4.1, 4.9];
        let f = fit_slope(&x, &y).unwrap();
        let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - f.intercept - f.slope * a).powi(2)).sum();
        let se = (rss / 4.0 / 17.5f64).sqrt();
        assert!((f.halfwidth - 2.7764451 * se).abs() < 1e-6);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(fit_slope(&[1.0], &[1.0]), Err(Error::TooFewPoints(1))));
        let mut cfg = SweepConfig::new(Family::ConjugateShift, 0.0, 2, 2).unwrap();
        cfg.grid = GridSpec::logarithmic(4, 4);
        assert!(matches!(sweep_growth(&cfg), Err(Error::TooFewPoints(1))));
    }

    #[test]
    fn auto_dimension() {
        let cfg = SweepConfig::new(Family::ConjugateShift, 0.0, 2, 8).unwrap();
        for &b in &cfg.betas {
            let n = cfg.dim_for(b);
            assert!(b.norm().powi(n as i32) < 1e-8);
            assert!(n == cfg.min_dim || b.norm().powi(n as i32 - 2) >= 1e-8);
        }
        assert!(cfg.dim_for(cfg.betas[6]) < 8192);
    }

    #[test]
    fn oversized_rows_are_skipped() {
        let mut cfg = SweepConfig::new(Family::ConjugateShift, 0.0, 1, 6).unwrap();
        cfg.max_dim = 200;
        cfg.grid = GridSpec::logarithmic(4, 4);
        cfg.n_max = 4;
        // k = 4, 5, 6 need N > 200, leaving three rows
        assert!(matches!(sweep_growth(&cfg), Err(Error::TooFewPoints(3))));
    }
}
