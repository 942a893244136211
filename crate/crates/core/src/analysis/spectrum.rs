use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Model of the spectrum of the infinite-dimensional operator.
///
/// Truncations have different spectra (the truncated backward shift is
/// nilpotent), so distances are always taken to the model, never to
/// eigenvalues of a finite section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "points", rename_all = "kebab-case")]
pub enum SpectrumModel {
    UnitDisk,
    /// The real segment `[−1, 1]`.
    Interval,
    FinitePoints(Vec<Complex64>),
}

impl SpectrumModel {
    /// `{−1, 1}`.
    pub fn endpoints() -> Self {
        SpectrumModel::FinitePoints(vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn dist(&self, lambda: Complex64) -> f64 {
        dist_to_spectrum(lambda, self)
    }

    /// Arguments of spectral points, used as extra grid angles.
    pub fn anchor_angles(&self) -> Vec<f64> {
        match self {
            SpectrumModel::FinitePoints(pts) => pts.iter().filter(|p| p.norm() > 0.0).map(|p| p.arg()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SpectrumModel::UnitDisk => "unit-disk",
            SpectrumModel::Interval => "interval",
            SpectrumModel::FinitePoints(_) => "finite-points",
        }
    }
}

/// Euclidean distance from `λ` to the model spectrum.
pub fn dist_to_spectrum(lambda: Complex64, s: &SpectrumModel) -> f64 {
    match s {
        SpectrumModel::UnitDisk => (lambda.norm() - 1.0).max(0.0),
        SpectrumModel::Interval => {
            let (x, y) = (lambda.re.abs(), lambda.im.abs());
            if x <= 1.0 {
                y
            } else {
                (x - 1.0).hypot(y)
            }
        }
        SpectrumModel::FinitePoints(pts) => pts.iter().map(|p| (lambda - p).norm()).fold(f64::INFINITY, f64::min),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn examples() {
        assert_eq!(dist_to_spectrum(z(2.0, 0.0), &SpectrumModel::Interval), 1.0);
        assert_eq!(dist_to_spectrum(z(2.0, 0.0), &SpectrumModel::UnitDisk), 1.0);
        assert!((dist_to_spectrum(z(0.0, 2.0), &SpectrumModel::endpoints()) - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(dist_to_spectrum(z(0.0, 2.0), &SpectrumModel::Interval), 2.0);
        let l = z(0.5, 0.9);
        assert!((dist_to_spectrum(l, &SpectrumModel::Interval) - 0.9).abs() < 1e-15);
        let d = dist_to_spectrum(l, &SpectrumModel::endpoints());
        assert!((d - 1.06f64.sqrt()).abs() < 1e-15);
        assert!(d <= 2f64.sqrt() * 0.9);
    }

    #[test]
    fn inside_disk_is_zero() {
        assert_eq!(dist_to_spectrum(z(0.3, 0.1), &SpectrumModel::UnitDisk), 0.0);
        assert_eq!(dist_to_spectrum(z(-0.7, 0.0), &SpectrumModel::Interval), 0.0);
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&SpectrumModel::UnitDisk).unwrap();
        assert_eq!(s, r#"{"kind":"unit-disk"}"#);
        let back: SpectrumModel = serde_json::from_str(&serde_json::to_string(&SpectrumModel::endpoints()).unwrap()).unwrap();
        assert_eq!(back, SpectrumModel::endpoints());
    }
}
