use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    M,
    P,
    K,
    HY,
    #[serde(rename = "norm")]
    Norm,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Quantity::M => "M",
            Quantity::P => "P",
            Quantity::K => "K",
            Quantity::HY => "HY",
            Quantity::Norm => "norm",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Advisory,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Advisory => "ADVISORY",
            Verdict::Fail => "FAIL",
        })
    }
}

/// A computed quantity with optional theoretical brackets and a verdict.
///
/// `value` is a lower estimate of a supremum. Exceeding `upper + tolerance`
/// is always a failure; falling short of `lower − tolerance` is a failure
/// only when the estimate `converged`, and advisory otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub quantity: Quantity,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub argmax_lambda: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argmax_n: Option<usize>,
    pub refine_depth: Option<usize>,
    pub converged: bool,
    /// Per-index values, e.g. `‖Aⁿ‖` for `n = 0, 1, …`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<f64>,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, String>,
}

impl BoundReport {
    pub fn new(quantity: Quantity, value: f64, converged: bool) -> Self {
        let mut r = BoundReport {
            quantity,
            value,
            lower: None,
            upper: None,
            tolerance: 0.0,
            verdict: Verdict::Pass,
            argmax_lambda: None,
            argmax_n: None,
            refine_depth: None,
            converged,
            series: Vec::new(),
            diagnostics: BTreeMap::new(),
        };
        r.judge();
        r
    }

    /// Attaches brackets and re-evaluates the verdict.
    pub fn with_bounds(mut self, lower: Option<f64>, upper: Option<f64>, tolerance: f64) -> Self {
        self.lower = lower;
        self.upper = upper;
        self.tolerance = tolerance;
        self.judge();
        self
    }

    pub fn with_diagnostic(mut self, key: &str, value: impl ToString) -> Self {
        self.diagnostics.insert(key.to_string(), value.to_string());
        self
    }

    /// Downgrades a failure to advisory, for checks that are not hard claims.
    pub fn advisory(mut self) -> Self {
        if self.verdict == Verdict::Fail {
            self.verdict = Verdict::Advisory;
        }
        self.diagnostics.insert("policy".into(), "advisory".into());
        self
    }

    pub fn judge(&mut self) {
        self.verdict = if self.value.is_nan() {
            Verdict::Fail
        } else if self.upper.is_some_and(|u| self.value > u + self.tolerance) {
            Verdict::Fail
        } else if self.lower.is_some_and(|l| self.value < l - self.tolerance) {
            if self.converged {
                Verdict::Fail
            } else {
                Verdict::Advisory
            }
        } else if self.converged {
            Verdict::Pass
        } else {
            Verdict::Advisory
        };
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_semantics() {
        let r = BoundReport::new(Quantity::M, 2.0, true);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.clone().with_bounds(Some(1.0), Some(3.0), 0.0).verdict, Verdict::Pass);
        assert_eq!(r.clone().with_bounds(None, Some(1.9), 0.0).verdict, Verdict::Fail);
        assert_eq!(r.clone().with_bounds(None, Some(1.9), 0.2).verdict, Verdict::Pass);
        assert_eq!(r.clone().with_bounds(Some(2.5), None, 0.0).verdict, Verdict::Fail);
        let unconverged = BoundReport::new(Quantity::P, 2.0, false);
        assert_eq!(unconverged.verdict, Verdict::Advisory);
        assert_eq!(unconverged.clone().with_bounds(Some(2.5), None, 0.0).verdict, Verdict::Advisory);
        assert_eq!(unconverged.with_bounds(None, Some(1.0), 0.0).verdict, Verdict::Fail);
        assert_eq!(r.with_bounds(None, Some(1.0), 0.0).advisory().verdict, Verdict::Advisory);
    }

    #[test]
    fn json_keys() {
        let mut r = BoundReport::new(Quantity::P, 1.5, true).with_bounds(Some(1.0), Some(2.0), 1e-2);
        r.argmax_lambda = Some([1.2, -0.3]);
        r.refine_depth = Some(2);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["quantity"], "P");
        assert_eq!(v["verdict"], "Pass");
        assert_eq!(v["argmax_lambda"][0], 1.2);
        assert_eq!(v["refine_depth"], 2);
        let back: BoundReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
