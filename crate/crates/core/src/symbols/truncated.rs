use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Family, LaurentSymbol};
use crate::error::{Error, Result};

/// How a finite section was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuildMode {
    /// Compress each factor to `N×N`, then multiply.
    FiniteSection,
    /// Truncate the closed-form rank-one expression.
    ClosedForm,
}

/// Construction descriptor carried alongside every matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Toeplitz {
        symbol: LaurentSymbol,
    },
    AnalyticInverse {
        symbol: LaurentSymbol,
    },
    Family {
        family: Family,
        beta: Complex64,
        f: LaurentSymbol,
        g: LaurentSymbol,
        mode: BuildMode,
        formula: String,
    },
    ClosedFormPower {
        beta: Complex64,
        power: usize,
        formula: String,
    },
    ClosedFormResolvent {
        beta: Complex64,
        lambda: Complex64,
    },
    FiniteSectionResolvent {
        lambda: Complex64,
        condition_estimate: f64,
        refined: bool,
    },
    Derived {
        operation: String,
    },
    External {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance::External { label: None }
    }
}

/// Dense `N×N` complex matrix plus its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    data: DMatrix<Complex64>,
    provenance: Provenance,
}

impl TruncatedOperator {
    pub fn new(data: DMatrix<Complex64>, provenance: Provenance) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch(data.nrows(), data.ncols()));
        }
        if data.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(TruncatedOperator { data, provenance })
    }

    pub fn external(data: DMatrix<Complex64>) -> Result<Self> {
        Self::new(data, Provenance::default())
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n), Provenance::Derived { operation: "identity".into() })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(n, n), Provenance::Derived { operation: "zero".into() })
    }

    /// Square matrix from real entries, row-major.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(n, row.len()));
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(x, 0.0);
            }
        }
        Self::external(m)
    }

    pub fn diagonal(d: &[Complex64]) -> Result<Self> {
        Self::external(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.data[(m, n)]
    }

    /// Leading `k×k` block.
    pub fn leading_block(&self, k: usize) -> DMatrix<Complex64> {
        let k = k.min(self.dim());
        self.data.view((0, 0), (k, k)).into_owned()
    }

    pub fn mul(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.require_same_dim(other)?;
        Self::new(&self.data * &other.data, Provenance::Derived { operation: "product".into() })
    }

    pub fn adjoint(&self) -> TruncatedOperator {
        TruncatedOperator {
            data: self.data.adjoint(),
            provenance: Provenance::Derived { operation: "adjoint".into() },
        }
    }

    /// `n`-th matrix power by repeated squaring.
    pub fn pow(&self, n: usize) -> TruncatedOperator {
        let mut result = DMatrix::identity(self.dim(), self.dim());
        let mut base = self.data.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        TruncatedOperator { data: result, provenance: Provenance::Derived { operation: format!("power {n}") } }
    }

    pub(crate) fn require_same_dim(&self, other: &TruncatedOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    /// Reads the operator JSON format.
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dim: usize,
    #[serde(default)]
    provenance: Provenance,
    data: Vec<[f64; 2]>,
}

impl Serialize for TruncatedOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.data[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        OperatorJson { dim: n, provenance: self.provenance.clone(), data }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = OperatorJson::deserialize(deserializer)?;
        let n = raw.dim;
        if n == 0 || raw.data.len() != n * n {
            return Err(D::Error::custom(format!(
                "operator JSON: dim {n} needs {} entries, found {}",
                n * n,
                raw.data.len()
            )));
        }
        let data = DMatrix::from_fn(n, n, |i, j| {
            let [re, im] = raw.data[i * n + j];
            Complex64::new(re, im)
        });
        Ok(TruncatedOperator { data, provenance: raw.provenance })
    }
}
