use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Finitely supported Laurent polynomial `f(z) = Σ c_k z^k` on the unit circle.
///
/// Negative indices stand for powers of `z̄` (on the circle `z̄ = 1/z`). Only
/// nonzero coefficients are stored, so every index outside the map is an exact
/// zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentSymbol {
    coeffs: BTreeMap<i64, Complex64>,
}

impl LaurentSymbol {
    /// Builds a symbol from `(index, coefficient)` pairs. Repeated indices are
    /// summed and exact zeros dropped.
    pub fn new<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        LaurentSymbol { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new([(0, c)])
    }

    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self::new([(k, c)])
    }

    /// `z̄`, the symbol of the backward shift.
    pub fn conj_z() -> Self {
        Self::monomial(-1, Complex64::new(1.0, 0.0))
    }

    /// `(z + z̄)/2`.
    pub fn real_part_z() -> Self {
        Self::new([(-1, Complex64::new(0.5, 0.0)), (1, Complex64::new(0.5, 0.0))])
    }

    /// The analytic conjugator `1 + βz`.
    pub fn one_plus_beta_z(beta: Complex64) -> Self {
        Self::new([(0, Complex64::new(1.0, 0.0)), (1, beta)])
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of nonzero subdiagonals of the Toeplitz matrix (highest positive index).
    pub fn lower_bandwidth(&self) -> usize {
        self.coeffs.keys().next_back().map_or(0, |&k| k.max(0) as usize)
    }

    /// Number of nonzero superdiagonals (highest power of `z̄`).
    pub fn upper_bandwidth(&self) -> usize {
        self.coeffs.keys().next().map_or(0, |&k| (-k).max(0) as usize)
    }

    pub fn is_analytic(&self) -> bool {
        self.coeffs.keys().all(|&k| k >= 0)
    }

    /// Evaluates `Σ c_k z^k`, reading negative indices as powers of `conj(z)`.
    /// For analytic symbols this is the holomorphic extension to the disk.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms()
            .map(|(k, c)| {
                if k >= 0 {
                    c * z.powi(k as i32)
                } else {
                    c * z.conj().powi((-k) as i32)
                }
            })
            .sum()
    }

    /// `Σ |c_k|`, an upper bound for `‖f‖_∞` on the circle.
    pub fn sup_norm_bound(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub(crate) fn require_analytic(&self) -> Result<()> {
        match self.coeffs.keys().find(|&&k| k < 0) {
            Some(&k) => Err(Error::NotAnalytic(k)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for LaurentSymbol {
    /// Writes the CLI grammar: `k:re,im` terms joined by `;`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                f.write_str(";")?;
            }
            first = false;
            write!(f, "{}:{:?},{:?}", k, c.re, c.im)?;
        }
        Ok(())
    }
}

impl FromStr for LaurentSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for raw in s.split(';') {
            let term = raw.trim();
            if term.is_empty() {
                continue;
            }
            let (idx, value) = term
                .split_once(':')
                .ok_or_else(|| Error::SymbolSyntax(format!("term `{term}` lacks `k:`")))?;
            let k: i64 = idx
                .trim()
                .parse()
                .map_err(|_| Error::SymbolSyntax(format!("bad index `{}`", idx.trim())))?;
            let c = parse_complex(value)
                .ok_or_else(|| Error::SymbolSyntax(format!("bad coefficient `{}`", value.trim())))?;
            terms.push((k, c));
        }
        Ok(LaurentSymbol::new(terms))
    }
}

/// Parses `re,im` (or a bare real `re`).
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    match s.split_once(',') {
        Some((re, im)) => Some(Complex64::new(re.trim().parse().ok()?, im.trim().parse().ok()?)),
        None => Some(Complex64::new(s.parse().ok()?, 0.0)),
    }
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    coeffs: BTreeMap<String, [f64; 2]>,
}

impl Serialize for LaurentSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .terms()
            .map(|(k, c)| (k.to_string(), [c.re, c.im]))
            .collect();
        SymbolJson { coeffs }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SymbolJson::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(raw.coeffs.len());
        for (k, [re, im]) in raw.coeffs {
            let k: i64 = k
                .parse()
                .map_err(|_| serde::de::Error::custom(format!("bad coefficient index `{k}`")))?;
            terms.push((k, Complex64::new(re, im)));
        }
        Ok(LaurentSymbol::new(terms))
    }
}
