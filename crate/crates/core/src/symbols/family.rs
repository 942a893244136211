use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LaurentSymbol;
use crate::error::{Error, Result};

/// Which conjugated operator `T_g⁻¹ T_f T_g` to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Family {
    /// `f = z̄`, `g = 1 + βz`.
    ConjugateShift,
    /// `f = (z + z̄)/2`, `g = 1 + βz`.
    RealPart,
    /// Arbitrary Laurent `f` and analytic `g` with `g(0) ≠ 0`.
    Custom { f: LaurentSymbol, g: LaurentSymbol },
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::ConjugateShift => "conj-shift",
            Family::RealPart => "real-part",
            Family::Custom { .. } => "custom",
        }
    }
}

/// Family plus its parameter `β` (the ratio `b/a` of the conjugator `a + bz`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    beta: Complex64,
    family: Family,
}

impl FamilyParams {
    pub fn conjugate_shift(beta: Complex64) -> Result<Self> {
        check_beta(beta)?;
        Ok(FamilyParams { beta, family: Family::ConjugateShift })
    }

    pub fn real_part(beta: Complex64) -> Result<Self> {
        check_beta(beta)?;
        Ok(FamilyParams { beta, family: Family::RealPart })
    }

    /// Custom composite. `beta` is reported as `g₁/g₀` and is informational only.
    pub fn custom(f: LaurentSymbol, g: LaurentSymbol) -> Result<Self> {
        g.require_analytic()?;
        let g0 = g.coeff(0);
        if g0 == Complex64::new(0.0, 0.0) {
            return Err(Error::SingularSymbol);
        }
        let beta = g.coeff(1) / g0;
        Ok(FamilyParams { beta, family: Family::Custom { f, g } })
    }

    pub fn new(family: Family, beta: Complex64) -> Result<Self> {
        match family {
            Family::ConjugateShift => Self::conjugate_shift(beta),
            Family::RealPart => Self::real_part(beta),
            Family::Custom { f, g } => Self::custom(f, g),
        }
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn f(&self) -> LaurentSymbol {
        match &self.family {
            Family::ConjugateShift => LaurentSymbol::conj_z(),
            Family::RealPart => LaurentSymbol::real_part_z(),
            Family::Custom { f, .. } => f.clone(),
        }
    }

    pub fn g(&self) -> LaurentSymbol {
        match &self.family {
            Family::ConjugateShift | Family::RealPart => LaurentSymbol::one_plus_beta_z(self.beta),
            Family::Custom { g, .. } => g.clone(),
        }
    }

    /// Same family with `β` replaced by `|β|`.
    pub fn with_modulus_only(&self) -> Self {
        match self.family {
            Family::Custom { .. } => self.clone(),
            _ => FamilyParams { beta: Complex64::new(self.beta.norm(), 0.0), family: self.family.clone() },
        }
    }
}

fn check_beta(beta: Complex64) -> Result<()> {
    let m = beta.norm();
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::InvalidBeta(m));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_guard() {
        assert!(matches!(
            FamilyParams::conjugate_shift(Complex64::new(1.0, 0.0)),
            Err(Error::InvalidBeta(_))
        ));
        assert!(FamilyParams::real_part(Complex64::new(0.0, 0.0)).is_err());
        assert!(FamilyParams::real_part(Complex64::new(0.0, 0.99)).is_ok());
    }

    #[test]
    fn custom_guards() {
        let f = LaurentSymbol::conj_z();
        let g: LaurentSymbol = "0:0,0;1:1,0".parse().unwrap();
        assert!(matches!(FamilyParams::custom(f.clone(), g), Err(Error::SingularSymbol)));
        let g: LaurentSymbol = "-1:1,0;0:1,0".parse().unwrap();
        assert!(matches!(FamilyParams::custom(f, g), Err(Error::NotAnalytic(-1))));
    }

    #[test]
    fn named_symbols() {
        let p = FamilyParams::real_part(Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(p.f(), LaurentSymbol::real_part_z());
        assert_eq!(p.g().coeff(1), Complex64::new(0.5, 0.0));
    }
}
