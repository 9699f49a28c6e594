//! Column weight functions: ordered lists of elementary factors attached to
//! lattice columns, and the spectral parameter fixing the contour endpoints.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub const POLE_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    AlphaPlus,
    AlphaMinus,
    BetaPlus,
    BetaMinus,
    GammaPlus,
    GammaMinus,
}

impl FactorKind {
    pub fn is_alpha(self) -> bool {
        matches!(self, FactorKind::AlphaPlus | FactorKind::AlphaMinus)
    }

    pub fn is_beta(self) -> bool {
        matches!(self, FactorKind::BetaPlus | FactorKind::BetaMinus)
    }

    pub fn is_gamma(self) -> bool {
        matches!(self, FactorKind::GammaPlus | FactorKind::GammaMinus)
    }

    pub fn is_plus(self) -> bool {
        matches!(
            self,
            FactorKind::AlphaPlus | FactorKind::BetaPlus | FactorKind::GammaPlus
        )
    }
}

/// One elementary factor of a column weight: (1 - a u)^{-1}, (1 - a/u)^{-1},
/// (1 + b u), (1 + b/u), e^{g u} or e^{g/u}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiFactor {
    pub kind: FactorKind,
    pub param: f64,
}

impl PsiFactor {
    pub fn new(kind: FactorKind, param: f64) -> Result<Self> {
        if !(param > 0.0) || !param.is_finite() {
            return Err(Error::InvalidModel(format!(
                "factor parameter must be a positive real, got {param}"
            )));
        }
        Ok(PsiFactor { kind, param })
    }

    /// Evaluates this factor at `u`.
    pub fn eval(&self, u: Complex64) -> Result<Complex64> {
        let a = self.param;
        match self.kind {
            FactorKind::AlphaPlus => {
                let denom = 1.0 - a * u;
                guard_pole(denom, Complex64::new(1.0 / a, 0.0))?;
                Ok(denom.inv())
            }
            FactorKind::AlphaMinus => {
                let denom = 1.0 - a / u;
                guard_pole(denom, Complex64::new(a, 0.0))?;
                Ok(denom.inv())
            }
            FactorKind::BetaPlus => Ok(1.0 + a * u),
            FactorKind::BetaMinus => Ok(1.0 + a / u),
            FactorKind::GammaPlus => Ok((a * u).exp()),
            FactorKind::GammaMinus => Ok((a / u).exp()),
        }
    }
}

fn guard_pole(denom: Complex64, pole: Complex64) -> Result<()> {
    // Machine-scaled threshold: treat |1 - a u| below ~1e3 eps as a hit.
    if denom.norm() < 1e3 * f64::EPSILON {
        return Err(Error::PoleHit {
            pole,
            dist: denom.norm(),
        });
    }
    Ok(())
}

/// Product over a factor list at `u`; the empty list is the constant 1.
pub fn eval_psi(factors: &[PsiFactor], u: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for f in factors {
        acc *= f.eval(u)?;
    }
    Ok(acc)
}

/// Finitely supported assignment of factor lists to columns; columns outside
/// the support carry the identity weight.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PsiSequence {
    factors: BTreeMap<i64, Vec<PsiFactor>>,
}

impl PsiSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_columns(columns: impl IntoIterator<Item = (i64, Vec<PsiFactor>)>) -> Self {
        let mut factors = BTreeMap::new();
        for (k, list) in columns {
            if !list.is_empty() {
                factors.insert(k, list);
            }
        }
        PsiSequence { factors }
    }

    pub fn column(&self, k: i64) -> &[PsiFactor] {
        self.factors.get(&k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn columns(&self) -> impl Iterator<Item = (i64, &[PsiFactor])> {
        self.factors.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    /// Support interval [k_min, k_max], or None for the identity sequence.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = self.factors.keys().next()?;
        let hi = self.factors.keys().next_back()?;
        Some((*lo, *hi))
    }

    /// Product of all column weights for columns in (lo, hi], at `u`.
    pub fn eval_range(&self, lo: i64, hi: i64, u: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        if lo >= hi {
            return Ok(acc);
        }
        for (_, list) in self.factors.range(lo + 1..=hi) {
            acc *= eval_psi(list, u)?;
        }
        Ok(acc)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, list) in &self.factors {
            for f in list {
                if !(f.param > 0.0) || !f.param.is_finite() {
                    return Err(Error::InvalidModel(format!(
                        "column {k}: factor parameter must be positive, got {}",
                        f.param
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The complex number z with Im z > 0 fixing the contour endpoints,
/// stored in polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    pub modulus: f64,
    pub argument: f64,
}

impl SpectralParameter {
    pub fn new(modulus: f64, argument: f64) -> Result<Self> {
        if !(modulus > 0.0) || !modulus.is_finite() {
            return Err(Error::InvalidModel(format!(
                "spectral modulus must be positive, got {modulus}"
            )));
        }
        if !(argument > 0.0 && argument < std::f64::consts::PI) {
            return Err(Error::InvalidModel(format!(
                "spectral argument must lie in (0, pi), got {argument}"
            )));
        }
        Ok(SpectralParameter { modulus, argument })
    }

    /// z = i, the discrete sine kernel at density 1/2.
    pub fn unit_i() -> Self {
        SpectralParameter {
            modulus: 1.0,
            argument: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.argument)
    }
}
