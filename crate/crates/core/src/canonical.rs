//! Model canonicalization: rescales the integration variable so |z| = 1 and
//! rewrites every pole-carrying "-"-kind factor as a constant times a power
//! of u times a "+"-kind factor. The constant conjugates the kernel, the
//! power of u shifts rows, and neither changes any correlation determinant.
//!
//! Concretely, with r = |z| and p the rescaled parameter,
//!
//!   (1 - p/u)^{-1} = (-1/p) u   (1 - u/p)^{-1}
//!   (1 + p/u)      =  p   u^{-1}(1 + u/p)
//!
//! Exponential factors e^{g/u} carry no poles and have no such rewriting;
//! they stay in the canonical sequence as-is.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::psi::{FactorKind, PsiFactor, PsiSequence, SpectralParameter, POLE_MARGIN};

/// The canonicalized model together with the bookkeeping needed to pull
/// kernel values back to the original coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub canonical_sequence: PsiSequence,
    /// Per-column power of u absorbed into the state space (row shift).
    pub shift_map: BTreeMap<i64, i64>,
    /// Per-column conjugation constant (real, possibly negative).
    pub conjugation: BTreeMap<i64, f64>,
    /// r = |z| of the original model.
    pub radial_scale: f64,
    /// Adjusted spectral parameter, always of modulus 1.
    pub z: SpectralParameter,
}

impl CanonicalForm {
    /// Cumulative row shift at column `sigma`: the sum of u-powers absorbed
    /// at columns <= sigma.
    pub fn row_shift(&self, sigma: i64) -> i64 {
        self.shift_map.range(..=sigma).map(|(_, n)| n).sum()
    }

    /// Conjugation factor relating original to canonical kernel values:
    /// K_orig(sigma, x; tau, y) = conj_factor(sigma, tau)
    ///     * K_can(sigma, x - row_shift(sigma); tau, y - row_shift(tau)).
    pub fn conj_factor(&self, sigma: i64, tau: i64) -> f64 {
        if sigma == tau {
            1.0
        } else if sigma > tau {
            self.conjugation.range(tau + 1..=sigma).map(|(_, c)| c).product()
        } else {
            self.conjugation
                .range(sigma + 1..=tau)
                .map(|(_, c)| 1.0 / c)
                .product()
        }
    }

    /// Maps an original site to canonical coordinates.
    pub fn to_canonical(&self, sigma: i64, x: i64) -> (i64, i64) {
        (sigma, x - self.row_shift(sigma))
    }

    /// Inverse of [`to_canonical`].
    pub fn from_canonical(&self, sigma: i64, x: i64) -> (i64, i64) {
        (sigma, x + self.row_shift(sigma))
    }

    /// Identity transform (model already canonical)?
    pub fn is_identity(&self) -> bool {
        self.shift_map.values().all(|n| *n == 0)
            && self.conjugation.values().all(|c| (c - 1.0).abs() == 0.0)
            && self.radial_scale == 1.0
    }
}

/// Reduces `(sequence, z)` to an equivalent model with |z| = 1 and only
/// "+"-kind pole-carrying factors.
pub fn canonicalize(sequence: &PsiSequence, z: SpectralParameter) -> Result<CanonicalForm> {
    sequence.validate()?;
    let r = z.modulus;
    let mut columns: Vec<(i64, Vec<PsiFactor>)> = Vec::new();
    let mut shift_map = BTreeMap::new();
    let mut conjugation = BTreeMap::new();

    for (k, factors) in sequence.columns() {
        let mut out = Vec::with_capacity(factors.len());
        let mut n_k = 0i64;
        let mut c_k = 1.0f64;
        for f in factors {
            // Substituting u = r v rescales "+" parameters by r and "-"
            // parameters by 1/r.
            let (kind, p) = match f.kind {
                FactorKind::AlphaPlus | FactorKind::BetaPlus | FactorKind::GammaPlus => {
                    (f.kind, f.param * r)
                }
                FactorKind::AlphaMinus | FactorKind::BetaMinus | FactorKind::GammaMinus => {
                    (f.kind, f.param / r)
                }
            };
            let converted = match kind {
                FactorKind::AlphaMinus => {
                    c_k *= -1.0 / p;
                    n_k += 1;
                    PsiFactor::new(FactorKind::AlphaPlus, 1.0 / p)?
                }
                FactorKind::BetaMinus => {
                    c_k *= p;
                    n_k -= 1;
                    PsiFactor::new(FactorKind::BetaPlus, 1.0 / p)?
                }
                _ => PsiFactor::new(kind, p)?,
            };
            if !converted.kind.is_gamma() && (converted.param - 1.0).abs() < POLE_MARGIN {
                return Err(Error::NotNormalizable {
                    column: k,
                    param: converted.param,
                });
            }
            out.push(converted);
        }
        shift_map.insert(k, n_k);
        conjugation.insert(k, c_k);
        columns.push((k, out));
    }

    Ok(CanonicalForm {
        canonical_sequence: PsiSequence::from_columns(columns),
        shift_map,
        conjugation,
        radial_scale: r,
        z: SpectralParameter::new(1.0, z.argument)?,
    })
}
