//! Named example models: geometric-progression column weights.
//!
//! The `beta` preset places one upward beta factor per column with
//! parameters in geometric progression, kappa * exp(k * tau_temp). The
//! `alphabeta` preset alternates a downward alpha factor at even columns 2k
//! with parameter 1 / (kappa * exp(k * tau_temp)) and an upward beta factor
//! at odd columns 2k+1 with parameter lambda * exp(k * tau_temp).
//!
//! `tau_temp` is the inverse temperature of the progression; at
//! tau_temp = 0 the model is fully translation invariant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::psi::{FactorKind, PsiFactor, PsiSequence, SpectralParameter};

/// Parameters below this floor (or above its inverse) cannot be rescued by
/// any radial rescaling and make the weights numerically degenerate.
pub const PARAM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum PresetSpec {
    Beta { kappa: f64, tau_temp: f64 },
    AlphaBeta { kappa: f64, lambda: f64, tau_temp: f64 },
}

impl PresetSpec {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            PresetSpec::Beta { kappa, tau_temp } => *kappa > 0.0 && *tau_temp >= 0.0,
            PresetSpec::AlphaBeta { kappa, lambda, tau_temp } => {
                *kappa > 0.0 && *lambda > 0.0 && *tau_temp >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(
                "preset needs kappa, lambda > 0 and tau_temp >= 0".into(),
            ))
        }
    }
}

fn checked_factor(column: i64, kind: FactorKind, param: f64) -> Result<PsiFactor> {
    if !param.is_finite() || !(PARAM_FLOOR..=1.0 / PARAM_FLOOR).contains(&param) {
        return Err(Error::RangeTooWide { column, param });
    }
    PsiFactor::new(kind, param)
}

/// Builds the concrete column sequence of a preset over `k_min..=k_max`
/// (progression indices; the alphabeta preset occupies columns 2k and
/// 2k+1).
pub fn instantiate_preset(spec: &PresetSpec, k_min: i64, k_max: i64) -> Result<PsiSequence> {
    spec.validate()?;
    if k_max < k_min {
        return Err(Error::InvalidModel("empty column range".into()));
    }
    let mut columns: Vec<(i64, Vec<PsiFactor>)> = Vec::new();
    for k in k_min..=k_max {
        match spec {
            PresetSpec::Beta { kappa, tau_temp } => {
                let p = kappa * (k as f64 * tau_temp).exp();
                columns.push((k, vec![checked_factor(k, FactorKind::BetaPlus, p)?]));
            }
            PresetSpec::AlphaBeta { kappa, lambda, tau_temp } => {
                let scale = (k as f64 * tau_temp).exp();
                columns.push((
                    2 * k,
                    vec![checked_factor(2 * k, FactorKind::AlphaMinus, 1.0 / (kappa * scale))?],
                ));
                columns.push((
                    2 * k + 1,
                    vec![checked_factor(2 * k + 1, FactorKind::BetaPlus, lambda * scale)?],
                ));
            }
        }
    }
    Ok(PsiSequence::from_columns(columns))
}

/// A radial modulus |z| that places every canonical parameter of the
/// sequence safely inside (0, 1): half the reciprocal of the largest
/// effective base. "-"-kind parameters enter through their reciprocals,
/// matching the canonicalization's conversions.
pub fn recommended_modulus(seq: &PsiSequence) -> f64 {
    let mut max_base = 0.0f64;
    for (_, factors) in seq.columns() {
        for f in factors {
            let base = match f.kind {
                FactorKind::AlphaPlus | FactorKind::BetaPlus => f.param,
                FactorKind::AlphaMinus | FactorKind::BetaMinus => 1.0 / f.param,
                FactorKind::GammaPlus | FactorKind::GammaMinus => continue,
            };
            max_base = max_base.max(base);
        }
    }
    if max_base > 0.0 {
        0.5 / max_base
    } else {
        1.0
    }
}

/// Convenience wrapper producing a saveable model for a preset.
pub fn preset_model(
    spec: &PresetSpec,
    k_min: i64,
    k_max: i64,
    z: SpectralParameter,
) -> Result<Model> {
    let seq = instantiate_preset(spec, k_min, k_max)?;
    Ok(Model::new(z, &seq))
}
