//! Versioned on-disk model format (JSON).

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::kernel::KernelContext;
use crate::psi::{PsiFactor, PsiSequence, SpectralParameter};
use crate::quadrature::QuadratureSpec;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub k: i64,
    pub factors: Vec<PsiFactor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Model {
    pub version: u32,
    pub z: SpectralParameter,
    pub columns: Vec<ColumnSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
}

impl Model {
    pub fn new(z: SpectralParameter, sequence: &PsiSequence) -> Self {
        Model {
            version: MODEL_SCHEMA_VERSION,
            z,
            columns: sequence
                .columns()
                .map(|(k, factors)| ColumnSpec { k, factors: factors.to_vec() })
                .collect(),
            quadrature: None,
        }
    }

    pub fn sequence(&self) -> PsiSequence {
        PsiSequence::from_columns(self.columns.iter().map(|c| (c.k, c.factors.clone())))
    }

    pub fn context(&self) -> Result<KernelContext> {
        if self.version != MODEL_SCHEMA_VERSION {
            return Err(Error::InvalidModel(format!(
                "unsupported model schema version {}",
                self.version
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.columns {
            if !seen.insert(c.k) {
                return Err(Error::InvalidModel(format!("duplicate column {}", c.k)));
            }
        }
        KernelContext::new(self.sequence(), self.z, self.quadrature.unwrap_or_default())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
