//! The TOML configuration document and the bundled device defaults.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::calibration::{CrosstalkMatrix, LineResponse};
use crate::model::{ChainConfig, TransferSchedule};
use crate::{Error, Result};

/// Bundled default document: the measured four-qubit device.
pub const DEFAULT_CONFIG: &str = include_str!("default_config.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferSettings {
    /// τ in ns.
    pub duration: f64,
    /// φ_1..φ_{N−1} in radians. Empty means all zero.
    #[serde(default)]
    pub phases: Vec<f64>,
}

impl Default for TransferSettings {
    fn default() -> Self {
        Self {
            duration: 84.0,
            phases: Vec::new(),
        }
    }
}

impl TransferSettings {
    pub fn phases_for(&self, n_qubits: usize) -> Vec<f64> {
        if self.phases.is_empty() {
            vec![0.0; n_qubits.saturating_sub(1)]
        } else {
            self.phases.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSettings {
    /// Overrides every qubit's T2* (µs) when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_t2_star: Option<f64>,
    /// Enables the thermal excitation channel at each qubit's `thermal_pop`.
    #[serde(default)]
    pub thermal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutSettings {
    pub shots: u64,
}

impl Default for ReadoutSettings {
    fn default() -> Self {
        Self { shots: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSettings {
    /// M̃_z rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosstalk_correction: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub line_response: LineResponse,
    /// Absolute Tikhonov λ; the relative default applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularization: Option<f64>,
}

impl CalibrationSettings {
    pub fn crosstalk(&self) -> Result<Option<CrosstalkMatrix>> {
        let Some(rows) = &self.crosstalk_correction else {
            return Ok(None);
        };
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::validation(
                    format!("calibration.crosstalk_correction[{i}]"),
                    format!("expected {n} entries, found {}", r.len()),
                ));
            }
        }
        let m = DMatrix::from_row_iterator(n, n, rows.iter().flatten().copied());
        CrosstalkMatrix::from_correction(m).map(Some)
    }
}

/// Complete configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub chain: ChainConfig,
    #[serde(default)]
    pub transfer: TransferSettings,
    /// A fixed schedule; synthesized from `transfer` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<TransferSchedule>,
    #[serde(default)]
    pub noise: NoiseSettings,
    #[serde(default)]
    pub readout: ReadoutSettings,
    #[serde(default)]
    pub calibration: CalibrationSettings,
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    /// Checks every invariant, reporting the offending field path.
    pub fn validate(&self) -> Result<()> {
        self.chain.validate()?;
        let n = self.chain.len();
        if !(self.transfer.duration.is_finite() && self.transfer.duration > 0.0) {
            return Err(Error::validation("transfer.duration", "must be positive"));
        }
        if !self.transfer.phases.is_empty() && self.transfer.phases.len() != n - 1 {
            return Err(Error::validation(
                "transfer.phases",
                format!("expected {} phases, found {}", n - 1, self.transfer.phases.len()),
            ));
        }
        if let Some(s) = &self.schedule {
            s.validate_against(&self.chain)?;
        }
        if let Some(t2) = self.noise.uniform_t2_star {
            for (i, q) in self.chain.qubits.iter().enumerate() {
                if !(t2 > 0.0 && t2 <= 2.0 * q.t1) {
                    return Err(Error::validation(
                        "noise.uniform_t2_star",
                        format!("{t2} µs is unphysical for qubit {i} (t1 = {} µs)", q.t1),
                    ));
                }
            }
        }
        if self.readout.shots == 0 {
            return Err(Error::validation("readout.shots", "must be at least 1"));
        }
        if let Some(c) = self.calibration.crosstalk()? {
            if c.correction.nrows() != n {
                return Err(Error::validation(
                    "calibration.crosstalk_correction",
                    format!("expected a {n}×{n} matrix"),
                ));
            }
        }
        self.calibration.line_response.validate("calibration.line_response")?;
        if let Some(l) = self.calibration.regularization {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::validation("calibration.regularization", "must be non-negative"));
            }
        }
        Ok(())
    }

    /// Chain with the configured noise overrides applied.
    pub fn noisy_chain(&self) -> ChainConfig {
        let mut chain = self.chain.clone();
        if let Some(t2) = self.noise.uniform_t2_star {
            for q in &mut chain.qubits {
                q.t2_star = t2;
            }
        }
        chain
    }
}

/// The bundled default document.
pub fn default_document() -> ConfigDocument {
    ConfigDocument::parse(DEFAULT_CONFIG).expect("bundled configuration is valid")
}

/// The bundled four-qubit chain.
pub fn reference_chain() -> ChainConfig {
    default_document().chain
}
