use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::readout::{correct_readout, sample_readout, ConfusionMatrix};
use crate::linalg::pauli;
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn from_density(rho: &Matrix2<Complex64>) -> Self {
        Self {
            x: 2.0 * rho[(0, 1)].re,
            y: 2.0 * rho[(1, 0)].im,
            z: (rho[(0, 0)] - rho[(1, 1)]).re,
        }
    }

    pub fn length(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// ρ = (I + r·σ)/2.
    pub fn density(&self) -> Matrix2<Complex64> {
        let r = |v: f64| Complex64::new(v, 0.0);
        (pauli(0) + pauli(1) * r(self.x) + pauli(2) * r(self.y) + pauli(3) * r(self.z)) * r(0.5)
    }

    /// Nearest vector with |r| ≤ 1.
    pub fn projected(&self) -> Self {
        let l = self.length();
        if l <= 1.0 {
            *self
        } else {
            Self {
                x: self.x / l,
                y: self.y / l,
                z: self.z / l,
            }
        }
    }

    fn component(&self, basis: Basis) -> f64 {
        match basis {
            Basis::X => self.x,
            Basis::Y => self.y,
            Basis::Z => self.z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];
}

/// Probabilities of the +1 and −1 outcomes of the Pauli measurement.
pub fn basis_probabilities(rho: &Matrix2<Complex64>, basis: Basis) -> [f64; 2] {
    let r = BlochVector::from_density(rho).component(basis);
    let plus = (0.5 * (1.0 + r)).clamp(0.0, 1.0);
    [plus, 1.0 - plus]
}

#[derive(Debug, Clone, PartialEq)]
pub enum TomographyInput {
    Exact(Matrix2<Complex64>),
    /// Corrected (P_+, P_−) per basis, i.e. (P_g, P_e) after the basis
    /// pre-rotation.
    Measured {
        x: Option<[f64; 2]>,
        y: Option<[f64; 2]>,
        z: Option<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateEstimate {
    /// Linear-inversion estimate, possibly outside the Bloch ball.
    pub raw: BlochVector,
    /// Nearest physical state.
    pub physical: BlochVector,
}

impl StateEstimate {
    pub fn density(&self) -> Matrix2<Complex64> {
        self.physical.density()
    }
}

pub fn state_tomography(input: &TomographyInput) -> Result<StateEstimate> {
    let raw = match input {
        TomographyInput::Exact(rho) => BlochVector::from_density(rho),
        TomographyInput::Measured { x, y, z } => {
            let diff = |p: &Option<[f64; 2]>, name| p.map(|p| p[0] - p[1]).ok_or(Error::MissingBasis(name));
            BlochVector {
                x: diff(x, "x")?,
                y: diff(y, "y")?,
                z: diff(z, "z")?,
            }
        }
    };
    Ok(StateEstimate {
        raw,
        physical: raw.projected(),
    })
}

/// Samples every basis through `confusion`, corrects with its inverse and
/// reconstructs. Each basis draws from its own seed derived from `seed`.
pub fn simulate_state_tomography(
    rho: &Matrix2<Complex64>,
    confusion: &ConfusionMatrix,
    shots: u64,
    seed: u64,
) -> Result<StateEstimate> {
    let mut corrected = [[0.0; 2]; 3];
    for (i, basis) in Basis::ALL.iter().enumerate() {
        let counts = sample_readout(basis_probabilities(rho, *basis), confusion, shots, seed.wrapping_add(i as u64))?;
        corrected[i] = correct_readout(counts.fractions(), confusion)?;
    }
    state_tomography(&TomographyInput::Measured {
        x: Some(corrected[0]),
        y: Some(corrected[1]),
        z: Some(corrected[2]),
    })
}
