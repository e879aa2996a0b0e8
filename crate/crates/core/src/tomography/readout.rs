use nalgebra::{Matrix2, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::model::QubitParams;
use crate::{Error, Result};

/// Column-stochastic readout model [[F_g, 1−F_e], [1−F_g, F_e]] acting on
/// (P_g, P_e).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfusionMatrix {
    matrix: Matrix2<f64>,
}

impl ConfusionMatrix {
    pub fn new(fid_g: f64, fid_e: f64) -> Result<Self> {
        for (name, v) in [("readout_fid_g", fid_g), ("readout_fid_e", fid_e)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidProbability(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if fid_g + fid_e - 1.0 <= 0.0 {
            return Err(Error::Singular);
        }
        Ok(Self {
            matrix: Matrix2::new(fid_g, 1.0 - fid_e, 1.0 - fid_g, fid_e),
        })
    }

    pub fn ideal() -> Self {
        Self {
            matrix: Matrix2::identity(),
        }
    }

    pub fn from_qubit(q: &QubitParams) -> Result<Self> {
        Self::new(q.readout_fid_g, q.readout_fid_e)
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.matrix
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Reported (P_g, P_e) for true (P_g, P_e).
    pub fn apply(&self, populations: [f64; 2]) -> [f64; 2] {
        let v = self.matrix * Vector2::new(populations[0], populations[1]);
        [v[0], v[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadoutCounts {
    pub ground: u64,
    pub excited: u64,
}

impl ReadoutCounts {
    pub fn shots(&self) -> u64 {
        self.ground + self.excited
    }

    /// Measured (P_g, P_e).
    pub fn fractions(&self) -> [f64; 2] {
        let n = self.shots() as f64;
        [self.ground as f64 / n, self.excited as f64 / n]
    }
}

fn check_probabilities(p: [f64; 2]) -> Result<()> {
    if p.iter().any(|v| !(0.0..=1.0).contains(v)) || ((p[0] + p[1]) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbability(format!("({}, {}) is not a distribution", p[0], p[1])));
    }
    Ok(())
}

/// Draws `shots` single-shot outcomes from confusion·populations.
pub fn sample_readout(populations: [f64; 2], confusion: &ConfusionMatrix, shots: u64, seed: u64) -> Result<ReadoutCounts> {
    check_probabilities(populations)?;
    if shots == 0 {
        return Err(Error::validation("shots", "must be at least 1"));
    }
    let p_excited = confusion.apply(populations)[1].clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let excited = Binomial::new(shots, p_excited)
        .map_err(|e| Error::InvalidProbability(e.to_string()))?
        .sample(&mut rng);
    Ok(ReadoutCounts {
        ground: shots - excited,
        excited,
    })
}

/// P_f = F⁻¹·P_m. Entries may leave [0, 1] under sampling noise.
pub fn correct_readout(measured: [f64; 2], confusion: &ConfusionMatrix) -> Result<[f64; 2]> {
    let det = confusion.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::Singular);
    }
    let m = confusion.matrix();
    // Explicit 2×2 inverse keeps the round trip at rounding level.
    let g = (m[(1, 1)] * measured[0] - m[(0, 1)] * measured[1]) / det;
    let e = (-m[(1, 0)] * measured[0] + m[(0, 0)] * measured[1]) / det;
    Ok([g, e])
}

/// Raw correction clipped to [0, 1] and renormalized.
pub fn correct_readout_clamped(measured: [f64; 2], confusion: &ConfusionMatrix) -> Result<[f64; 2]> {
    let [g, e] = correct_readout(measured, confusion)?;
    let (g, e) = (g.clamp(0.0, 1.0), e.clamp(0.0, 1.0));
    let total = g + e;
    if total == 0.0 {
        return Ok([0.5, 0.5]);
    }
    Ok([g / total, e / total])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_readout_reports_truth() {
        let c = sample_readout([1.0, 0.0], &ConfusionMatrix::ideal(), 1000, 1).unwrap();
        assert_eq!(c, ReadoutCounts { ground: 1000, excited: 0 });
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let f = ConfusionMatrix::new(0.939, 0.858).unwrap();
        let a = sample_readout([0.5, 0.5], &f, 10_000, 7).unwrap();
        let b = sample_readout([0.5, 0.5], &f, 10_000, 7).unwrap();
        let c = sample_readout([0.5, 0.5], &f, 10_000, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_inputs() {
        let f = ConfusionMatrix::ideal();
        assert!(matches!(sample_readout([0.7, 0.7], &f, 10, 0), Err(Error::InvalidProbability(_))));
        assert!(sample_readout([1.0, 0.0], &f, 0, 0).is_err());
        assert!(matches!(ConfusionMatrix::new(0.5, 0.5), Err(Error::Singular)));
        assert!(ConfusionMatrix::new(1.2, 0.5).is_err());
    }

    #[test]
    fn clamped_variant_stays_physical() {
        let f = ConfusionMatrix::new(0.963, 0.898).unwrap();
        let raw = correct_readout([0.99, 0.01], &f).unwrap();
        assert!(raw[0] > 1.0);
        let clamped = correct_readout_clamped([0.99, 0.01], &f).unwrap();
        assert_eq!(clamped, [1.0, 0.0]);
    }
}
