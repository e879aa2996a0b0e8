use nalgebra::DMatrix;

use crate::{Error, Result};

/// Inputs with a larger 2-norm condition number are rejected.
pub const MAX_CONDITION_NUMBER: f64 = 1e6;

/// Line-to-qubit frequency response M_z together with its inverse M̃_z.
#[derive(Debug, Clone, PartialEq)]
pub struct CrosstalkMatrix {
    pub response: DMatrix<f64>,
    pub correction: DMatrix<f64>,
    /// max |M_z·M̃_z − I|
    pub residual: f64,
}

impl CrosstalkMatrix {
    pub fn new(response: DMatrix<f64>) -> Result<Self> {
        let correction = orthogonalize(&response)?;
        let residual = identity_residual(&response, &correction);
        Ok(Self {
            response,
            correction,
            residual,
        })
    }

    /// Builds the pair from a known correction matrix M̃_z.
    pub fn from_correction(correction: DMatrix<f64>) -> Result<Self> {
        let response = orthogonalize(&correction)?;
        let residual = identity_residual(&response, &correction);
        Ok(Self {
            response,
            correction,
            residual,
        })
    }

    /// Rows of M_z that fail |diag| > Σ|off-diag|. Physical devices are
    /// expected to return an empty list; this is advisory only.
    pub fn non_dominant_rows(&self) -> Vec<usize> {
        let m = &self.response;
        (0..m.nrows())
            .filter(|&i| {
                let off: f64 = (0..m.ncols()).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
                m[(i, i)].abs() <= off
            })
            .collect()
    }

    pub fn apply(&self, desired: &[f64]) -> Result<Vec<f64>> {
        apply_correction(&self.correction, desired)
    }
}

fn identity_residual(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (a * b - DMatrix::<f64>::identity(n, n)).amax()
}

/// M̃_z = M_z⁻¹, guarded by a condition-number check.
pub fn orthogonalize(response: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = response.nrows();
    if response.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: response.ncols(),
        });
    }
    if n == 0 || response.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("calibration.crosstalk", "matrix must be non-empty and finite"));
    }
    let sv = response.singular_values();
    let (max, min) = (sv.max(), sv.min());
    if min == 0.0 {
        return Err(Error::Singular);
    }
    let condition = max / min;
    if condition >= MAX_CONDITION_NUMBER {
        return Err(Error::IllConditioned { condition });
    }
    let inverse = response.clone().lu().try_inverse().ok_or(Error::Singular)?;
    // One step of iterative refinement keeps the round trip at rounding level.
    let n_id = DMatrix::<f64>::identity(n, n);
    let residual = &n_id - response * &inverse;
    Ok(&inverse + &inverse * residual)
}

/// Line drives x = M̃_z·desired that realize the requested frequency shifts.
pub fn apply_correction(correction: &DMatrix<f64>, desired: &[f64]) -> Result<Vec<f64>> {
    if correction.ncols() != desired.len() {
        return Err(Error::DimensionMismatch {
            expected: correction.ncols(),
            actual: desired.len(),
        });
    }
    Ok((0..correction.nrows())
        .map(|i| (0..desired.len()).map(|j| correction[(i, j)] * desired[j]).sum())
        .collect())
}
