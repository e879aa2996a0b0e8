use crate::linalg::{self, CMatrix};
use crate::model::{QuantumState, StateData};
use crate::{Complex64, Error, Result};

/// exp(−iHt) from the eigendecomposition of a Hermitian `h`.
pub fn propagator(h: &CMatrix, t: f64) -> Result<CMatrix> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            actual: h.ncols(),
        });
    }
    let deviation = linalg::hermiticity_deviation(h);
    if deviation > 1e-10 * linalg::max_abs(h).max(1.0) {
        return Err(Error::NonHermitian { deviation });
    }
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lambda * t);
        let col = v.column(j) * phase;
        scaled.set_column(j, &col);
    }
    Ok(scaled * v.adjoint())
}

/// ψ(t) = exp(−iHt)ψ₀, or UρU† for mixed states.
pub fn evolve_exact(h: &CMatrix, initial: &QuantumState, t: f64) -> Result<QuantumState> {
    if h.nrows() != initial.dim() {
        return Err(Error::DimensionMismatch {
            expected: initial.dim(),
            actual: h.nrows(),
        });
    }
    let u = propagator(h, t)?;
    let data = match initial.data() {
        StateData::Pure(v) => StateData::Pure(&u * v),
        StateData::Mixed(m) => StateData::Mixed(&u * m * u.adjoint()),
    };
    Ok(QuantumState::from_parts(initial.n_qubits(), initial.representation(), data))
}
