use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::linalg::{self, CMatrix, CVector, ONE, ZERO};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Full 2^N register.
    Full,
    /// Vacuum plus the N single-excitation states (dimension N+1).
    Sector,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Pure(CVector),
    Mixed(CMatrix),
}

/// Pure or mixed state of an N-qubit chain in either representation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    representation: Representation,
    data: StateData,
}

pub(crate) fn dimension(n_qubits: usize, representation: Representation) -> usize {
    match representation {
        Representation::Full => 1 << n_qubits,
        Representation::Sector => n_qubits + 1,
    }
}

impl QuantumState {
    pub fn new(n_qubits: usize, representation: Representation, data: StateData) -> Result<Self> {
        let dim = dimension(n_qubits, representation);
        let actual = match &data {
            StateData::Pure(v) => v.len(),
            StateData::Mixed(m) => {
                if m.nrows() != m.ncols() {
                    return Err(Error::DimensionMismatch {
                        expected: m.nrows(),
                        actual: m.ncols(),
                    });
                }
                m.nrows()
            }
        };
        if actual != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual });
        }
        let state = Self {
            n_qubits,
            representation,
            data,
        };
        state.validate()?;
        Ok(state)
    }

    /// Constructor for integrator output; skips the positivity check.
    pub(crate) fn from_parts(n_qubits: usize, representation: Representation, data: StateData) -> Self {
        Self {
            n_qubits,
            representation,
            data,
        }
    }

    /// `qubit` in α|g> + β|e>, all other qubits in |g>.
    pub fn single_qubit(
        n_qubits: usize,
        representation: Representation,
        qubit: usize,
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::validation("initial.qubit", format!("qubit {qubit} outside chain of {n_qubits}")));
        }
        let dim = dimension(n_qubits, representation);
        let mut v = CVector::zeros(dim);
        match representation {
            Representation::Full => {
                v[0] = alpha;
                v[1 << qubit] = beta;
            }
            Representation::Sector => {
                v[0] = alpha;
                v[qubit + 1] = beta;
            }
        }
        Self::new(n_qubits, representation, StateData::Pure(v))
    }

    pub fn ground(n_qubits: usize, representation: Representation) -> Self {
        let mut v = CVector::zeros(dimension(n_qubits, representation));
        v[0] = ONE;
        Self::from_parts(n_qubits, representation, StateData::Pure(v))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn dim(&self) -> usize {
        dimension(self.n_qubits, self.representation)
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn vector(&self) -> Option<&CVector> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Mixed(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.data {
            StateData::Pure(v) => {
                let n = v.norm();
                if (n - 1.0).abs() > 1e-9 {
                    return Err(Error::validation("state", format!("norm {n} differs from 1")));
                }
            }
            StateData::Mixed(m) => {
                let herm = linalg::hermiticity_deviation(m);
                if herm > 1e-12 {
                    return Err(Error::NonHermitian { deviation: herm });
                }
                let tr = m.trace().re;
                if (tr - 1.0).abs() > 1e-9 {
                    return Err(Error::validation("state", format!("trace {tr} differs from 1")));
                }
                let min = min_eigenvalue(m);
                if min < -1e-9 {
                    return Err(Error::validation("state", format!("negative eigenvalue {min}")));
                }
            }
        }
        Ok(())
    }

    /// Euclidean norm for pure states, trace for mixed ones.
    pub fn norm_or_trace(&self) -> f64 {
        match &self.data {
            StateData::Pure(v) => v.norm(),
            StateData::Mixed(m) => m.trace().re,
        }
    }

    /// Embeds a sector state into the full register; full states are cloned.
    pub fn to_full(&self) -> Self {
        if self.representation == Representation::Full {
            return self.clone();
        }
        let n = self.n_qubits;
        let map = |i: usize| if i == 0 { 0 } else { 1usize << (i - 1) };
        let dim = 1 << n;
        let data = match &self.data {
            StateData::Pure(v) => {
                let mut out = CVector::zeros(dim);
                for (i, z) in v.iter().enumerate() {
                    out[map(i)] = *z;
                }
                StateData::Pure(out)
            }
            StateData::Mixed(m) => {
                let mut out = CMatrix::zeros(dim, dim);
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        out[(map(i), map(j))] = m[(i, j)];
                    }
                }
                StateData::Mixed(out)
            }
        };
        Self::from_parts(n, Representation::Full, data)
    }

    pub fn density_matrix(&self) -> CMatrix {
        match &self.data {
            StateData::Pure(v) => v * v.adjoint(),
            StateData::Mixed(m) => m.clone(),
        }
    }

    /// Same state stored as a density matrix.
    pub fn to_mixed(&self) -> Self {
        Self::from_parts(self.n_qubits, self.representation, StateData::Mixed(self.density_matrix()))
    }

    /// Excited-state probability of every qubit.
    pub fn populations(&self) -> Vec<f64> {
        let n = self.n_qubits;
        let diag: Vec<f64> = match &self.data {
            StateData::Pure(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            StateData::Mixed(m) => (0..m.nrows()).map(|i| m[(i, i)].re).collect(),
        };
        match self.representation {
            Representation::Sector => diag[1..].to_vec(),
            Representation::Full => (0..n)
                .map(|q| {
                    diag.iter()
                        .enumerate()
                        .filter(|(i, _)| linalg::is_excited(*i, q))
                        .map(|(_, p)| p)
                        .sum()
                })
                .collect(),
        }
    }

    /// Reduced 2×2 density matrix of one qubit (index 0 = |g>).
    pub fn reduced_qubit(&self, qubit: usize) -> Matrix2<Complex64> {
        match self.representation {
            Representation::Full => match &self.data {
                StateData::Pure(v) => linalg::reduce_pure_to_qubit(v, qubit),
                StateData::Mixed(m) => linalg::reduce_to_qubit(m, qubit),
            },
            Representation::Sector => {
                let rho = self.density_matrix();
                let k = qubit + 1;
                let ee = rho[(k, k)];
                let total = rho.trace();
                let ge = rho[(0, k)];
                Matrix2::new(total - ee, ge, ge.conj(), ee)
            }
        }
    }

    /// |<other|self>|² for pure states, tr(ρσ) otherwise.
    pub fn overlap(&self, other: &QuantumState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(match (&self.data, &other.data) {
            (StateData::Pure(a), StateData::Pure(b)) => a.dotc(b).norm_sqr(),
            _ => (self.density_matrix() * other.density_matrix()).trace().re,
        })
    }
}

pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()).scale(0.5);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[allow(dead_code)]
pub(crate) fn basis_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::from_element(dim, ZERO);
    v[index] = ONE;
    v
}
