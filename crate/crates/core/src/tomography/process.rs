use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix2, Matrix4, SMatrix, Vector4};

use crate::linalg::pauli;
use crate::{Complex64, Error, Result};

pub type Qubit2 = Matrix2<Complex64>;

/// |g>, |e>, (|g>+|e>)/√2, (|g>−i|e>)/√2 as density matrices.
pub fn standard_inputs() -> [Qubit2; 4] {
    let pure = |a: Complex64, b: Complex64| {
        let v = nalgebra::Vector2::new(a, b);
        v * v.adjoint()
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [
        pure(one, zero),
        pure(zero, one),
        pure(h, h),
        pure(h, Complex64::new(0.0, -FRAC_1_SQRT_2)),
    ]
}

/// Single-qubit process matrix over {I, X, Y, Z}:
/// E(ρ) = Σ χ_mn P_m ρ P_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiMatrix(pub Matrix4<Complex64>);

fn vec2(m: &Qubit2) -> Vector4<Complex64> {
    // column-major vectorization
    Vector4::new(m[(0, 0)], m[(1, 0)], m[(0, 1)], m[(1, 1)])
}

fn unvec2(v: &Vector4<Complex64>) -> Qubit2 {
    Matrix2::new(v[0], v[2], v[1], v[3])
}

impl ChiMatrix {
    pub fn identity() -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        ChiMatrix(m)
    }

    /// χ of ρ ↦ UρU†.
    pub fn from_unitary(u: &Qubit2) -> Self {
        // U = Σ u_m P_m with u_m = tr(P_m U)/2, χ_mn = u_m u_n*.
        let coeff: Vec<Complex64> = (0..4).map(|m| (pauli(m) * u).trace() * 0.5).collect();
        let mut chi = Matrix4::zeros();
        for m in 0..4 {
            for n in 0..4 {
                chi[(m, n)] = coeff[m] * coeff[n].conj();
            }
        }
        ChiMatrix(chi)
    }

    /// χ of an arbitrary linear map, probed on the standard inputs.
    pub fn from_channel<F: Fn(&Qubit2) -> Qubit2>(channel: F) -> Result<Self> {
        let pairs: Vec<(Qubit2, Qubit2)> = standard_inputs().iter().map(|r| (*r, channel(r))).collect();
        process_tomography(&pairs)
    }

    pub fn apply(&self, rho: &Qubit2) -> Qubit2 {
        let mut out = Qubit2::zeros();
        for m in 0..4 {
            for n in 0..4 {
                out += pauli(m) * rho * pauli(n) * self.0[(m, n)];
            }
        }
        out
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// max |Σ χ_mn P_n P_m − I|; zero for trace-preserving channels.
    pub fn trace_preservation_residual(&self) -> f64 {
        let mut s = Qubit2::zeros();
        for m in 0..4 {
            for n in 0..4 {
                s += pauli(n) * pauli(m) * self.0[(m, n)];
            }
        }
        (s - Qubit2::identity()).iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// Rows of (re, im) pairs for text serialization.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..4)
            .map(|i| (0..4).map(|j| [self.0[(i, j)].re, self.0[(i, j)].im]).collect())
            .collect()
    }
}

/// Reconstructs χ from input/output density matrices of four linearly
/// independent inputs.
pub fn process_tomography(pairs: &[(Qubit2, Qubit2)]) -> Result<ChiMatrix> {
    if pairs.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: pairs.len(),
        });
    }
    let mut inputs = Matrix4::<Complex64>::zeros();
    let mut outputs = Matrix4::<Complex64>::zeros();
    for (k, (i, o)) in pairs.iter().enumerate() {
        inputs.set_column(k, &vec2(i));
        outputs.set_column(k, &vec2(o));
    }
    let smallest = inputs.singular_values().min();
    if smallest < 1e-9 {
        return Err(Error::RankDeficient { smallest });
    }
    let inv = inputs.try_inverse().ok_or(Error::RankDeficient { smallest })?;
    let superop = outputs * inv;

    // Choi matrix J = Σ_ij |i><j| ⊗ E(|i><j|), first factor as the row block.
    let mut choi = SMatrix::<Complex64, 4, 4>::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let mut e = Qubit2::zeros();
            e[(i, j)] = Complex64::new(1.0, 0.0);
            let image = unvec2(&(superop * vec2(&e)));
            for a in 0..2 {
                for b in 0..2 {
                    choi[(2 * i + a, 2 * j + b)] = image[(a, b)];
                }
            }
        }
    }
    // χ_mn = <v_m|J|v_n>/4 with v_m = (I ⊗ P_m)|Ω>, |Ω> = Σ|ii>.
    let v: Vec<Vector4<Complex64>> = (0..4)
        .map(|m| {
            let p = pauli(m);
            let mut v = Vector4::zeros();
            for i in 0..2 {
                for a in 0..2 {
                    v[2 * i + a] = p[(a, i)];
                }
            }
            v
        })
        .collect();
    let mut chi = Matrix4::zeros();
    for m in 0..4 {
        for n in 0..4 {
            chi[(m, n)] = v[m].dotc(&(choi * v[n])) * 0.25;
        }
    }
    Ok(ChiMatrix(chi))
}

/// Re tr(χ_a χ_b) without clamping.
pub fn process_fidelity_raw(chi: &ChiMatrix, ideal: &ChiMatrix) -> Result<f64> {
    for c in [chi, ideal] {
        let dev = c.hermiticity_deviation();
        if dev > 1e-8 {
            return Err(Error::NonHermitian { deviation: dev });
        }
    }
    Ok((chi.0 * ideal.0).trace().re)
}

/// tr(χ_M χ_ideal), clamped into [0, 1].
pub fn process_fidelity(chi: &ChiMatrix, ideal: &ChiMatrix) -> Result<f64> {
    Ok(process_fidelity_raw(chi, ideal)?.clamp(0.0, 1.0))
}
