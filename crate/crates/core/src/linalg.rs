//! Small dense linear-algebra helpers shared across modules.
//!
//! Full-register basis states are indexed by bit pattern: bit `k` of the index
//! is set when qubit `k` is excited. The vacuum + single-excitation sector
//! uses index 0 for the vacuum and `k + 1` for "only qubit `k` excited".

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Max-norm of `A - A†`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

#[inline]
pub fn is_excited(index: usize, qubit: usize) -> bool {
    (index >> qubit) & 1 == 1
}

/// Pauli matrices in the computational convention `|g> = (1, 0)`,
/// `|e> = (0, 1)`. Note that with this ordering `σ_z|g> = +|g>`.
pub fn pauli(index: usize) -> Matrix2<Complex64> {
    match index {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {index} out of range"),
    }
}

/// Reduced 2×2 density matrix of `qubit` from a full-register density matrix.
/// Row/column 0 is `|g>`, 1 is `|e>`.
pub fn reduce_to_qubit(rho: &CMatrix, qubit: usize) -> Matrix2<Complex64> {
    let dim = rho.nrows();
    let mut out = Matrix2::zeros();
    let mask = 1usize << qubit;
    for a in 0..dim {
        let ia = usize::from(a & mask != 0);
        for b in 0..dim {
            // Other qubits must agree for the partial trace.
            if (a & !mask) != (b & !mask) {
                continue;
            }
            let ib = usize::from(b & mask != 0);
            out[(ia, ib)] += rho[(a, b)];
        }
    }
    out
}

/// Reduced state of `qubit` from a pure full-register vector.
pub fn reduce_pure_to_qubit(psi: &CVector, qubit: usize) -> Matrix2<Complex64> {
    let mask = 1usize << qubit;
    let mut out = Matrix2::<Complex64>::zeros();
    for a in 0..psi.len() {
        if a & mask != 0 {
            continue;
        }
        let g = psi[a];
        let e = psi[a | mask];
        out[(0, 0)] += g * g.conj();
        out[(1, 1)] += e * e.conj();
        out[(0, 1)] += g * e.conj();
    }
    out[(1, 0)] = out[(0, 1)].conj();
    out
}

/// Kronecker product where `b` is the less significant factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Product-state density matrix from per-qubit 2×2 states (qubit 0 first).
pub fn product_density(qubits: &[Matrix2<Complex64>]) -> CMatrix {
    let mut acc = CMatrix::from_element(1, 1, ONE);
    // Highest qubit is the most significant factor.
    for q in qubits.iter().rev() {
        let m = CMatrix::from_fn(2, 2, |i, j| q[(i, j)]);
        acc = kron(&acc, &m);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_density_orders_qubits_by_bit() {
        let g = Matrix2::new(ONE, ZERO, ZERO, ZERO);
        let e = Matrix2::new(ZERO, ZERO, ZERO, ONE);
        // qubit 0 excited, qubit 1 ground -> index 0b01
        let rho = product_density(&[e, g]);
        assert_eq!(rho[(1, 1)], ONE);
        assert_eq!(reduce_to_qubit(&rho, 0)[(1, 1)], ONE);
        assert_eq!(reduce_to_qubit(&rho, 1)[(0, 0)], ONE);
    }

    #[test]
    fn pure_and_mixed_reductions_agree() {
        let psi = CVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]);
        let rho = &psi * psi.adjoint();
        for q in 0..2 {
            let a = reduce_to_qubit(&rho, q);
            let b = reduce_pure_to_qubit(&psi, q);
            assert!((a - b).norm() < 1e-14);
        }
    }
}
