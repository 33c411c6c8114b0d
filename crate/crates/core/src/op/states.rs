//! Standard states and operators on qubits and qutrits.
//!
//! Conventions: qutrit levels are `|0>, |1>` (computational) and `|2>`
//! (loss level). `X_q` and `Z_q` act on the computational block and
//! annihilate / zero out `|2>`.

use num_complex::Complex64;

use crate::op::{HilbertShape, Operator};

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::ZERO;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Basis ket `|k>` of a `dim`-dimensional factor.
pub fn basis_ket(dim: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    v[k] = ONE;
    v
}

/// `|0> + |1>` normalized (qubit).
pub fn ket_plus() -> Vec<Complex64> {
    vec![c(1.0 / f64::sqrt(2.0)), c(1.0 / f64::sqrt(2.0))]
}

/// `|0> + i|1>` normalized (qubit).
pub fn ket_plus_i() -> Vec<Complex64> {
    vec![c(1.0 / f64::sqrt(2.0)), I / f64::sqrt(2.0)]
}

/// `(|a> + phase |b>) / sqrt(2)` in a `dim`-dimensional factor.
pub fn superposition_ket(dim: usize, a: usize, b: usize, phase: Complex64) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    v[a] = c(1.0 / f64::sqrt(2.0));
    v[b] = phase / f64::sqrt(2.0);
    v
}

/// `|k><l|` on a `dim`-dimensional factor.
pub fn ketbra(dim: usize, k: usize, l: usize) -> Operator {
    let shape = if dim == 2 { HilbertShape::qubit() } else { HilbertShape::qutrit() };
    Operator::from_fn(shape, |i, j| if i == k && j == l { ONE } else { ZERO })
        .expect("valid ketbra")
}

pub fn pauli_x() -> Operator {
    Operator::from_fn(HilbertShape::qubit(), |i, j| if i != j { ONE } else { ZERO }).unwrap()
}

pub fn pauli_y() -> Operator {
    Operator::from_fn(HilbertShape::qubit(), |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    })
    .unwrap()
}

pub fn pauli_z() -> Operator {
    Operator::from_fn(HilbertShape::qubit(), |i, j| match (i, j) {
        (0, 0) => ONE,
        (1, 1) => -ONE,
        _ => ZERO,
    })
    .unwrap()
}

/// Qutrit bit flip on the computational block: `|0><1| + |1><0|`.
pub fn x_qutrit() -> Operator {
    Operator::from_fn(HilbertShape::qutrit(), |i, j| match (i, j) {
        (0, 1) | (1, 0) => ONE,
        _ => ZERO,
    })
    .unwrap()
}

/// Qutrit phase flip on the computational block: `diag(1, -1, 0)`.
pub fn z_qutrit() -> Operator {
    Operator::from_fn(HilbertShape::qutrit(), |i, j| match (i, j) {
        (0, 0) => ONE,
        (1, 1) => -ONE,
        _ => ZERO,
    })
    .unwrap()
}

/// Projector onto the qutrit computational subspace `{|0>, |1>}`.
pub fn p01() -> Operator {
    Operator::from_fn(HilbertShape::qutrit(), |i, j| {
        if i == j && i < 2 {
            ONE
        } else {
            ZERO
        }
    })
    .unwrap()
}

/// Projector `|2><2|` onto the loss level.
pub fn e22() -> Operator {
    ketbra(3, 2, 2)
}

/// Embeds a qubit operator into the computational block of a qutrit.
pub fn embed_qubit_in_qutrit(op: &Operator) -> Operator {
    assert_eq!(op.dim(), 2, "embedding expects a qubit operator");
    Operator::from_fn(HilbertShape::qutrit(), |i, j| {
        if i < 2 && j < 2 {
            op.at(i, j)
        } else {
            ZERO
        }
    })
    .unwrap()
}

/// Extracts the computational 2x2 block of a qutrit operator.
pub fn qubit_block(op: &Operator) -> Operator {
    assert_eq!(op.dim(), 3, "block extraction expects a qutrit operator");
    Operator::from_fn(HilbertShape::qubit(), |i, j| op.at(i, j)).unwrap()
}
