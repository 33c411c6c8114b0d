//! Constituent gates of the QND loss-detection unit.
//!
//! The system carrier is a qutrit with computational levels `|0>, |1>` and
//! loss level `|2>`; the detector couples it to an ancilla qubit. Composite
//! operators live on ancilla (x) qutrit in that factor order.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::op::states::{c, e22, ketbra, p01, pauli_x, x_qutrit, I, ONE, ZERO};
use crate::op::{HilbertShape, Operator};

/// Which computational level the loss rotation drains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossPivot {
    /// Couples `|0> <-> |2>`, leaves `|1>` fixed.
    FromZero,
    /// Couples `|1> <-> |2>`, leaves `|0>` fixed.
    FromOne,
}

/// Rotation angle of the loss transition; `p_loss = sin^2(phi/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossAngle {
    phi: f64,
}

impl LossAngle {
    pub fn from_phi(phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&phi) {
            return Err(Error::InvalidArgument(format!("phi {phi} outside [0, pi]")));
        }
        Ok(Self { phi })
    }

    /// Angle realizing the given loss probability, `phi = 2 asin(sqrt(p))`.
    pub fn from_p_loss(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p_loss {p} outside [0, 1]")));
        }
        Ok(Self { phi: 2.0 * p.sqrt().asin() })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn p_loss(&self) -> f64 {
        let s = (self.phi / 2.0).sin();
        s * s
    }
}

/// Coherent loss rotation on the qutrit.
///
/// For [`LossPivot::FromZero`] this is
/// `|1><1| + cos(phi/2)(|0><0| + |2><2|) + sin(phi/2)(|0><2| - |2><0|)`;
/// the other pivot swaps the roles of `|0>` and `|1>`.
pub fn loss_rotation(phi: LossAngle, pivot: LossPivot) -> Operator {
    let (cs, sn) = ((phi.phi() / 2.0).cos(), (phi.phi() / 2.0).sin());
    let (moved, fixed) = match pivot {
        LossPivot::FromZero => (0usize, 1usize),
        LossPivot::FromOne => (1usize, 0usize),
    };
    Operator::from_fn(HilbertShape::qutrit(), |i, j| {
        if i == fixed && j == fixed {
            ONE
        } else if (i == moved && j == moved) || (i == 2 && j == 2) {
            c(cs)
        } else if i == moved && j == 2 {
            c(sn)
        } else if i == 2 && j == moved {
            c(-sn)
        } else {
            ZERO
        }
    })
    .expect("3x3")
}

/// Molmer-Sorensen XX rotation on ancilla (x) qutrit.
///
/// `exp(-i theta/2 X_a X_q)`: entangles the qubit blocks and acts as the
/// identity whenever the qutrit occupies the loss level.
pub fn ms_gate(theta: f64) -> Operator {
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let id2 = Operator::identity(HilbertShape::qubit());
    let block = id2.tensor(&p01()).scale(c(cs));
    let flip = pauli_x().tensor(&x_qutrit()).scale(-I * sn);
    let leak = id2.tensor(&e22());
    block.add(&flip).expect("shape").add(&leak).expect("shape")
}

/// Ancilla bit flip `R^X_a(beta) = cos(beta/2) - i sin(beta/2) X_a`.
pub fn rx_ancilla(beta: f64) -> Operator {
    let (cs, sn) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    Operator::identity(HilbertShape::qubit())
        .scale(c(cs))
        .add(&pauli_x().scale(-I * sn))
        .expect("shape")
}

/// Qutrit bit flip on the computational block, identity on `|2>`.
pub fn rx_qutrit(beta: f64) -> Operator {
    let (cs, sn) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    p01()
        .scale(c(cs))
        .add(&x_qutrit().scale(-I * sn))
        .expect("shape")
        .add(&e22())
        .expect("shape")
}

/// Collective bit flip `R^X_a(pi) (x) R^X_q(pi)` closing the detection
/// sequence: `-i(|0><1| + |1><0|)_a (x) (|2><2| - i(|0><1| + |1><0|))_q`.
pub fn collective_flip() -> Operator {
    rx_ancilla(std::f64::consts::PI).tensor(&rx_qutrit(std::f64::consts::PI))
}

/// Full loss-plus-detection unitary
/// `R^X_a(pi) R^X_q(pi) . MS^X(pi) . R_loss(phi)` on ancilla (x) qutrit.
///
/// Equals `1_a (x) U0 + X_a (x) U1` (see [`qnd_blocks`]) up to a global
/// phase accumulated by the gate product.
pub fn qnd_unitary(phi: LossAngle) -> Operator {
    let rloss = Operator::identity(HilbertShape::qubit())
        .tensor(&loss_rotation(phi, LossPivot::FromZero));
    collective_flip()
        .mul(&ms_gate(std::f64::consts::PI))
        .expect("shape")
        .mul(&rloss)
        .expect("shape")
}

/// Closed-form conditional blocks of the QND unitary:
/// `U0 = |1><1| + cos(phi/2)|0><0| + sin(phi/2)|0><2|`,
/// `U1 = sin(phi/2)|2><0| - cos(phi/2)|2><2|`.
pub fn qnd_blocks(phi: LossAngle) -> (Operator, Operator) {
    let (cs, sn) = ((phi.phi() / 2.0).cos(), (phi.phi() / 2.0).sin());
    let u0 = ketbra(3, 1, 1)
        .add(&ketbra(3, 0, 0).scale(c(cs)))
        .expect("shape")
        .add(&ketbra(3, 0, 2).scale(c(sn)))
        .expect("shape");
    let u1 = ketbra(3, 2, 0)
        .scale(c(sn))
        .sub(&ketbra(3, 2, 2).scale(c(cs)))
        .expect("shape");
    (u0, u1)
}

/// Rescales `b` by the phase of its first entry that is nonzero in `a`,
/// so that gate products can be compared against closed forms that drop
/// global phases. Returns `None` if no usable reference entry exists.
pub fn phase_aligned(a: &Operator, b: &Operator) -> Option<Operator> {
    let d = a.dim();
    for i in 0..d {
        for j in 0..d {
            let (x, y) = (a.at(i, j), b.at(i, j));
            if x.norm() > 1e-9 && y.norm() > 1e-9 {
                let phase = x / y * Complex64::new(y.norm() / x.norm(), 0.0);
                return Some(b.scale(phase));
            }
        }
    }
    None
}
