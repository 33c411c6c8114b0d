//! Effective Clifford (stochastic Pauli) approximation of the coherent
//! noisy detection unit.
//!
//! The second-order Choi operators single out six Kraus-diagonal events.
//! Conditioned on the qutrit being present in the computational space:
//! leave it, flip it, flip it and the ancilla (false positive from the
//! correlated rotation), or flip the ancilla alone (false positive from
//! the single rotations). Conditioned on it being lost: leave the ancilla
//! flagged, or flip the ancilla back (false negative).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Event probabilities of the effective Clifford channel, second order in
/// the overrotation angles with each branch renormalized to sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliffordEventTable {
    /// No-loss branch: leave the qutrit unchanged.
    pub p_leave: f64,
    /// No-loss branch: bit-flip the qutrit, ancilla stays quiet.
    pub p_flip: f64,
    /// No-loss branch: bit-flip qutrit and ancilla (false positive).
    pub p_flip_flagged: f64,
    /// No-loss branch: flag the ancilla only (false positive).
    pub p_flag_only: f64,
    /// Loss branch: leave the qutrit in the loss level, ancilla flagged.
    pub q_stay: f64,
    /// Loss branch: flip the ancilla back to no-loss (false negative).
    pub q_missed: f64,
}

impl CliffordEventTable {
    /// Total false-positive probability on a present qutrit.
    pub fn false_positive(&self) -> f64 {
        self.p_flip_flagged + self.p_flag_only
    }

    /// False-negative probability on a lost qutrit.
    pub fn false_negative(&self) -> f64 {
        self.q_missed
    }
}

/// Builds the event table at angles `(alpha, beta)`.
///
/// Raw second-order weights: `{1 - b^2/2 - a^2/4, b^2/4, a^2/4, b^2/4}` on
/// the no-loss branch and `{1 - b^2/4, b^2/4}` on the loss branch; weights
/// are clamped at zero and each branch renormalized to sum to one exactly.
pub fn clifford_event_table(alpha: f64, beta: f64) -> Result<CliffordEventTable> {
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidArgument("angles must be finite".into()));
    }
    let a2 = alpha * alpha;
    let b2 = beta * beta;
    let raw = [
        (1.0 - b2 / 2.0 - a2 / 4.0).max(0.0),
        b2 / 4.0,
        a2 / 4.0,
        b2 / 4.0,
    ];
    let sum: f64 = raw.iter().sum();
    if sum <= 0.0 {
        return Err(Error::InvalidArgument("degenerate event table".into()));
    }
    let q_raw = [(1.0 - b2 / 4.0).max(0.0), b2 / 4.0];
    let q_sum: f64 = q_raw.iter().sum();
    Ok(CliffordEventTable {
        p_leave: raw[0] / sum,
        p_flip: raw[1] / sum,
        p_flip_flagged: raw[2] / sum,
        p_flag_only: raw[3] / sum,
        q_stay: q_raw[0] / q_sum,
        q_missed: q_raw[1] / q_sum,
    })
}

/// Classical record of one code qutrit in the incoherent simulation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QutritRecord {
    /// Qutrit occupies the loss level.
    pub lost: bool,
    /// Accumulated X component of the Pauli frame.
    pub frame_x: bool,
    /// Accumulated Z component of the Pauli frame.
    pub frame_z: bool,
}

/// Samples one detection event for a qutrit, conditioned on its true loss
/// status. Returns the ancilla outcome (`true` = loss flagged) and the
/// updated record.
pub fn sample_clifford_qnd(
    record: QutritRecord,
    table: &CliffordEventTable,
    rng: &mut impl Rng,
) -> (bool, QutritRecord) {
    let mut updated = record;
    if record.lost {
        let missed = rng.random::<f64>() < table.q_missed;
        (!missed, updated)
    } else {
        let r: f64 = rng.random();
        if r < table.p_leave {
            (false, updated)
        } else if r < table.p_leave + table.p_flip {
            updated.frame_x ^= true;
            (false, updated)
        } else if r < table.p_leave + table.p_flip + table.p_flip_flagged {
            updated.frame_x ^= true;
            (true, updated)
        } else {
            (true, updated)
        }
    }
}
