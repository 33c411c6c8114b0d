//! The QND loss-detection instrument, the erasure channel, and derived
//! observables (Bloch-vector pull, GHZ population imbalance, repeated
//! detection statistics).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instrument::gates::{LossAngle, LossPivot};
use crate::instrument::{KrausBranch, QuantumInstrument};
use crate::noise::{noisy_qnd_unitary, sample_dephase_kick, sample_depolarize_kick, NoiseParams};
use crate::op::states::{c, embed_qubit_in_qutrit, ketbra, p01, ZERO};
use crate::op::{DensityOperator, HilbertShape, Operator};
use crate::rng::stream_rng;
use crate::statevec::StateVector;

/// Loss-detection instrument restricted to the qubit subspace of the
/// qutrit: branch 0 (no loss) with Kraus `|1><1| + cos(phi/2)|0><0|`,
/// branch 1 (loss) with Kraus `sin(phi/2)|2><0|`.
pub fn qnd_instrument(phi: LossAngle) -> QuantumInstrument {
    let (cs, sn) = ((phi.phi() / 2.0).cos(), (phi.phi() / 2.0).sin());
    let no_loss = ketbra(3, 1, 1)
        .add(&ketbra(3, 0, 0).scale(c(cs)))
        .expect("shape");
    let loss = ketbra(3, 2, 0).scale(c(sn));
    QuantumInstrument::new_on_support(
        vec![
            KrausBranch::new(0, vec![no_loss]).expect("branch"),
            KrausBranch::new(1, vec![loss]).expect("branch"),
        ],
        HilbertShape::qutrit(),
        HilbertShape::qutrit(),
        p01(),
    )
    .expect("qnd instrument")
}

/// No-loss Kraus operator of the detection unit on the bare qubit,
/// `|1><1| + cos(phi/2)|0><0|`; the map reconstructed by qubit-level
/// process tomography.
pub fn no_loss_qubit_kraus(phi: LossAngle) -> Operator {
    let cs = (phi.phi() / 2.0).cos();
    Operator::from_fn(HilbertShape::qubit(), |i, j| match (i, j) {
        (0, 0) => c(cs),
        (1, 1) => c(1.0),
        _ => ZERO,
    })
    .expect("2x2")
}

/// Erasure channel: the same partial loss induced from `|0>` and then,
/// conditional on no loss, from `|1>`. Branch 0 is the combined no-loss
/// map (proportional to the identity on the qubit subspace), branch 1 the
/// loss at stage two, branch 2 the loss at stage one.
pub fn erasure_channel(phi: LossAngle) -> QuantumInstrument {
    let (cs, sn) = ((phi.phi() / 2.0).cos(), (phi.phi() / 2.0).sin());
    // A~0 A0 = cos(phi/2) * P01; A~1 A0 = sin(phi/2)|2><1|; A1 = sin(phi/2)|2><0|.
    let no_loss = p01().scale(c(cs));
    let stage_two = ketbra(3, 2, 1).scale(c(sn));
    let stage_one = ketbra(3, 2, 0).scale(c(sn));
    QuantumInstrument::new_on_support(
        vec![
            KrausBranch::new(0, vec![no_loss]).expect("branch"),
            KrausBranch::new(1, vec![stage_two]).expect("branch"),
            KrausBranch::new(2, vec![stage_one]).expect("branch"),
        ],
        HilbertShape::qutrit(),
        HilbertShape::qutrit(),
        p01(),
    )
    .expect("erasure channel")
}

/// Bloch vector of the normalized no-loss output for a pure qubit input.
///
/// Errors when the no-loss branch has zero probability (input `|0>` at
/// full transfer).
pub fn bloch_vector_no_loss(input: &[Complex64], phi: LossAngle) -> Result<(f64, f64, f64)> {
    if input.len() != 2 {
        return Err(Error::ShapeMismatch("input must be a qubit ket".into()));
    }
    let norm: f64 = input.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("input ket must be normalized".into()));
    }
    let cs = (phi.phi() / 2.0).cos();
    let out = [input[0] * c(cs), input[1]];
    let p: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    if p <= f64::EPSILON {
        return Err(Error::InvalidArgument("no-loss branch has zero probability".into()));
    }
    let (a, b) = (out[0] / p.sqrt(), out[1] / p.sqrt());
    let cross = a.conj() * b;
    Ok((2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()))
}

/// Population ratio `P(|0...0>) / P(|1...1>)` of the normalized no-loss
/// state after one QND detection on qubit 1 of an `n`-qubit GHZ state,
/// with loss induced from `|0>`. Equals `cos^2(phi/2) = 1 - p_loss`.
pub fn ghz_imbalance(n_qubits: usize, phi: LossAngle) -> Result<f64> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    let dims = vec![2usize; n_qubits];
    let len: usize = 1 << n_qubits;
    let mut amps = vec![ZERO; len];
    amps[0] = c(1.0 / f64::sqrt(2.0));
    amps[len - 1] = c(1.0 / f64::sqrt(2.0));
    let mut state = StateVector::from_amplitudes(&dims, amps)?;
    state.apply_1(0, &no_loss_qubit_kraus(phi));
    let n = state.norm_sqr();
    if n <= f64::EPSILON {
        return Err(Error::InvalidArgument("no-loss branch has zero probability".into()));
    }
    Ok(state.amps()[0].norm_sqr() / state.amps()[len - 1].norm_sqr())
}

/// Incoherent restriction of a qutrit state to the qubit: the loss-level
/// population is folded onto `|1>` and coherences to `|2>` are discarded.
/// Demonstrates the bias that qubit-restricted tomography inherits when
/// the ancilla is traced out.
pub fn trace_out_ancilla_to_qubit(rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.op().dim() != 3 {
        return Err(Error::ShapeMismatch("expected a qutrit state".into()));
    }
    let m = rho.op();
    let out = Operator::from_fn(HilbertShape::qubit(), |i, j| {
        if i == 1 && j == 1 {
            m.at(1, 1) + m.at(2, 2)
        } else {
            m.at(i, j)
        }
    })?;
    DensityOperator::new(out.hermitize())
}

/// Empirical correlation statistics of two sequential QND detections of
/// one loss event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionStats {
    /// Both detections flagged the loss.
    pub positive_correlation: f64,
    /// Second detection flagged a loss the first did not see.
    pub false_positive: f64,
    /// Second detection missed a loss the first had flagged.
    pub false_negative: f64,
    pub trials: u64,
}

/// Simulates two sequential QND detections, each with its own fresh
/// ancilla, on a single system qutrit prepared in `|0>` with loss induced
/// at angle `phi` before the first detection. Without noise the two
/// outcomes agree with probability one.
pub fn repeated_detection(
    phi: LossAngle,
    noise: Option<&NoiseParams>,
    trials: u64,
    seed: u64,
) -> Result<DetectionStats> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let zero = NoiseParams::zero();
    let params = noise.unwrap_or(&zero);
    let first = noisy_qnd_unitary(phi, params);
    let second = noisy_qnd_unitary(LossAngle::from_phi(0.0)?, params);

    let counts = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial);
            let mut qutrit = StateVector::basis(&[3], &[0]);
            let mut flags = [false; 2];
            for (round, unitary) in [&first, &second].into_iter().enumerate() {
                let mut joint = qutrit.attach_front(2, 0);
                joint.apply_2(0, 1, unitary);
                if params.p_depol > 0.0 && rng.random::<f64>() < params.p_depol {
                    let kick = sample_depolarize_kick(&mut rng);
                    joint.apply_2(0, 1, &kick);
                }
                if params.p_deph > 0.0 && rng.random::<f64>() < params.p_deph {
                    let kick = sample_dephase_kick(&mut rng);
                    joint.apply_2(0, 1, &kick);
                }
                flags[round] = joint.measure_and_remove_front(&mut rng) == 1;
                qutrit = joint;
            }
            let pos = u64::from(flags[0] && flags[1]);
            let fp = u64::from(!flags[0] && flags[1]);
            let fneg = u64::from(flags[0] && !flags[1]);
            (pos, fp, fneg)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));

    let n = trials as f64;
    Ok(DetectionStats {
        positive_correlation: counts.0 as f64 / n,
        false_positive: counts.1 as f64 / n,
        false_negative: counts.2 as f64 / n,
        trials,
    })
}

// Used by the square-embedding helpers in tests and scenario code.
pub(crate) fn embed_qubit_state(ket: &[Complex64]) -> Result<DensityOperator> {
    let rho2 = DensityOperator::pure(HilbertShape::qubit(), ket)?;
    DensityOperator::new(embed_qubit_in_qutrit(rho2.op()))
}
