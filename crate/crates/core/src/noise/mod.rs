//! Microscopic error channels of the QND detection unit: correlated and
//! single coherent overrotations, depolarizing and dephasing noise, their
//! second-order Choi operators, the effective Clifford event channel, and
//! an infidelity-minimizing parameter fitter.

mod clifford;
mod fit;
mod second_order;

pub use clifford::{clifford_event_table, sample_clifford_qnd, CliffordEventTable, QutritRecord};
pub use fit::{fit_noise_params, FitOptions, NoiseChannelKind, NoiseFit};
pub use second_order::analytic_choi_second_order;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instrument::{qnd_unitary, rx_ancilla, rx_qutrit, LossAngle};
use crate::op::states::{c, e22, pauli_x, x_qutrit, I, ONE, ZERO};
use crate::op::{DensityOperator, HilbertShape, Operator};
use crate::tomo::ChoiOperator;

/// Overrotation angles and incoherent error rates of the detection unit.
///
/// `alpha` is the correlated (MS-gate) overrotation with error probability
/// `p_corr = sin^2(alpha/2)`; `beta` the single-qubit overrotation with
/// `p_single = sin^2(beta/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub alpha: f64,
    pub beta: f64,
    pub p_depol: f64,
    pub p_deph: f64,
}

impl NoiseParams {
    pub fn new(alpha: f64, beta: f64, p_depol: f64, p_deph: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_depol) || !(0.0..=1.0).contains(&p_deph) {
            return Err(Error::InvalidArgument("depolarizing/dephasing rates must be in [0, 1]".into()));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidArgument("angles must be finite".into()));
        }
        Ok(Self { alpha, beta, p_depol, p_deph })
    }

    pub fn zero() -> Self {
        Self { alpha: 0.0, beta: 0.0, p_depol: 0.0, p_deph: 0.0 }
    }

    /// Angles from error probabilities: `alpha = 2 asin(sqrt(p_corr))`,
    /// `beta = 2 asin(sqrt(p_single))`.
    pub fn from_probabilities(p_corr: f64, p_single: f64, p_depol: f64, p_deph: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_corr) || !(0.0..=1.0).contains(&p_single) {
            return Err(Error::InvalidArgument("probabilities must be in [0, 1]".into()));
        }
        Self::new(
            2.0 * p_corr.sqrt().asin(),
            2.0 * p_single.sqrt().asin(),
            p_depol,
            p_deph,
        )
    }

    pub fn p_corr(&self) -> f64 {
        (self.alpha / 2.0).sin().powi(2)
    }

    pub fn p_single(&self) -> f64 {
        (self.beta / 2.0).sin().powi(2)
    }

    pub fn is_zero(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0 && self.p_depol == 0.0 && self.p_deph == 0.0
    }
}

/// Where the optional depolarizing/dephasing noise enters relative to the
/// coherent overrotations. The default applies it after them, just before
/// the ancilla measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NoiseOrder {
    #[default]
    AfterRotations,
    BeforeRotations,
}

/// Depolarizing channel `rho -> (1-p) rho + p tr(rho) 1/d` on the full
/// space of `rho` (a single parameter covers ancilla and qutrit jointly).
pub fn depolarize(rho: &Operator, p: f64) -> Result<Operator> {
    check_rate(p)?;
    let d = rho.dim() as f64;
    let id = Operator::identity(rho.shape().clone()).scale(rho.trace() * c(p / d));
    Ok(rho.scale(c(1.0 - p)).add(&id)?)
}

/// Dephasing channel `rho -> (1-p) rho + p diag(rho)` in the computational
/// basis of the full space.
pub fn dephase(rho: &Operator, p: f64) -> Result<Operator> {
    check_rate(p)?;
    Ok(Operator::from_fn(rho.shape().clone(), |i, j| {
        if i == j {
            rho.at(i, j)
        } else {
            rho.at(i, j) * c(1.0 - p)
        }
    })?)
}

/// Density-operator fronts for the two mixture channels.
pub fn depolarize_state(rho: &DensityOperator, p: f64) -> Result<DensityOperator> {
    DensityOperator::new(depolarize(rho.op(), p)?)
}

pub fn dephase_state(rho: &DensityOperator, p: f64) -> Result<DensityOperator> {
    DensityOperator::new(dephase(rho.op(), p)?)
}

fn check_rate(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("rate {p} outside [0, 1]")));
    }
    Ok(())
}

/// Correlated overrotation of a faulty MS gate,
/// `U_corr = cos(a/2) 1(x)1 + i sin(a/2)(X_a (x) X_q + 1 (x) |2><2|)`.
///
/// Acts as a pure phase when the qutrit occupies the loss level, so no
/// correlated error reaches the ancilla under loss.
pub fn corr_overrotation(alpha: f64) -> Operator {
    let (cs, sn) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
    let id6 = Operator::identity(HilbertShape::qubit()).tensor(&Operator::identity(HilbertShape::qutrit()));
    let gen = pauli_x()
        .tensor(&x_qutrit())
        .add(&Operator::identity(HilbertShape::qubit()).tensor(&e22()))
        .expect("shape");
    id6.scale(c(cs)).add(&gen.scale(I * sn)).expect("shape")
}

/// Single-qubit overrotations `R = R^X_a(beta) (x) R^X_q(beta)`; the loss
/// level is invariant under the qutrit factor.
pub fn single_overrotations(beta: f64) -> Operator {
    rx_ancilla(beta).tensor(&rx_qutrit(beta))
}

/// Full noisy detection unitary `R(beta) U_corr(alpha) U(phi)` on
/// ancilla (x) qutrit.
pub fn noisy_qnd_unitary(phi: LossAngle, params: &NoiseParams) -> Operator {
    single_overrotations(params.beta)
        .mul(&corr_overrotation(params.alpha))
        .expect("shape")
        .mul(&qnd_unitary(phi))
        .expect("shape")
}

/// The coherent noisy QND channel on ancilla (x) qutrit: loss-plus-detection
/// unitary, coherent overrotations, and optional depolarizing/dephasing
/// noise, split by the ancilla measurement into conditional qutrit maps.
#[derive(Debug, Clone)]
pub struct CoherentQndChannel {
    ideal: Operator,
    overrotations: Operator,
    p_depol: f64,
    p_deph: f64,
    order: NoiseOrder,
}

impl CoherentQndChannel {
    pub fn new(phi: LossAngle, params: &NoiseParams, order: NoiseOrder) -> Self {
        Self {
            ideal: qnd_unitary(phi),
            overrotations: single_overrotations(params.beta)
                .mul(&corr_overrotation(params.alpha))
                .expect("shape"),
            p_depol: params.p_depol,
            p_deph: params.p_deph,
            order,
        }
    }

    /// Applies the channel to a (not necessarily Hermitian) 6x6 matrix;
    /// linear, so Choi construction over `|k><l|` inputs is valid.
    pub fn apply_matrix(&self, m: &Operator) -> Result<Operator> {
        let after_ideal = self.ideal.mul(m)?.mul(&self.ideal.dagger())?;
        let mixed = |x: &Operator| -> Result<Operator> {
            dephase(&depolarize(x, self.p_depol)?, self.p_deph)
        };
        let rotate =
            |x: &Operator| -> Result<Operator> { Ok(self.overrotations.mul(x)?.mul(&self.overrotations.dagger())?) };
        match self.order {
            NoiseOrder::AfterRotations => mixed(&rotate(&after_ideal)?),
            NoiseOrder::BeforeRotations => rotate(&mixed(&after_ideal)?),
        }
    }

    /// Feeds a qutrit input through the unit with the ancilla prepared in
    /// `|0>` and splits on the ancilla outcome: returns the unnormalized
    /// conditional qutrit matrices `(no-loss, loss)`.
    pub fn conditional_apply(&self, qutrit: &Operator) -> Result<(Operator, Operator)> {
        if qutrit.dim() != 3 {
            return Err(Error::ShapeMismatch("conditional input must be a qutrit matrix".into()));
        }
        let joint = ancilla_zero_tensor(qutrit)?;
        let out = self.apply_matrix(&joint)?;
        Ok((ancilla_block(&out, 0), ancilla_block(&out, 1)))
    }

    /// Choi operators of the conditional no-loss and loss maps (9x9).
    pub fn conditional_chois(&self) -> Result<(ChoiOperator, ChoiOperator)> {
        let mut m0 = nalgebra::DMatrix::<Complex64>::zeros(9, 9);
        let mut m1 = nalgebra::DMatrix::<Complex64>::zeros(9, 9);
        for k in 0..3 {
            for l in 0..3 {
                let basis = Operator::from_fn(HilbertShape::qutrit(), |i, j| {
                    if i == k && j == l {
                        ONE
                    } else {
                        ZERO
                    }
                })?;
                let (b0, b1) = self.conditional_apply(&basis)?;
                for a in 0..3 {
                    for b in 0..3 {
                        m0[(3 * k + a, 3 * l + b)] = b0.at(a, b);
                        m1[(3 * k + a, 3 * l + b)] = b1.at(a, b);
                    }
                }
            }
        }
        let shape = HilbertShape::new(&[3, 3])?;
        Ok((
            ChoiOperator::from_operator(3, 3, Operator::new(shape.clone(), m0)?)?,
            ChoiOperator::from_operator(3, 3, Operator::new(shape, m1)?)?,
        ))
    }
}

fn ancilla_zero_tensor(qutrit: &Operator) -> Result<Operator> {
    let shape = HilbertShape::new(&[2, 3])?;
    Operator::from_fn(shape, |i, j| {
        let (ia, iq) = (i / 3, i % 3);
        let (ja, jq) = (j / 3, j % 3);
        if ia == 0 && ja == 0 {
            qutrit.at(iq, jq)
        } else {
            ZERO
        }
    })
}

fn ancilla_block(m: &Operator, a: usize) -> Operator {
    Operator::from_fn(HilbertShape::qutrit(), |i, j| m.at(3 * a + i, 3 * a + j)).expect("3x3")
}

/// Applies a noise channel to the output slot of a Choi operator:
/// `Lambda -> (1 (x) E)(Lambda)`, blockwise over the input indices.
pub fn noisy_choi_target(
    ideal: &ChoiOperator,
    noise: impl Fn(&Operator) -> Result<Operator>,
) -> Result<ChoiOperator> {
    let d_in = ideal.in_dim();
    let d_out = ideal.out_dim();
    let out_shape = if d_out == 2 {
        HilbertShape::qubit()
    } else if d_out == 3 {
        HilbertShape::qutrit()
    } else if d_out == 6 {
        HilbertShape::new(&[2, 3])?
    } else {
        return Err(Error::ShapeMismatch(format!("unsupported output dimension {d_out}")));
    };
    let m = ideal.operator();
    let mut blocks: Vec<Vec<Operator>> = Vec::with_capacity(d_in);
    for i in 0..d_in {
        let mut row = Vec::with_capacity(d_in);
        for j in 0..d_in {
            let block = Operator::from_fn(out_shape.clone(), |a, b| m.at(i * d_out + a, j * d_out + b))?;
            row.push(noise(&block)?);
        }
        blocks.push(row);
    }
    let full_shape = m.shape().clone();
    let out = Operator::from_fn(full_shape, |r, c_| {
        blocks[r / d_out][c_ / d_out].at(r % d_out, c_ % d_out)
    })?;
    ChoiOperator::from_operator(d_in, d_out, out)
}

/// Ideal Choi operator of the combined ancilla-qutrit detection unitary at
/// loss angle `phi`, trace-normalized like a state.
pub fn ideal_qnd_choi(phi: LossAngle) -> Result<ChoiOperator> {
    let u = qnd_unitary(phi);
    crate::tomo::choi_of_map(std::slice::from_ref(&u))
}

/// A uniformly random generalized Pauli on ancilla (x) qutrit. Averaging
/// the conjugation over all 36 of them realizes the fully depolarizing
/// channel.
pub fn sample_depolarize_kick(rng: &mut impl Rng) -> Operator {
    let a = rng.random_range(0..4usize);
    let (xq, zq) = (rng.random_range(0..3usize), rng.random_range(0..3usize));
    qubit_pauli(a).tensor(&qutrit_weyl(xq, zq))
}

/// A uniformly random diagonal generalized Pauli; averaging its
/// conjugation realizes the computational-basis dephasing channel.
pub fn sample_dephase_kick(rng: &mut impl Rng) -> Operator {
    let a = rng.random_range(0..2usize);
    let zq = rng.random_range(0..3usize);
    let qubit = if a == 0 {
        Operator::identity(HilbertShape::qubit())
    } else {
        crate::op::states::pauli_z()
    };
    qubit.tensor(&qutrit_weyl(0, zq))
}

fn qubit_pauli(k: usize) -> Operator {
    use crate::op::states::{pauli_y, pauli_z};
    match k {
        0 => Operator::identity(HilbertShape::qubit()),
        1 => pauli_x(),
        2 => pauli_y(),
        _ => pauli_z(),
    }
}

/// Qutrit Weyl operator `X3^x Z3^z` with `X3` the cyclic shift and `Z3`
/// the cube-root-of-unity phase.
fn qutrit_weyl(x: usize, z: usize) -> Operator {
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    Operator::from_fn(HilbertShape::qutrit(), |i, j| {
        if i == (j + x) % 3 {
            omega.powu(((z * j) % 3) as u32)
        } else {
            ZERO
        }
    })
    .expect("3x3")
}
