//! Quantum instruments: indexed families of trace-non-increasing CP maps
//! summing to a trace-preserving map, plus the QND loss-detection
//! instrument and its derived observables.

mod gates;
mod qnd;

pub use gates::{
    collective_flip, loss_rotation, ms_gate, phase_aligned, qnd_blocks, qnd_unitary, rx_ancilla,
    rx_qutrit, LossAngle, LossPivot,
};
pub use qnd::{
    bloch_vector_no_loss, erasure_channel, ghz_imbalance, no_loss_qubit_kraus, qnd_instrument,
    repeated_detection, trace_out_ancilla_to_qubit, DetectionStats,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::op::{DensityOperator, HilbertShape, Operator};
use crate::tol;

/// One classical outcome of an instrument with its Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausBranch {
    label: usize,
    operators: Vec<Operator>,
}

impl KrausBranch {
    pub fn new(label: usize, operators: Vec<Operator>) -> Result<Self> {
        let mut dims = operators.iter().map(Operator::dim);
        let first = dims
            .next()
            .ok_or_else(|| Error::InvalidArgument("branch needs at least one Kraus operator".into()))?;
        if dims.any(|d| d != first) {
            return Err(Error::ShapeMismatch("branch Kraus operators differ in shape".into()));
        }
        Ok(Self { label, operators })
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    /// `sum_k K'_k K_k` of this branch.
    pub fn gram(&self) -> Operator {
        let mut acc = Operator::zeros(self.operators[0].shape().clone());
        for k in &self.operators {
            acc = acc.add(&k.dagger().mul(k).expect("shape")).expect("shape");
        }
        acc
    }

    /// `sum_k K rho K'` without normalization.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        let mut acc = Operator::zeros(rho.shape().clone());
        for k in &self.operators {
            acc = acc.add(&k.sandwich(rho)?)?;
        }
        Ok(acc)
    }
}

/// Result of feeding a state through one branch.
#[derive(Debug, Clone)]
pub struct BranchOutcome {
    pub label: usize,
    /// Unnormalized output, PSD with trace equal to `probability`.
    pub state: Operator,
    pub probability: f64,
}

impl BranchOutcome {
    /// Trace-normalized conditional state; errors on zero probability.
    pub fn normalized_state(&self) -> Result<DensityOperator> {
        if self.probability <= f64::EPSILON {
            return Err(Error::InvalidArgument(format!(
                "branch {} has zero probability",
                self.label
            )));
        }
        DensityOperator::new(self.state.scale(Complex64::new(1.0 / self.probability, 0.0)))
    }
}

/// A quantum instrument: branches with distinct labels whose Kraus
/// operators sum to the identity on the declared support.
///
/// Instruments restricted to a subspace (the QND unit acts on the qubit
/// block of a qutrit) declare that subspace projector as their support;
/// completeness is checked against it instead of the full identity.
#[derive(Debug, Clone)]
pub struct QuantumInstrument {
    branches: Vec<KrausBranch>,
    in_shape: HilbertShape,
    out_shape: HilbertShape,
    support: Operator,
}

impl QuantumInstrument {
    /// Instrument on the full input space.
    pub fn new(branches: Vec<KrausBranch>, in_shape: HilbertShape, out_shape: HilbertShape) -> Result<Self> {
        let support = Operator::identity(in_shape.clone());
        Self::new_on_support(branches, in_shape, out_shape, support)
    }

    /// Instrument whose completeness holds on a subspace projector.
    pub fn new_on_support(
        branches: Vec<KrausBranch>,
        in_shape: HilbertShape,
        out_shape: HilbertShape,
        support: Operator,
    ) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidArgument("instrument needs at least one branch".into()));
        }
        let mut labels: Vec<usize> = branches.iter().map(KrausBranch::label).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != branches.len() {
            return Err(Error::InvalidArgument("branch labels must be distinct".into()));
        }
        let dim = in_shape.dim();
        if out_shape.dim() != dim || support.dim() != dim {
            return Err(Error::ShapeMismatch(
                "instrument uses a square embedding: in, out, and support dimensions must agree".into(),
            ));
        }
        for b in &branches {
            if b.operators()[0].dim() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "branch {} Kraus dimension {} != instrument dimension {dim}",
                    b.label(),
                    b.operators()[0].dim()
                )));
            }
            // Each branch is trace-non-increasing on its own.
            let (evals, _) = crate::op::eig_hermitian(&b.gram().hermitize())?;
            if evals[evals.len() - 1] > 1.0 + tol::COMPLETENESS {
                return Err(Error::InvalidArgument(format!(
                    "branch {} is trace-increasing (largest Gram eigenvalue {:.6})",
                    b.label(),
                    evals[evals.len() - 1]
                )));
            }
        }
        let mut total = Operator::zeros(in_shape.clone());
        for b in &branches {
            total = total.add(&b.gram())?;
        }
        let defect = total.max_abs_diff(&support);
        if defect > tol::COMPLETENESS {
            return Err(Error::InvalidArgument(format!(
                "instrument is not trace-preserving on its support (defect {defect:.3e})"
            )));
        }
        Ok(Self { branches, in_shape, out_shape, support })
    }

    pub fn branches(&self) -> &[KrausBranch] {
        &self.branches
    }

    pub fn branch(&self, label: usize) -> Option<&KrausBranch> {
        self.branches.iter().find(|b| b.label() == label)
    }

    pub fn in_shape(&self) -> &HilbertShape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &HilbertShape {
        &self.out_shape
    }

    pub fn support(&self) -> &Operator {
        &self.support
    }

    /// Identity instrument (single branch, label 0).
    pub fn identity(shape: HilbertShape) -> Self {
        let branch = KrausBranch::new(0, vec![Operator::identity(shape.clone())]).expect("identity");
        Self::new(vec![branch], shape.clone(), shape).expect("identity instrument")
    }

    /// Applies every branch to `rho`, returning unnormalized outputs and
    /// their probabilities. Probabilities sum to `tr(rho)` for supported
    /// inputs.
    pub fn apply(&self, rho: &DensityOperator) -> Result<Vec<BranchOutcome>> {
        if rho.op().dim() != self.in_shape.dim() {
            return Err(Error::ShapeMismatch(format!(
                "state dimension {} != instrument dimension {}",
                rho.op().dim(),
                self.in_shape.dim()
            )));
        }
        let projected = self.support.mul(rho.op())?.mul(&self.support)?;
        if projected.max_abs_diff(rho.op()) > 1e-9 * rho.op().max_abs().max(1.0) {
            return Err(Error::InvalidArgument(
                "input state has weight outside the instrument support".into(),
            ));
        }
        self.branches
            .iter()
            .map(|b| {
                let out = b.apply(rho.op())?;
                let p = out.trace().re;
                Ok(BranchOutcome { label: b.label(), state: out, probability: p.max(0.0) })
            })
            .collect()
    }
}
