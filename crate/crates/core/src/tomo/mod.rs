//! Choi operators and quantum-instrument tomography: experiment design,
//! synthetic data, linear inversion, and PSD-constrained weighted
//! least-squares reconstruction with or without trace preservation.

mod design;
mod metrics;
mod solver;

pub use design::{
    predict_probabilities, read_records_csv, sample_counts, write_records_csv, MeasurementRecord,
    Prep, Setting, TomographyDesign,
};
pub use metrics::{fidelity_decay_model, fit_fidelity_decay, total_variation_distance};
pub use solver::{linear_inversion, reconstruct, LinearInversion, Reconstruction, SolverOptions};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::op::{eig_hermitian, DensityOperator, Operator};
use crate::tol;

/// Choi operator of a CP map: a PSD matrix on input (x) output space.
///
/// Trace equals the input dimension exactly for trace-preserving maps and
/// falls below it for trace-decreasing instrument branches. Raw linear
/// inversion may emit indefinite matrices; [`ChoiOperator::psd_defect`]
/// measures the violation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChoiOperator {
    in_dim: usize,
    out_dim: usize,
    matrix: Operator,
}

impl ChoiOperator {
    pub fn from_operator(in_dim: usize, out_dim: usize, matrix: Operator) -> Result<Self> {
        if matrix.dim() != in_dim * out_dim {
            return Err(Error::ShapeMismatch(format!(
                "Choi matrix dimension {} != {in_dim} * {out_dim}",
                matrix.dim()
            )));
        }
        Ok(Self { in_dim, out_dim, matrix })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn operator(&self) -> &Operator {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Magnitude of the most negative eigenvalue (zero when PSD).
    pub fn psd_defect(&self) -> f64 {
        match eig_hermitian(&self.matrix.hermitize()) {
            Ok((evals, _)) => (-evals[0]).max(0.0),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn is_physical(&self) -> bool {
        self.psd_defect() <= tol::CHOI_PSD && self.trace() <= self.in_dim as f64 + 1e-6
    }
}

/// Choi operator `Lambda = sum_{k,l} |k><l| (x) E(|k><l|)` of the map with
/// the given Kraus operators. PSD by construction with
/// `tr Lambda = sum_k tr(K_k' K_k)`.
pub fn choi_of_map(kraus: &[Operator]) -> Result<ChoiOperator> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidArgument("need at least one Kraus operator".into()))?;
    let d = first.dim();
    let shape = first.shape().tensor(first.shape());
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(d * d, d * d);
    for k_op in kraus {
        if k_op.dim() != d {
            return Err(Error::ShapeMismatch("Kraus operators differ in dimension".into()));
        }
        for k in 0..d {
            for a in 0..d {
                let left = k_op.at(a, k);
                if left == Complex64::ZERO {
                    continue;
                }
                for l in 0..d {
                    for b in 0..d {
                        m[(d * k + a, d * l + b)] += left * k_op.at(b, l).conj();
                    }
                }
            }
        }
    }
    ChoiOperator::from_operator(d, d, Operator::new(shape, m)?)
}

/// Applies the map encoded by a Choi operator to an arbitrary matrix:
/// `E(m) = tr_1[(m^T (x) 1) Lambda]`. Linear, no positivity assumptions.
pub fn apply_choi_matrix(choi: &ChoiOperator, m: &Operator) -> Result<Operator> {
    let (din, dout) = (choi.in_dim(), choi.out_dim());
    if m.dim() != din {
        return Err(Error::ShapeMismatch(format!(
            "input dimension {} != Choi input dimension {din}",
            m.dim()
        )));
    }
    let lam = choi.operator();
    let out_shape = out_factor_shape(choi)?;
    Operator::from_fn(out_shape, |a, b| {
        let mut acc = Complex64::ZERO;
        for k in 0..din {
            for l in 0..din {
                acc += m.at(l, k) * lam.at(l * dout + a, k * dout + b);
            }
        }
        acc
    })
}

/// Applies the map to a state, returning the (possibly sub-normalized)
/// output.
pub fn apply_choi(choi: &ChoiOperator, rho: &DensityOperator) -> Result<DensityOperator> {
    let out = apply_choi_matrix(choi, rho.op())?;
    DensityOperator::new(out.hermitize())
}

fn out_factor_shape(choi: &ChoiOperator) -> Result<crate::op::HilbertShape> {
    // The Choi shape concatenates input and output factors; recover the
    // output part by matching the input dimension prefix.
    let factors = choi.operator().shape().factors();
    let mut acc = 1usize;
    for (i, &f) in factors.iter().enumerate() {
        acc *= f;
        if acc == choi.in_dim() {
            return crate::op::HilbertShape::new(&factors[i + 1..]);
        }
    }
    Err(Error::ShapeMismatch("Choi shape does not factor into input and output".into()))
}
