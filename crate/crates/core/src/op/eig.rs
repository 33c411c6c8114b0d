//! Hermitian eigendecomposition, PSD projections, and the PSD square root.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::op::Operator;
use crate::tol;

/// Eigendecomposition of a Hermitian operator.
///
/// Returns eigenvalues in ascending order with matching orthonormal
/// eigenvector columns. The input must be Hermitian within
/// [`tol::HERMITICITY_INPUT`]; it is symmetrized before decomposition.
pub fn eig_hermitian(a: &Operator) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
    if !a.is_hermitian(tol::HERMITICITY_INPUT) {
        return Err(Error::InvalidArgument(format!(
            "eig_hermitian input not Hermitian (defect {:.3e})",
            a.hermiticity_defect()
        )));
    }
    let m = (a.matrix() + a.matrix().adjoint()) * Complex64::new(0.5, 0.0);
    let eig = m.symmetric_eigen();

    // nalgebra does not order the spectrum; sort ascending with the
    // eigenvector columns permuted alongside.
    let d = a.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .ok_or(())
            .map_err(|_| "non-finite eigenvalue")
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigendecomposition produced non-finite values".into()));
    }
    let evals = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut evecs = DMatrix::zeros(d, d);
    for (col, &i) in order.iter().enumerate() {
        evecs.set_column(col, &eig.eigenvectors.column(i));
    }
    Ok((evals, evecs))
}

/// Nearest (Frobenius) PSD operator: clip negative eigenvalues to zero.
pub fn psd_project(a: &Operator) -> Result<Operator> {
    rebuild(a, |evals| {
        for v in evals.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    })
}

/// Nearest PSD operator with the given trace.
///
/// Projects the spectrum onto the simplex `{x >= 0, sum x = trace}`; this is
/// the exact Frobenius projection onto the intersection of the PSD cone and
/// the trace hyperplane.
pub fn psd_project_with_trace(a: &Operator, trace: f64) -> Result<Operator> {
    if trace <= 0.0 {
        return Err(Error::InvalidArgument("target trace must be positive".into()));
    }
    rebuild(a, |evals| {
        let n = evals.len();
        let mut sorted: Vec<f64> = evals.iter().copied().collect();
        sorted.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let mut cumsum = 0.0;
        let mut theta = 0.0;
        for (k, &v) in sorted.iter().enumerate() {
            cumsum += v;
            let candidate = (cumsum - trace) / (k + 1) as f64;
            if k + 1 == n || sorted[k + 1] <= candidate {
                theta = candidate;
                break;
            }
        }
        for v in evals.iter_mut() {
            *v = (*v - theta).max(0.0);
        }
    })
}

/// Square root of a PSD operator via its spectral decomposition.
pub fn sqrtm_psd(a: &Operator) -> Result<Operator> {
    rebuild(a, |evals| {
        for v in evals.iter_mut() {
            *v = v.max(0.0).sqrt();
        }
    })
}

fn rebuild(a: &Operator, adjust: impl FnOnce(&mut DVector<f64>)) -> Result<Operator> {
    let (mut evals, evecs) = eig_hermitian(a)?;
    adjust(&mut evals);
    let d = a.dim();
    let diag = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(evals[i], 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let m = &evecs * diag * evecs.adjoint();
    Operator::new(a.shape().clone(), m)
}
