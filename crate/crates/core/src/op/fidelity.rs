//! Uhlmann fidelity between positive operators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::op::eig::sqrtm_psd;
use crate::op::{DensityOperator, Operator};

/// Uhlmann fidelity `F = (tr sqrt(sqrt(a) b sqrt(a)))^2` between two states.
///
/// Both operators are trace-normalized internally, so sub-normalized
/// instrument branches compare by their conditional states. Symmetric in
/// its arguments; 1 iff the normalized operators coincide.
pub fn state_fidelity(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.op().dim() != b.op().dim() {
        return Err(Error::ShapeMismatch(format!(
            "fidelity between dimensions {} and {}",
            a.op().dim(),
            b.op().dim()
        )));
    }
    fidelity_psd(a.op(), b.op())
}

/// Uhlmann fidelity between two PSD operators after trace normalization.
///
/// Used for both density operators and Choi operators (the latter is this
/// library's process-fidelity convention).
pub fn fidelity_psd(a: &Operator, b: &Operator) -> Result<f64> {
    let (ta, tb) = (a.trace().re, b.trace().re);
    if ta <= f64::EPSILON || tb <= f64::EPSILON {
        return Err(Error::InvalidArgument("fidelity of a zero-trace operator".into()));
    }
    let an = a.hermitize().scale(Complex64::new(1.0 / ta, 0.0));
    let bn = b.hermitize().scale(Complex64::new(1.0 / tb, 0.0));
    let ra = sqrtm_psd(&an)?;
    let inner = ra.mul(&bn)?.mul(&ra)?;
    let root = sqrtm_psd(&inner.hermitize())?;
    let f = root.trace().re;
    Ok((f * f).clamp(0.0, 1.0))
}
