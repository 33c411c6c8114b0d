//! Second-order Choi operators of the conditional noisy detection maps.
//!
//! At loss angle zero the coherent noisy unit splits into a no-loss map
//! (ancilla read `|0>`) and a loss map (ancilla read `|1>`). Expanding
//! their single Kraus operators to second order in the overrotation
//! angles gives closed-form 9x9 Choi matrices, the source of the event
//! probabilities used by the effective Clifford channel.
//!
//! Basis order is `|00>, |01>, |02>, ..., |22>` with the input index
//! first. Every entry is the consistently truncated second-order product
//! of the Kraus expansion, and the sign convention of the `beta`-linear
//! entries follows the `cos - i sin X` rotation direction used by
//! [`crate::instrument::rx_ancilla`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::op::{HilbertShape, Operator};
use crate::tomo::ChoiOperator;

/// Second-order Choi pair `(Lambda_0, Lambda_1)` of the conditional
/// no-loss and loss maps at loss angle zero.
///
/// Valid for `|alpha|, |beta| <= 0.5`; beyond that the truncation error is
/// no longer third-order.
pub fn analytic_choi_second_order(alpha: f64, beta: f64) -> Result<(ChoiOperator, ChoiOperator)> {
    if alpha.abs() > 0.5 || beta.abs() > 0.5 {
        return Err(Error::InvalidArgument(
            "second-order expansion requires |alpha|, |beta| <= 0.5".into(),
        ));
    }
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);

    // No-loss Kraus to second order: k00 (P01 diagonal), kx (qubit flip),
    // k22 (loss-level amplitude).
    let a2 = alpha * alpha;
    let b2 = beta * beta;
    let big = re(1.0 - a2 / 4.0 - b2 / 2.0); // |k00|^2
    let flip = re(b2 / 4.0); // |kx|^2
    let coh = Complex64::new(alpha * beta / 4.0, beta / 2.0); // k00 conj(kx)
    let leak = Complex64::new(-alpha * beta / 4.0, -beta / 2.0); // k00 conj(k22)

    let mut l0 = DMatrix::<Complex64>::zeros(9, 9);
    for &i in &[0usize, 4] {
        for &j in &[0usize, 4] {
            l0[(i, j)] = big;
        }
        for &j in &[1usize, 3] {
            l0[(i, j)] = coh;
            l0[(j, i)] = coh.conj();
        }
        l0[(i, 8)] = leak;
        l0[(8, i)] = leak.conj();
    }
    for &i in &[1usize, 3] {
        for &j in &[1usize, 3] {
            l0[(i, j)] = flip;
        }
        l0[(i, 8)] = -flip;
        l0[(8, i)] = -flip;
    }
    l0[(8, 8)] = flip;

    // Loss Kraus to second order: m01 (computational leftover), mx
    // (correlated flip), m22 (loss-level survival).
    let stay = re(b2 / 4.0); // |m01|^2
    let corr = re(a2 / 4.0); // |mx|^2
    let cross = re(-alpha * beta / 4.0); // m01 conj(mx)
    let edge = im(beta / 2.0); // m01 conj(m22)
    let mixed = Complex64::new(b2 / 4.0 - a2 / 4.0, -alpha / 2.0); // mx conj(m22)

    let mut l1 = DMatrix::<Complex64>::zeros(9, 9);
    for &i in &[0usize, 4] {
        for &j in &[0usize, 4] {
            l1[(i, j)] = stay;
        }
        for &j in &[1usize, 3] {
            l1[(i, j)] = cross;
            l1[(j, i)] = cross;
        }
        l1[(i, 8)] = edge;
        l1[(8, i)] = edge.conj();
    }
    for &i in &[1usize, 3] {
        for &j in &[1usize, 3] {
            l1[(i, j)] = corr;
        }
        l1[(i, 8)] = mixed;
        l1[(8, i)] = mixed.conj();
    }
    l1[(8, 8)] = re(1.0 - b2 / 4.0);

    let shape = HilbertShape::new(&[3, 3])?;
    Ok((
        ChoiOperator::from_operator(3, 3, Operator::new(shape.clone(), l0)?)?,
        ChoiOperator::from_operator(3, 3, Operator::new(shape, l1)?)?,
    ))
}
