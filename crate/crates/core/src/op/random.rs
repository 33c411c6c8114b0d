//! Random operators, states, and CP maps for synthetic data and testing.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::op::{HilbertShape, Operator};

fn ginibre(dim: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// Random Hermitian operator with entries of order one.
pub fn random_hermitian(shape: HilbertShape, rng: &mut impl Rng) -> Operator {
    let g = ginibre(shape.dim(), rng);
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    Operator::new(shape, h).expect("finite Hermitian")
}

/// Haar-ish random unitary via QR of a Ginibre matrix.
pub fn random_unitary(shape: HilbertShape, rng: &mut impl Rng) -> Operator {
    let g = ginibre(shape.dim(), rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix the phase convention so the distribution is Haar.
    for j in 0..shape.dim() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::ONE };
        for i in 0..shape.dim() {
            q[(i, j)] *= phase;
        }
    }
    Operator::new(shape, q).expect("unitary")
}

/// Random normalized ket.
pub fn random_pure_ket(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Random trace-non-increasing CP map as a list of Kraus operators.
///
/// `sum K'K <= headroom * identity` with `headroom` drawn in [0.3, 1.0], so
/// the map is strictly trace-decreasing almost surely.
pub fn random_tni_cp_map(shape: HilbertShape, kraus_count: usize, rng: &mut impl Rng) -> Vec<Operator> {
    let dim = shape.dim();
    let raw: Vec<DMatrix<Complex64>> = (0..kraus_count).map(|_| ginibre(dim, rng)).collect();
    let mut gram = DMatrix::<Complex64>::zeros(dim, dim);
    for k in &raw {
        gram += k.adjoint() * k;
    }
    let top = Operator::new(shape.clone(), gram)
        .expect("gram")
        .hermitize();
    let (evals, _) = crate::op::eig_hermitian(&top).expect("gram eig");
    let lambda_max = evals[evals.len() - 1].max(f64::EPSILON);
    let headroom: f64 = rng.random_range(0.3..1.0);
    let scale = Complex64::new((headroom / lambda_max).sqrt(), 0.0);
    raw.into_iter()
        .map(|k| Operator::new(shape.clone(), k * scale).expect("kraus"))
        .collect()
}
