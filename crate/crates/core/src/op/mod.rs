//! Dense complex operator algebra on small composite Hilbert spaces.
//!
//! Operators carry their dimension factorization ([`HilbertShape`]) so that
//! tensor products and partial traces know which local factor is which.
//! Everything is dense: the largest space in scope is an ancilla qubit
//! against seven qutrits (dimension 4374), and operators of that size are
//! never materialized — gate application on big registers goes through
//! factor-local contraction in [`crate::qec`].

mod eig;
mod fidelity;
pub mod random;
pub mod states;

pub use eig::{eig_hermitian, psd_project, psd_project_with_trace, sqrtm_psd};
pub use fidelity::{fidelity_psd, state_fidelity};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// Ordered list of local dimensions (each 2 or 3) of a composite space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertShape {
    factors: Vec<usize>,
}

impl HilbertShape {
    /// A composite space with the given local dimensions.
    pub fn new(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("shape needs at least one factor".into()));
        }
        if let Some(&d) = factors.iter().find(|&&d| d != 2 && d != 3) {
            return Err(Error::InvalidArgument(format!(
                "local dimensions must be 2 or 3, got {d}"
            )));
        }
        Ok(Self { factors: factors.to_vec() })
    }

    /// Single qubit.
    pub fn qubit() -> Self {
        Self { factors: vec![2] }
    }

    /// Single qutrit.
    pub fn qutrit() -> Self {
        Self { factors: vec![3] }
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(&vec![2; n])
    }

    /// `n` qutrits.
    pub fn qutrits(n: usize) -> Result<Self> {
        Self::new(&vec![3; n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Total dimension, the product of local dimensions.
    pub fn dim(&self) -> usize {
        self.factors.iter().product()
    }

    /// Shape of the composite `self (x) other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self { factors }
    }

    /// Shape after keeping only the listed factors (in original order).
    pub fn keep(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("keep set must be nonempty".into()));
        }
        let mut factors = Vec::with_capacity(keep.len());
        let mut last = None;
        for &k in keep {
            if k >= self.factors.len() {
                return Err(Error::InvalidArgument(format!(
                    "factor index {k} out of range for {} factors",
                    self.factors.len()
                )));
            }
            if let Some(prev) = last {
                if k <= prev {
                    return Err(Error::InvalidArgument(
                        "keep indices must be strictly increasing".into(),
                    ));
                }
            }
            last = Some(k);
            factors.push(self.factors[k]);
        }
        Ok(Self { factors })
    }
}

/// Dense complex square matrix over a composite Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    shape: HilbertShape,
    matrix: DMatrix<Complex64>,
}

impl Operator {
    /// Wraps a matrix, checking squareness, dimension, and finiteness.
    pub fn new(shape: HilbertShape, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = shape.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, shape dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("operator entries must be finite".into()));
        }
        Ok(Self { shape, matrix })
    }

    /// Builds entry-by-entry from a function of (row, col).
    pub fn from_fn(shape: HilbertShape, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let d = shape.dim();
        Self::new(shape, DMatrix::from_fn(d, d, f))
    }

    pub fn zeros(shape: HilbertShape) -> Self {
        let d = shape.dim();
        Self { matrix: DMatrix::zeros(d, d), shape }
    }

    pub fn identity(shape: HilbertShape) -> Self {
        let d = shape.dim();
        Self { matrix: DMatrix::identity(d, d), shape }
    }

    pub fn shape(&self) -> &HilbertShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self { shape: self.shape.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { shape: self.shape.clone(), matrix: self.matrix.transpose() }
    }

    pub fn conjugate(&self) -> Self {
        Self { shape: self.shape.clone(), matrix: self.matrix.conjugate() }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { shape: self.shape.clone(), matrix: &self.matrix * s }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { shape: self.shape.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { shape: self.shape.clone(), matrix: &self.matrix - &other.matrix })
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { shape: self.shape.clone(), matrix: &self.matrix * &other.matrix })
    }

    /// `K rho K'` for Kraus application.
    pub fn sandwich(&self, rho: &Self) -> Result<Self> {
        self.check_same_shape(rho)?;
        Ok(Self {
            shape: self.shape.clone(),
            matrix: &self.matrix * &rho.matrix * self.matrix.adjoint(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from another operator.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Hermiticity defect `max |A - A'|`, absolute.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian within `tol` relative to the largest entry.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.max_abs().max(1.0)
    }

    /// `(A + A') / 2`.
    pub fn hermitize(&self) -> Self {
        let m = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        Self { shape: self.shape.clone(), matrix: m }
    }

    /// Unitarity defect `max |U'U - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((prod[(i, j)] - expect).norm());
            }
        }
        worst
    }

    /// Kronecker product; the result shape is the concatenation of factors.
    pub fn tensor(&self, other: &Self) -> Self {
        let shape = self.shape.tensor(&other.shape);
        let (da, db) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(da * db, da * db);
        for i in 0..da {
            for j in 0..da {
                let a = self.matrix[(i, j)];
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        m[(i * db + k, j * db + l)] = a * other.matrix[(k, l)];
                    }
                }
            }
        }
        Self { shape, matrix: m }
    }

    /// Partial trace keeping the listed factors (strictly increasing indices).
    ///
    /// The total trace is preserved: `tr(result) == tr(self)`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let out_shape = self.shape.keep(keep)?;
        let factors = self.shape.factors();
        let n = factors.len();

        // Strides of each factor in the flattened index (row-major factors).
        let mut strides = vec![1usize; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * factors[i + 1];
        }

        let traced: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
        let kept_dims: Vec<usize> = keep.iter().map(|&i| factors[i]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&i| factors[i]).collect();
        let kept_dim: usize = kept_dims.iter().product();
        let traced_dim: usize = traced_dims.iter().product();

        // Map a flat index over a dimension list to the full-space offset.
        let offset = |flat: usize, idxs: &[usize], dims: &[usize]| -> usize {
            let mut rem = flat;
            let mut off = 0;
            for pos in (0..idxs.len()).rev() {
                let d = dims[pos];
                off += (rem % d) * strides[idxs[pos]];
                rem /= d;
            }
            off
        };

        let mut m = DMatrix::zeros(kept_dim, kept_dim);
        for row_k in 0..kept_dim {
            let row_base = offset(row_k, keep, &kept_dims);
            for col_k in 0..kept_dim {
                let col_base = offset(col_k, keep, &kept_dims);
                let mut acc = Complex64::ZERO;
                for t in 0..traced_dim {
                    let t_off = offset(t, &traced, &traced_dims);
                    acc += self.matrix[(row_base + t_off, col_base + t_off)];
                }
                m[(row_k, col_k)] = acc;
            }
        }
        Operator::new(out_shape, m)
    }

    /// Column-stacked vectorization `|A>> = sum A_ij |j> (x) |i>`.
    pub fn vec(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut v = Vec::with_capacity(d * d);
        for j in 0..d {
            for i in 0..d {
                v.push(self.matrix[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`Operator::vec`].
    pub fn unvec(shape: HilbertShape, v: &[Complex64]) -> Result<Self> {
        let d = shape.dim();
        if v.len() != d * d {
            return Err(Error::ShapeMismatch(format!(
                "vector length {} does not match dimension {d}",
                v.len()
            )));
        }
        Self::from_fn(shape, |i, j| v[j * d + i])
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch(format!(
                "dimensions {} and {} differ",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

/// JSON form: `{shape: [ints], re: [[...]], im: [[...]]}` with row-major rows.
#[derive(Serialize, Deserialize)]
struct OperatorJson {
    shape: Vec<usize>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let row = |i: usize, part: fn(&Complex64) -> f64| -> Vec<f64> {
            (0..d).map(|j| part(&self.matrix[(i, j)])).collect()
        };
        OperatorJson {
            shape: self.shape.factors().to_vec(),
            re: (0..d).map(|i| row(i, |z| z.re)).collect(),
            im: (0..d).map(|i| row(i, |z| z.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = OperatorJson::deserialize(deserializer)?;
        let shape = HilbertShape::new(&raw.shape).map_err(DeError::custom)?;
        let d = shape.dim();
        if raw.re.len() != d || raw.im.len() != d {
            return Err(DeError::custom("row count does not match shape"));
        }
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            if raw.re[i].len() != d || raw.im[i].len() != d {
                return Err(DeError::custom("column count does not match shape"));
            }
            for j in 0..d {
                m[(i, j)] = Complex64::new(raw.re[i][j], raw.im[i][j]);
            }
        }
        Operator::new(shape, m).map_err(DeError::custom)
    }
}

/// Positive-semidefinite operator with trace in (0, 1]; sub-normalized
/// states are allowed because instrument branches are trace-non-increasing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityOperator {
    op: Operator,
}

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_hermitian(tol::HERMITICITY) {
            return Err(Error::InvalidArgument(format!(
                "density operator not Hermitian (defect {:.3e})",
                op.hermiticity_defect()
            )));
        }
        let tr = op.trace();
        if tr.im.abs() > tol::IMAGINARY_RESIDUE * op.max_abs().max(1.0) {
            return Err(Error::InvalidArgument("density operator trace is not real".into()));
        }
        if tr.re <= 0.0 || tr.re > 1.0 + tol::TRACE_SLACK {
            return Err(Error::InvalidArgument(format!(
                "density operator trace {:.6} outside (0, 1]",
                tr.re
            )));
        }
        let (evals, _) = eig_hermitian(&op.hermitize())?;
        if evals[0] < tol::EIGENVALUE_FLOOR {
            return Err(Error::InvalidArgument(format!(
                "density operator has negative eigenvalue {:.3e}",
                evals[0]
            )));
        }
        Ok(Self { op })
    }

    /// Pure state `|psi><psi|` from an unnormalized ket.
    pub fn pure(shape: HilbertShape, ket: &[Complex64]) -> Result<Self> {
        let d = shape.dim();
        if ket.len() != d {
            return Err(Error::ShapeMismatch(format!("ket length {} != {d}", ket.len())));
        }
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero ket".into()));
        }
        let op = Operator::from_fn(shape, |i, j| ket[i] * ket[j].conj() / (norm * norm))?;
        Self::new(op)
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    /// Trace-normalized copy. Errors on (numerically) zero trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= f64::EPSILON {
            return Err(Error::InvalidArgument("cannot normalize zero-trace state".into()));
        }
        Ok(Self { op: self.op.scale(Complex64::new(1.0 / tr, 0.0)) })
    }

    /// Purity `tr(rho^2) / tr(rho)^2` of the normalized state.
    pub fn purity(&self) -> f64 {
        let tr = self.trace();
        let sq = self.op.mul(&self.op).expect("same shape");
        sq.trace().re / (tr * tr)
    }
}

/// Measurement effect: Hermitian with spectrum in [0, 1].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Effect {
    op: Operator,
}

impl Effect {
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_hermitian(tol::HERMITICITY) {
            return Err(Error::InvalidArgument("effect not Hermitian".into()));
        }
        let (evals, _) = eig_hermitian(&op.hermitize())?;
        if evals[0] < tol::EIGENVALUE_FLOOR || evals[evals.len() - 1] > 1.0 + tol::TRACE_SLACK {
            return Err(Error::InvalidArgument(format!(
                "effect spectrum [{:.3e}, {:.3e}] outside [0, 1]",
                evals[0],
                evals[evals.len() - 1]
            )));
        }
        Ok(Self { op })
    }

    /// Rank-one effect `|psi><psi|` from a normalized ket.
    pub fn projector(shape: HilbertShape, ket: &[Complex64]) -> Result<Self> {
        let rho = DensityOperator::pure(shape, ket)?;
        Ok(Self { op: rho.op().clone() })
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    /// Outcome probability `tr(E rho)`, clipped of numerical residue.
    pub fn probability(&self, rho: &DensityOperator) -> Result<f64> {
        let p = self.op.mul(rho.op())?.trace();
        debug_assert!(p.im.abs() < 1e-9, "probability has imaginary residue {}", p.im);
        Ok(p.re.clamp(0.0, 1.0))
    }
}
