//! State-vector register over mixed qubit/qutrit factors.
//!
//! Gates are applied by factor-local contraction, so registers up to an
//! ancilla qubit against seven qutrits (4374 amplitudes) stay cheap without
//! ever materializing a full-space matrix.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::op::Operator;

#[derive(Debug, Clone)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|levels>`.
    pub fn basis(dims: &[usize], levels: &[usize]) -> Self {
        assert_eq!(dims.len(), levels.len());
        let len: usize = dims.iter().product();
        let mut amps = vec![Complex64::ZERO; len];
        let mut idx = 0;
        for (d, &l) in dims.iter().zip(levels) {
            assert!(l < *d);
            idx = idx * d + l;
        }
        amps[idx] = Complex64::ONE;
        Self { dims: dims.to_vec(), amps }
    }

    pub fn from_amplitudes(dims: &[usize], amps: Vec<Complex64>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if amps.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for dimension {len}",
                amps.len()
            )));
        }
        Ok(Self { dims: dims.to_vec(), amps })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for z in &mut self.amps {
                *z /= n;
            }
        }
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn stride(&self, site: usize) -> usize {
        self.dims[site + 1..].iter().product()
    }

    /// Applies a single-factor operator at `site`.
    pub fn apply_1(&mut self, site: usize, op: &Operator) {
        let d = self.dims[site];
        assert_eq!(op.dim(), d, "operator dimension mismatch at site {site}");
        let stride = self.stride(site);
        let block = d * stride;
        let mut scratch = vec![Complex64::ZERO; d];
        for outer in 0..self.amps.len() / block {
            let base_outer = outer * block;
            for inner in 0..stride {
                let base = base_outer + inner;
                for (k, s) in scratch.iter_mut().enumerate() {
                    *s = self.amps[base + k * stride];
                }
                for i in 0..d {
                    let mut acc = Complex64::ZERO;
                    for (k, s) in scratch.iter().enumerate() {
                        acc += op.at(i, k) * s;
                    }
                    self.amps[base + i * stride] = acc;
                }
            }
        }
    }

    /// Applies a two-factor operator on `(site_a, site_b)`; the operator
    /// index order is `ia * dim_b + ib`.
    pub fn apply_2(&mut self, site_a: usize, site_b: usize, op: &Operator) {
        assert_ne!(site_a, site_b);
        let (da, db) = (self.dims[site_a], self.dims[site_b]);
        assert_eq!(op.dim(), da * db, "operator dimension mismatch");
        let (sa, sb) = (self.stride(site_a), self.stride(site_b));
        let joint = da * db;
        let mut scratch = vec![Complex64::ZERO; joint];

        // Enumerate all assignments of the remaining factors.
        let mut fixed_sites: Vec<usize> = (0..self.dims.len())
            .filter(|&s| s != site_a && s != site_b)
            .collect();
        fixed_sites.sort_unstable();
        let fixed_dims: Vec<usize> = fixed_sites.iter().map(|&s| self.dims[s]).collect();
        let fixed_total: usize = fixed_dims.iter().product();
        let fixed_strides: Vec<usize> = fixed_sites.iter().map(|&s| self.stride(s)).collect();

        for combo in 0..fixed_total {
            let mut rem = combo;
            let mut base = 0;
            for pos in (0..fixed_sites.len()).rev() {
                let d = fixed_dims[pos];
                base += (rem % d) * fixed_strides[pos];
                rem /= d;
            }
            for (k, s) in scratch.iter_mut().enumerate() {
                let (ia, ib) = (k / db, k % db);
                *s = self.amps[base + ia * sa + ib * sb];
            }
            for ia in 0..da {
                for ib in 0..db {
                    let mut acc = Complex64::ZERO;
                    for (k, s) in scratch.iter().enumerate() {
                        acc += op.at(ia * db + ib, k) * s;
                    }
                    self.amps[base + ia * sa + ib * sb] = acc;
                }
            }
        }
    }

    /// Population of `level` at `site`.
    pub fn site_population(&self, site: usize, level: usize) -> f64 {
        let stride = self.stride(site);
        let d = self.dims[site];
        let block = d * stride;
        let mut p = 0.0;
        for outer in 0..self.amps.len() / block {
            let base = outer * block + level * stride;
            for inner in 0..stride {
                p += self.amps[base + inner].norm_sqr();
            }
        }
        p
    }

    /// Projective computational-basis measurement of one site; collapses,
    /// renormalizes, and returns the outcome.
    pub fn measure_site(&mut self, site: usize, rng: &mut impl Rng) -> usize {
        let d = self.dims[site];
        let total = self.norm_sqr();
        let mut r: f64 = rng.random::<f64>() * total;
        let mut outcome = d - 1;
        for l in 0..d {
            let p = self.site_population(site, l);
            if r < p {
                outcome = l;
                break;
            }
            r -= p;
        }
        self.project_site(site, outcome);
        outcome
    }

    /// Zeroes all amplitudes where `site` is not at `level`, renormalizing.
    pub fn project_site(&mut self, site: usize, level: usize) {
        let stride = self.stride(site);
        let d = self.dims[site];
        let block = d * stride;
        for outer in 0..self.amps.len() / block {
            for l in 0..d {
                if l == level {
                    continue;
                }
                let base = outer * block + l * stride;
                for inner in 0..stride {
                    self.amps[base + inner] = Complex64::ZERO;
                }
            }
        }
        self.normalize();
    }

    /// Moves the (definite) population of `site` from `from` to `to`; used
    /// to reset a measured factor to a fresh level.
    pub fn relabel_site(&mut self, site: usize, from: usize, to: usize) {
        if from == to {
            return;
        }
        let stride = self.stride(site);
        let d = self.dims[site];
        let block = d * stride;
        for outer in 0..self.amps.len() / block {
            for inner in 0..stride {
                let a = outer * block + from * stride + inner;
                let b = outer * block + to * stride + inner;
                self.amps.swap(a, b);
            }
        }
    }

    /// Adds a fresh factor of dimension `dim` in state `|level>` at the
    /// front of the register.
    pub fn attach_front(&self, dim: usize, level: usize) -> Self {
        let mut dims = Vec::with_capacity(self.dims.len() + 1);
        dims.push(dim);
        dims.extend_from_slice(&self.dims);
        let mut amps = vec![Complex64::ZERO; dim * self.amps.len()];
        let base = level * self.amps.len();
        amps[base..base + self.amps.len()].copy_from_slice(&self.amps);
        Self { dims, amps }
    }

    /// Measures the front factor in its computational basis, drops it, and
    /// returns the outcome.
    pub fn measure_and_remove_front(&mut self, rng: &mut impl Rng) -> usize {
        let d = self.dims[0];
        let rest = self.amps.len() / d;
        let total = self.norm_sqr();
        let mut r: f64 = rng.random::<f64>() * total;
        let mut outcome = d - 1;
        for l in 0..d {
            let p: f64 = self.amps[l * rest..(l + 1) * rest]
                .iter()
                .map(|z| z.norm_sqr())
                .sum();
            if r < p {
                outcome = l;
                break;
            }
            r -= p;
        }
        let amps: Vec<Complex64> = self.amps[outcome * rest..(outcome + 1) * rest].to_vec();
        self.dims.remove(0);
        self.amps = amps;
        self.normalize();
        outcome
    }

    /// `<psi| (prod_k op_k at site_k) |psi>` for operators on distinct sites.
    pub fn expectation_product(&self, ops: &[(usize, &Operator)]) -> Complex64 {
        let mut phi = self.clone();
        for &(site, op) in ops {
            phi.apply_1(site, op);
        }
        self.inner(&phi)
    }

    /// Reduced density operator of the listed sites (strictly increasing).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<Operator> {
        let shape = crate::op::HilbertShape::new(&self.dims)?;
        let full = Operator::from_fn(shape, |i, j| self.amps[i] * self.amps[j].conj())?;
        full.partial_trace(keep)
    }
}
