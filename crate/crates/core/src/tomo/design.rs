//! Tomography experiment designs and synthetic measurement data.

use std::io::{BufRead, BufReader, Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::op::states::{basis_ket, ketbra, superposition_ket, I, ONE};
use crate::op::{eig_hermitian, DensityOperator, Effect, HilbertShape, Operator};
use crate::rng::seeded_rng;
use crate::tol;
use crate::tomo::ChoiOperator;

/// A labelled preparation state.
#[derive(Debug, Clone)]
pub struct Prep {
    pub label: String,
    pub state: DensityOperator,
}

/// A complete measurement setting: effects summing to the identity.
#[derive(Debug, Clone)]
pub struct Setting {
    pub label: String,
    pub effects: Vec<Effect>,
}

/// Informationally complete preparation/measurement design together with
/// its cached design matrix `S` (one row `<<Pi_ij|` per experiment).
///
/// Full column rank is checked at construction; product designs inherit it
/// from their factors.
#[derive(Debug, Clone)]
pub struct TomographyDesign {
    shape: HilbertShape,
    preps: Vec<Prep>,
    settings: Vec<Setting>,
    s: DMatrix<Complex64>,
    effects_per_prep: usize,
}

impl TomographyDesign {
    /// Builds a design and verifies that the projectors
    /// `rho_i* (x) E_j` span the operator space.
    pub fn new(shape: HilbertShape, preps: Vec<Prep>, settings: Vec<Setting>) -> Result<Self> {
        let design = Self::assemble(shape, preps, settings)?;
        design.check_rank()?;
        Ok(design)
    }

    fn assemble(shape: HilbertShape, preps: Vec<Prep>, settings: Vec<Setting>) -> Result<Self> {
        if preps.is_empty() || settings.is_empty() {
            return Err(Error::InvalidArgument("design needs preparations and settings".into()));
        }
        let d = shape.dim();
        for p in &preps {
            if p.state.op().dim() != d {
                return Err(Error::ShapeMismatch(format!("prep '{}' has wrong dimension", p.label)));
            }
        }
        for s in &settings {
            if s.effects.is_empty() {
                return Err(Error::InvalidArgument(format!("setting '{}' has no effects", s.label)));
            }
            let mut sum = Operator::zeros(shape.clone());
            for e in &s.effects {
                if e.op().dim() != d {
                    return Err(Error::ShapeMismatch(format!("effect in '{}' has wrong dimension", s.label)));
                }
                sum = sum.add(e.op())?;
            }
            if sum.max_abs_diff(&Operator::identity(shape.clone())) > tol::SETTING_COMPLETENESS {
                return Err(Error::InvalidArgument(format!(
                    "effects of setting '{}' do not sum to the identity",
                    s.label
                )));
            }
        }

        let effects_per_prep: usize = settings.iter().map(|s| s.effects.len()).sum();
        let rows = preps.len() * effects_per_prep;
        let cols = d * d * d * d;
        let mut s_mat = DMatrix::zeros(rows, cols);
        let mut row = 0;
        for p in &preps {
            let prep_conj = p.state.op().conjugate();
            for setting in &settings {
                for e in &setting.effects {
                    let proj = prep_conj.tensor(e.op());
                    for (col, v) in proj.vec().iter().enumerate() {
                        s_mat[(row, col)] = v.conj();
                    }
                    row += 1;
                }
            }
        }
        Ok(Self { shape, preps, settings, s: s_mat, effects_per_prep })
    }

    fn check_rank(&self) -> Result<()> {
        let gram = self.s.adjoint() * &self.s;
        let shape_like = HilbertShape::new(&vec![2; 1]).unwrap();
        let _ = shape_like;
        let herm = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
        let floor = max * 1e-12;
        let null_count = eig.eigenvalues.iter().filter(|&&v| v <= floor).count();
        if null_count > 0 {
            let smallest = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            return Err(Error::RankDeficient { null_count, smallest: smallest.max(0.0).sqrt() });
        }
        Ok(())
    }

    /// Standard qubit design: preparations `{|0>, |1>, |+>, |+i>}` against
    /// the X, Y, Z eigenbasis settings. Rank 16.
    pub fn qubit() -> Self {
        let shape = HilbertShape::qubit();
        let kets = [
            ("0".to_string(), basis_ket(2, 0)),
            ("1".to_string(), basis_ket(2, 1)),
            ("+".to_string(), superposition_ket(2, 0, 1, ONE)),
            ("+i".to_string(), superposition_ket(2, 0, 1, I)),
        ];
        let preps = kets
            .into_iter()
            .map(|(label, ket)| Prep {
                label,
                state: DensityOperator::pure(shape.clone(), &ket).expect("pure prep"),
            })
            .collect();
        let settings = vec![
            basis_setting(&shape, "X", &[superposition_ket(2, 0, 1, ONE), superposition_ket(2, 0, 1, -ONE)]),
            basis_setting(&shape, "Y", &[superposition_ket(2, 0, 1, I), superposition_ket(2, 0, 1, -I)]),
            basis_setting(&shape, "Z", &[basis_ket(2, 0), basis_ket(2, 1)]),
        ];
        Self::new(shape, preps, settings).expect("qubit design is complete")
    }

    /// Qutrit design: 9 preparations against 6 complete settings (X- and
    /// Y-type bases of the three two-level subspaces, each completed by
    /// the projector onto the remaining level). Rank 81.
    pub fn qutrit() -> Self {
        let shape = HilbertShape::qutrit();
        let mut preps: Vec<Prep> = (0..3)
            .map(|k| Prep {
                label: format!("{k}"),
                state: DensityOperator::pure(shape.clone(), &basis_ket(3, k)).expect("pure"),
            })
            .collect();
        for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
            preps.push(Prep {
                label: format!("{a}+{b}"),
                state: DensityOperator::pure(shape.clone(), &superposition_ket(3, a, b, ONE)).expect("pure"),
            });
            preps.push(Prep {
                label: format!("{a}+i{b}"),
                state: DensityOperator::pure(shape.clone(), &superposition_ket(3, a, b, I)).expect("pure"),
            });
        }
        let mut settings = Vec::new();
        for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let rest = 3 - a - b;
            settings.push(basis_setting(
                &shape,
                &format!("X{a}{b}"),
                &[
                    superposition_ket(3, a, b, ONE),
                    superposition_ket(3, a, b, -ONE),
                    basis_ket(3, rest),
                ],
            ));
            settings.push(basis_setting(
                &shape,
                &format!("Y{a}{b}"),
                &[
                    superposition_ket(3, a, b, I),
                    superposition_ket(3, a, b, -I),
                    basis_ket(3, rest),
                ],
            ));
        }
        Self::new(shape, preps, settings).expect("qutrit design is complete")
    }

    /// Product of two designs (ancilla (x) qutrit): preparations and
    /// settings are all pairwise tensor products. Rank is inherited from
    /// the factors, so the dense check is skipped.
    pub fn product(left: &Self, right: &Self) -> Result<Self> {
        let shape = left.shape.tensor(&right.shape);
        let mut preps = Vec::with_capacity(left.preps.len() * right.preps.len());
        for lp in &left.preps {
            for rp in &right.preps {
                preps.push(Prep {
                    label: format!("{}*{}", lp.label, rp.label),
                    state: DensityOperator::new(lp.state.op().tensor(rp.state.op()))?,
                });
            }
        }
        let mut settings = Vec::with_capacity(left.settings.len() * right.settings.len());
        for ls in &left.settings {
            for rs in &right.settings {
                let mut effects = Vec::with_capacity(ls.effects.len() * rs.effects.len());
                for le in &ls.effects {
                    for re_ in &rs.effects {
                        effects.push(Effect::new(le.op().tensor(re_.op()))?);
                    }
                }
                settings.push(Setting { label: format!("{}*{}", ls.label, rs.label), effects });
            }
        }
        Self::assemble(shape, preps, settings)
    }

    /// Combined ancilla (x) qutrit design (4 x 9 preparations, 3 x 6
    /// settings, 648 experiments).
    pub fn ancilla_qutrit() -> Result<Self> {
        Self::product(&Self::qubit(), &Self::qutrit())
    }

    pub fn shape(&self) -> &HilbertShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn preps(&self) -> &[Prep] {
        &self.preps
    }

    pub fn settings(&self) -> &[Setting] {
        &self.settings
    }

    /// The design matrix `S` with rows `<<Pi_ij|` over vectorized Choi
    /// space; `S |Lambda>>` reproduces the outcome probabilities.
    pub fn design_matrix(&self) -> &DMatrix<Complex64> {
        &self.s
    }

    pub fn rows(&self) -> usize {
        self.s.nrows()
    }

    /// Row index of (prep, setting, effect).
    pub fn row(&self, prep: usize, setting: usize, effect: usize) -> usize {
        let mut offset = 0;
        for s in &self.settings[..setting] {
            offset += s.effects.len();
        }
        prep * self.effects_per_prep + offset + effect
    }

    /// Inverse of [`TomographyDesign::row`].
    pub fn row_labels(&self, row: usize) -> (usize, usize, usize) {
        let prep = row / self.effects_per_prep;
        let mut rest = row % self.effects_per_prep;
        for (si, s) in self.settings.iter().enumerate() {
            if rest < s.effects.len() {
                return (prep, si, rest);
            }
            rest -= s.effects.len();
        }
        unreachable!("row out of range")
    }

    /// Number of experiments (prep, setting) pairs.
    pub fn experiment_count(&self) -> usize {
        self.preps.len() * self.settings.len()
    }
}

fn basis_setting(shape: &HilbertShape, label: &str, kets: &[Vec<Complex64>]) -> Setting {
    Setting {
        label: label.to_string(),
        effects: kets
            .iter()
            .map(|k| Effect::projector(shape.clone(), k).expect("projector"))
            .collect(),
    }
}

/// One tomography experiment record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub prep_index: usize,
    pub setting_index: usize,
    pub effect_index: usize,
    pub shots: u64,
    pub count: u64,
}

impl MeasurementRecord {
    pub fn frequency(&self) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            self.count as f64 / self.shots as f64
        }
    }
}

/// Outcome probabilities `p = S |Lambda>>` for every design row, with the
/// imaginary residue checked and values clipped to [0, 1].
pub fn predict_probabilities(choi: &ChoiOperator, design: &TomographyDesign) -> Result<Vec<f64>> {
    if choi.in_dim() * choi.out_dim() != design.dim() * design.dim() {
        return Err(Error::ShapeMismatch(format!(
            "Choi dimension {} does not match design on dimension {}",
            choi.in_dim() * choi.out_dim(),
            design.dim()
        )));
    }
    let lam = nalgebra::DVector::from_vec(choi.operator().vec());
    let p = design.design_matrix() * lam;
    let scale = choi.operator().max_abs().max(1.0);
    let mut out = Vec::with_capacity(p.len());
    for v in p.iter() {
        if v.im.abs() > 1e-7 * scale {
            return Err(Error::Numerical(format!(
                "predicted probability has imaginary residue {:.3e}",
                v.im
            )));
        }
        out.push(v.re.clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Draws multinomial counts for every (prep, setting) experiment.
///
/// Probabilities within one setting may sum to less than one for
/// trace-decreasing maps; the remainder is assigned to a discard outcome
/// that produces no record. Deterministic given the seed.
pub fn sample_counts(
    probabilities: &[f64],
    design: &TomographyDesign,
    shots: u64,
    seed: u64,
) -> Result<Vec<MeasurementRecord>> {
    if probabilities.len() != design.rows() {
        return Err(Error::ShapeMismatch(format!(
            "{} probabilities for {} design rows",
            probabilities.len(),
            design.rows()
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut records = Vec::with_capacity(design.rows());
    for prep in 0..design.preps().len() {
        for (si, setting) in design.settings().iter().enumerate() {
            let rows: Vec<usize> = (0..setting.effects.len()).map(|e| design.row(prep, si, e)).collect();
            let mut probs: Vec<f64> = rows.iter().map(|&r| probabilities[r]).collect();
            let total: f64 = probs.iter().sum();
            if probs.iter().any(|&p| p < tol::PROBABILITY_FLOOR) || total > 1.0 + 1e-7 {
                return Err(Error::InvalidArgument(format!(
                    "setting probabilities invalid (sum {total:.6})"
                )));
            }
            for p in &mut probs {
                *p = p.max(0.0);
            }
            let counts = multinomial(&probs, (1.0 - total).max(0.0), shots, &mut rng);
            for ((effect, &count), _) in counts.iter().enumerate().zip(&rows) {
                records.push(MeasurementRecord {
                    prep_index: prep,
                    setting_index: si,
                    effect_index: effect,
                    shots,
                    count,
                });
            }
        }
    }
    Ok(records)
}

/// Sequential-binomial multinomial sampler; the discard outcome absorbs
/// the remaining probability mass.
fn multinomial(probs: &[f64], discard: f64, shots: u64, rng: &mut impl rand::Rng) -> Vec<u64> {
    use rand_distr::Distribution;
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().sum::<f64>() + discard;
    let mut counts = vec![0u64; probs.len()];
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let cond = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = rand_distr::Binomial::new(remaining, cond).expect("valid binomial");
        let c = draw.sample(rng);
        counts[i] = c;
        remaining -= c;
        mass -= p;
    }
    counts
}

/// Writes records as CSV: `prep_index,setting_index,effect_index,shots,count`.
pub fn write_records_csv(w: &mut impl Write, records: &[MeasurementRecord]) -> Result<()> {
    writeln!(w, "prep_index,setting_index,effect_index,shots,count")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.prep_index, r.setting_index, r.effect_index, r.shots, r.count
        )?;
    }
    Ok(())
}

/// Reads records from the CSV format written by [`write_records_csv`].
pub fn read_records_csv(r: impl Read) -> Result<Vec<MeasurementRecord>> {
    let reader = BufReader::new(r);
    let mut records = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || (lineno == 0 && trimmed.starts_with("prep_index")) {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::InvalidArgument(format!(
                "line {}: expected 5 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<u64> {
            s.trim()
                .parse()
                .map_err(|e| Error::InvalidArgument(format!("line {}: {e}", lineno + 1)))
        };
        let record = MeasurementRecord {
            prep_index: parse(fields[0])? as usize,
            setting_index: parse(fields[1])? as usize,
            effect_index: parse(fields[2])? as usize,
            shots: parse(fields[3])?,
            count: parse(fields[4])?,
        };
        if record.count > record.shots {
            return Err(Error::InvalidArgument(format!("line {}: count exceeds shots", lineno + 1)));
        }
        records.push(record);
    }
    Ok(records)
}

// Kept for rank diagnostics on small custom designs.
#[allow(dead_code)]
fn numerical_rank(s: &DMatrix<Complex64>) -> usize {
    let gram = s.adjoint() * s;
    let herm = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    eig.eigenvalues.iter().filter(|&&v| v > max * 1e-12).count()
}

// Convenience used by tests: rank-one effects from ketbra projectors need
// hermitization before the Effect invariant check.
#[allow(dead_code)]
pub(crate) fn projector_effect(dim: usize, k: usize) -> Effect {
    Effect::new(ketbra(dim, k, k)).expect("projector effect")
}
