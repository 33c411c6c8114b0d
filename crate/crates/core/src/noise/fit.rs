//! Infidelity-minimizing noise-parameter fits.
//!
//! Builds a noisy model Choi operator by sending the ideal detection Choi
//! through a parametrized error channel on its output slot, then minimizes
//! `1 - F(target, model)` over the active parameters with a derivative-free
//! simplex search. Fidelity gradients through eigendecompositions are
//! fragile, so no derivatives are used anywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instrument::LossAngle;
use crate::noise::{
    corr_overrotation, dephase, depolarize, ideal_qnd_choi, noisy_choi_target, single_overrotations,
    NoiseParams,
};
use crate::op::fidelity_psd;
use crate::op::Operator;
use crate::tomo::ChoiOperator;

/// Error channels available to the fitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseChannelKind {
    Depol,
    Deph,
    Corr,
    Single,
}

/// Search configuration.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Total objective-evaluation budget across restarts.
    pub max_evaluations: usize,
    /// Simplex restarts around the incumbent best point.
    pub restarts: usize,
    /// Objective-spread convergence threshold.
    pub ftol: f64,
    /// Initial simplex step in probability space.
    pub initial_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_evaluations: 4000, restarts: 3, ftol: 1e-12, initial_step: 0.02 }
    }
}

/// Fit result: best parameters and the achieved fidelities.
#[derive(Debug, Clone, Serialize)]
pub struct NoiseFit {
    pub model: Vec<NoiseChannelKind>,
    pub params: NoiseParams,
    /// Fidelity of the target with the noiseless detection Choi.
    pub fidelity_ideal: f64,
    /// Fidelity of the target with the fitted noisy model Choi.
    pub fidelity_model: f64,
    pub evaluations: usize,
}

/// Builds the model Choi for a parameter set: the ideal Choi at `phi` with
/// the active channels applied to its output slot (correlated rotation,
/// then single rotations, then depolarizing, then dephasing).
pub fn model_choi(phi: LossAngle, model: &[NoiseChannelKind], params: &NoiseParams) -> Result<ChoiOperator> {
    let ideal = ideal_qnd_choi(phi)?;
    let corr = corr_overrotation(params.alpha);
    let single = single_overrotations(params.beta);
    let apply = move |m: &Operator| -> Result<Operator> {
        let mut out = m.clone();
        if params.alpha != 0.0 {
            out = corr.mul(&out)?.mul(&corr.dagger())?;
        }
        if params.beta != 0.0 {
            out = single.mul(&out)?.mul(&single.dagger())?;
        }
        if params.p_depol > 0.0 {
            out = depolarize(&out, params.p_depol)?;
        }
        if params.p_deph > 0.0 {
            out = dephase(&out, params.p_deph)?;
        }
        Ok(out)
    };
    let _ = model; // active channels are encoded by which params are nonzero
    noisy_choi_target(&ideal, apply)
}

/// Minimizes the infidelity between `target` and the model family over the
/// listed channels. Deterministic given the initial guess. With an empty
/// model the result just reports the ideal fidelity.
pub fn fit_noise_params(
    target: &ChoiOperator,
    phi: LossAngle,
    model: &[NoiseChannelKind],
    init: &NoiseParams,
    opts: FitOptions,
) -> Result<NoiseFit> {
    let ideal = ideal_qnd_choi(phi)?;
    let fidelity_ideal = fidelity_psd(target.operator(), ideal.operator())?;
    if model.is_empty() {
        return Ok(NoiseFit {
            model: Vec::new(),
            params: NoiseParams::zero(),
            fidelity_ideal,
            fidelity_model: fidelity_ideal,
            evaluations: 0,
        });
    }

    let mut active: Vec<NoiseChannelKind> = Vec::new();
    for kind in [
        NoiseChannelKind::Corr,
        NoiseChannelKind::Single,
        NoiseChannelKind::Depol,
        NoiseChannelKind::Deph,
    ] {
        if model.contains(&kind) {
            active.push(kind);
        }
    }

    let pack = |params: &NoiseParams| -> Vec<f64> {
        active
            .iter()
            .map(|kind| match kind {
                NoiseChannelKind::Corr => params.p_corr(),
                NoiseChannelKind::Single => params.p_single(),
                NoiseChannelKind::Depol => params.p_depol,
                NoiseChannelKind::Deph => params.p_deph,
            })
            .collect()
    };
    let unpack = |x: &[f64]| -> NoiseParams {
        let mut p_corr = 0.0;
        let mut p_single = 0.0;
        let mut p_depol = 0.0;
        let mut p_deph = 0.0;
        for (kind, &v) in active.iter().zip(x) {
            let v = v.clamp(0.0, 0.5);
            match kind {
                NoiseChannelKind::Corr => p_corr = v,
                NoiseChannelKind::Single => p_single = v,
                NoiseChannelKind::Depol => p_depol = v,
                NoiseChannelKind::Deph => p_deph = v,
            }
        }
        NoiseParams::from_probabilities(p_corr, p_single, p_depol, p_deph).expect("clamped params")
    };

    let mut evaluations = 0usize;
    let mut objective = |x: &[f64]| -> Result<f64> {
        evaluations += 1;
        let params = unpack(x);
        let modeled = model_choi(phi, &active, &params)?;
        Ok(1.0 - fidelity_psd(target.operator(), modeled.operator())?)
    };

    let mut best_x = pack(init).iter().map(|v| v.clamp(0.0, 0.5)).collect::<Vec<_>>();
    let mut best_f = objective(&best_x)?;
    let mut step = opts.initial_step;
    let mut converged = false;
    for _ in 0..=opts.restarts {
        let budget = opts.max_evaluations.saturating_sub(evaluations);
        if budget == 0 {
            break;
        }
        let (x, f, done) = nelder_mead(&mut objective, &best_x, step, opts.ftol, budget)?;
        if f < best_f {
            best_f = f;
            best_x = x;
        }
        if done {
            converged = true;
            break;
        }
        step *= 0.25;
    }

    let params = unpack(&best_x);
    if !converged && best_f > 1e-6 {
        return Err(Error::FitBudgetExhausted { evaluations, infidelity: best_f, best: params });
    }
    Ok(NoiseFit {
        model: active,
        params,
        fidelity_ideal,
        fidelity_model: 1.0 - best_f,
        evaluations,
    })
}

/// Plain Nelder-Mead on `[0, 0.5]^n` (clamping happens inside the
/// objective). Returns `(best_x, best_f, converged)`.
fn nelder_mead(
    objective: &mut impl FnMut(&[f64]) -> Result<f64>,
    start: &[f64],
    step: f64,
    ftol: f64,
    budget: usize,
) -> Result<(Vec<f64>, f64, bool)> {
    let n = start.len();
    let mut used = 0usize;
    let mut eval = |x: &[f64], used: &mut usize| -> Result<f64> {
        *used += 1;
        objective(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(start, &mut used)?;
    simplex.push((start.to_vec(), f0));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] = (x[i] + step).clamp(0.0, 0.5);
        if (x[i] - start[i]).abs() < 1e-12 {
            x[i] = (start[i] - step).clamp(0.0, 0.5);
        }
        let f = eval(&x, &mut used)?;
        simplex.push((x, f));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() < ftol {
            return Ok((simplex[0].0.clone(), simplex[0].1, true));
        }
        if used >= budget {
            return Ok((simplex[0].0.clone(), simplex[0].1, false));
        }

        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = (0..n)
            .map(|i| centroid[i] + alpha * (centroid[i] - worst.0[i]))
            .collect();
        let f_reflect = eval(&reflect, &mut used)?;

        if f_reflect < simplex[0].1 {
            let expand: Vec<f64> = (0..n)
                .map(|i| centroid[i] + gamma * (reflect[i] - centroid[i]))
                .collect();
            let f_expand = eval(&expand, &mut used)?;
            simplex[n] = if f_expand < f_reflect { (expand, f_expand) } else { (reflect, f_reflect) };
        } else if f_reflect < simplex[n - 1].1 {
            simplex[n] = (reflect, f_reflect);
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|i| centroid[i] + rho * (worst.0[i] - centroid[i]))
                .collect();
            let f_contract = eval(&contract, &mut used)?;
            if f_contract < worst.1 {
                simplex[n] = (contract, f_contract);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = (0..n)
                        .map(|i| best[i] + sigma * (entry.0[i] - best[i]))
                        .collect();
                    let f = eval(&shrunk, &mut used)?;
                    *entry = (shrunk, f);
                }
            }
        }
    }
}
