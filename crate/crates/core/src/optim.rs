//! Derivative-free simplex minimization shared by the fitters.

use crate::error::Result;

/// Plain Nelder-Mead. The objective is responsible for clamping its own
/// domain. Returns `(best_x, best_f, converged)`; `converged` is false when
/// the evaluation budget ran out before the objective spread fell under
/// `ftol`.
pub fn nelder_mead(
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
        x[i] += step;
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
