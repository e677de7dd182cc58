//! Derivative-free minimization by the Nelder-Mead simplex method.
//!
//! Small, deterministic, and good enough for the handful-of-parameter
//! likelihood surfaces this crate fits. Objectives may return non-finite
//! values; those vertices are treated as worst-possible and the search moves
//! away from them.

use alloc::vec::Vec;

/// Outcome of one Nelder-Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Whether the simplex spread reached `tol` before the budget ran out.
    pub converged: bool,
}

/// Standard Nelder-Mead coefficients.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn order_by_value(simplex: &mut [(Vec<f64>, f64)]) {
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
}

/// Minimize `f` starting from `x0`, with an initial simplex displaced by
/// `step` per coordinate. Stops when the relative spread of the simplex
/// values drops below `tol` or after `max_evals` objective evaluations.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> OptimResult {
    let dim = x0.len();
    let mut evals = 0usize;
    let clean = |v: f64| if v.is_finite() { v } else { f64::MAX };
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        clean(f(x))
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for d in 0..dim {
        let mut x = x0.to_vec();
        x[d] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let mut converged = false;
    while evals < max_evals {
        order_by_value(&mut simplex);
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread = (worst - best).abs();
        let scale = best.abs().max(worst.abs()).max(1e-30);
        if spread <= tol * scale || (worst == f64::MAX && best == f64::MAX) {
            converged = worst != f64::MAX;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = alloc::vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst_x = simplex[dim].0.clone();
        let point_along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst_x)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = point_along(REFLECT);
        let fr = eval(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = point_along(EXPAND);
            let fe = eval(&expanded, &mut evals);
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            // Contract toward the better of the worst vertex and reflection.
            let contracted = if fr < simplex[dim].1 {
                point_along(CONTRACT)
            } else {
                point_along(-CONTRACT)
            };
            let fc = eval(&contracted, &mut evals);
            if fc < simplex[dim].1.min(fr) {
                simplex[dim] = (contracted, fc);
            } else {
                // Shrink everything toward the best vertex.
                let best_x = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for (xi, bi) in v.0.iter_mut().zip(&best_x) {
                        *xi = bi + SHRINK * (*xi - bi);
                    }
                    v.1 = eval(&v.0.clone(), &mut evals);
                }
            }
        }
    }

    order_by_value(&mut simplex);
    let (x, value) = simplex.swap_remove(0);
    OptimResult {
        x,
        value,
        evaluations: evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = nelder_mead(
            |x| (x[0] - 3.0) * (x[0] - 3.0) + 2.0 * (x[1] + 1.0) * (x[1] + 1.0),
            &[0.0, 0.0],
            0.5,
            1e-12,
            1000,
        );
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-4);
        assert!((r.x[1] + 1.0).abs() < 1e-4);
    }

    #[test]
    fn rosenbrock_two_dim() {
        let rosen = |x: &[f64]| {
            100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
        };
        let r = nelder_mead(rosen, &[-1.2, 1.0], 0.5, 1e-12, 4000);
        assert!((r.x[0] - 1.0).abs() < 1e-3, "x = {:?}", r.x);
        assert!((r.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn non_finite_objective_is_dodged() {
        // Objective is NaN on a half plane; minimum at x = 1 on the other.
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 1.0) * (x[0] - 1.0)
            }
        };
        let r = nelder_mead(f, &[0.4], 0.2, 1e-10, 500);
        assert!((r.x[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn respects_evaluation_budget() {
        let mut count = 0usize;
        let r = nelder_mead(
            |x| {
                count += 1;
                x[0].powi(2) + x[1].powi(2) + x[2].powi(2)
            },
            &[5.0, -3.0, 2.0],
            1.0,
            0.0, // never satisfied
            100,
        );
        assert!(!r.converged);
        assert!(count <= 105, "used {count} evaluations");
        assert_eq!(count, r.evaluations);
    }

    #[test]
    fn deterministic_given_start() {
        let f = |x: &[f64]| (x[0].sin() + x[1] * x[1]).exp();
        let a = nelder_mead(f, &[0.3, 0.7], 0.4, 1e-10, 800);
        let b = nelder_mead(f, &[0.3, 0.7], 0.4, 1e-10, 800);
        assert_eq!(a.x, b.x);
        assert_eq!(a.evaluations, b.evaluations);
    }
}
