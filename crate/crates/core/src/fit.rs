//! Maximum-likelihood estimation of the measurement-model parameters.
//!
//! The Gaussian log likelihood of the located data is maximized over
//! `(sigma2, tau2, phi)` and, for the Matern family, `kappa`. Positivity is
//! enforced by optimizing logs; the mean is profiled out in closed form (the
//! generalized-least-squares mean) at every covariance evaluation, so the
//! direct search never sees it. The likelihood in `phi` is often multimodal,
//! so the search restarts from three spread-out scale values plus the
//! caller's initial guess.

use crate::error::invalid;
use crate::linalg::{dot, Cholesky};
use crate::math::LN_TWO_PI;
use crate::model::{CorrelationFamily, ModelParams, SpatialDataset};
use crate::optim::{nelder_mead, OptimResult};
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;

/// Search budget per start.
const MAX_EVALS: usize = 2000;
/// Relative simplex-spread tolerance.
const FTOL: f64 = 1e-8;
/// Initial simplex displacement, in log-parameter space.
const STEP: f64 = 0.5;

/// How a fit went.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitReport {
    /// False when the best start exhausted its evaluation budget before the
    /// simplex collapsed; the returned parameters are then best-so-far.
    pub converged: bool,
    /// Total objective evaluations across all starts.
    pub evaluations: usize,
    /// Number of starts searched.
    pub starts: usize,
}

/// A fitted model with its log likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub params: ModelParams,
    pub log_likelihood: f64,
    pub report: FitReport,
}

struct Objective<'a> {
    data: &'a SpatialDataset,
    family: CorrelationFamily,
    fixed_kappa: Option<f64>,
}

impl Objective<'_> {
    fn optimizes_kappa(&self) -> bool {
        self.family == CorrelationFamily::Matern && self.fixed_kappa.is_none()
    }

    fn dim(&self) -> usize {
        if self.optimizes_kappa() {
            4
        } else {
            3
        }
    }

    fn params_at(&self, x: &[f64], mu: f64) -> Result<ModelParams> {
        let kappa = if self.optimizes_kappa() {
            libm::exp(x[3])
        } else {
            self.fixed_kappa.unwrap_or(0.5)
        };
        ModelParams::new(
            mu,
            libm::exp(x[0]),
            libm::exp(x[1]),
            libm::exp(x[2]),
            kappa,
            self.family,
        )
    }

    /// Negative profile log likelihood, plus the profiled mean.
    fn eval(&self, x: &[f64]) -> Option<(f64, f64)> {
        let params = self.params_at(x, 0.0).ok()?;
        let y = self.data.known_values();
        let n = y.len();
        let cov = params.covariance(self.data.known_locations());
        let chol = Cholesky::new(&cov, params.sill()).ok()?;
        let ones = vec![1.0; n];
        let a = chol.solve(y);
        let b = chol.solve(&ones);
        let mu = a.iter().sum::<f64>() / b.iter().sum::<f64>();
        let resid: Vec<f64> = y.iter().map(|v| v - mu).collect();
        let z = chol.solve_lower(&resid);
        let nll = 0.5 * (n as f64 * LN_TWO_PI + chol.log_det() + dot(&z, &z));
        nll.is_finite().then_some((nll, mu))
    }
}

/// Fit `(mu, sigma2, tau2, phi[, kappa])` to the located part of `data` by
/// maximum likelihood. `init` seeds the search (its `sigma2`, `tau2`, and
/// `kappa` are used by every start; `phi` only by the fourth). `fix_kappa`
/// pins the Matern order instead of estimating it; the exponential family
/// has no order and reports `init`'s back unchanged.
pub fn fit_mle(
    data: &SpatialDataset,
    family: CorrelationFamily,
    init: &ModelParams,
    fix_kappa: Option<f64>,
) -> Result<FitOutcome> {
    if data.n_known() < 5 {
        return Err(invalid("maximum-likelihood fitting needs at least 5 located observations"));
    }
    if let Some(k) = fix_kappa {
        if !(k > 0.0) || !k.is_finite() {
            return Err(invalid("fix_kappa must be positive and finite"));
        }
    }
    let objective = Objective {
        data,
        family,
        fixed_kappa: fix_kappa,
    };

    let base = [
        libm::log(init.sigma2.max(1e-12)),
        libm::log(init.tau2.max(1e-12)),
        libm::log(init.phi),
        libm::log(init.kappa),
    ];
    let quarter_diameter = data.region().diameter() / 4.0;
    let mut starts: Vec<Vec<f64>> = [0.1, 0.5, 1.0]
        .iter()
        .map(|frac| {
            let mut s = base[..objective.dim()].to_vec();
            s[2] = libm::log(frac * quarter_diameter);
            s
        })
        .collect();
    starts.push(base[..objective.dim()].to_vec());

    let mut best: Option<OptimResult> = None;
    let mut total_evals = 0usize;
    let n_starts = starts.len();
    for start in &starts {
        let run = nelder_mead(
            |x| objective.eval(x).map(|(nll, _)| nll).unwrap_or(f64::MAX),
            start,
            STEP,
            FTOL,
            MAX_EVALS,
        );
        total_evals += run.evaluations;
        if best.as_ref().map_or(true, |b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let (nll, mu) = objective
        .eval(&best.x)
        .ok_or_else(|| invalid("likelihood is degenerate at every start"))?;
    let params = objective.params_at(&best.x, mu)?;
    Ok(FitOutcome {
        params,
        log_likelihood: -nll,
        report: FitReport {
            converged: best.converged,
            evaluations: total_evals,
            starts: n_starts,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::model::mvn_logdensity;
    use crate::pointprocess::sample_uniform;
    use crate::sim::simulate_measurements;

    fn simulated_dataset(n: usize, params: &ModelParams, seed: u64) -> SpatialDataset {
        let locs = sample_uniform(n, Rect::unit_square(), seed);
        let y = simulate_measurements(&locs, params, seed ^ 0xabcd).unwrap();
        SpatialDataset::new(locs, y, vec![], Rect::unit_square()).unwrap()
    }

    #[test]
    fn too_few_observations_rejected() {
        let truth = ModelParams::exponential(0.0, 1.0, 0.1, 0.1).unwrap();
        let data = simulated_dataset(4, &truth, 3);
        let err = fit_mle(&data, CorrelationFamily::Exponential, &truth, None);
        assert!(err.is_err());
    }

    #[test]
    fn pure_nugget_data_fits_to_iid_model() {
        // sigma2 = 0 truth: i.i.d. N(mu, tau2) observations. The spatial
        // component collapses to the boundary, though it may do so along
        // either of two equivalent routes (sigma2 -> 0, or phi -> 0 with the
        // sill split arbitrarily); what is identified is that the fitted
        // covariance between distinct observations vanishes and the sill
        // matches the sample variance.
        let truth = ModelParams::exponential(1.5, 0.0, 0.5, 0.1).unwrap();
        let data = simulated_dataset(200, &truth, 11);
        let init = ModelParams::exponential(0.0, 0.3, 0.3, 0.2).unwrap();
        let fit = fit_mle(&data, CorrelationFamily::Exponential, &init, None).unwrap();

        let y = data.known_values();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let sample_var =
            y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (y.len() - 1) as f64;

        let sill = fit.params.sill();
        // Beyond 2% of the region diameter the fitted covariance must be
        // negligible (a truth-sized phi of 0.1 would leave ~80% of the sill
        // here). A handful of near-duplicate location pairs may legitimately
        // retain micro-scale correlation, which is why the check is at a
        // distance rather than over all pairs.
        let probe = 0.02 * data.region().diameter();
        let cov_at_probe = fit.params.sigma2 * fit.params.correlation(probe).unwrap();
        assert!(
            cov_at_probe < 0.05 * sill,
            "spatial covariance did not collapse: {:?} (cov at {probe}: {cov_at_probe})",
            fit.params
        );
        assert!(
            (sill - sample_var).abs() < 0.15 * sample_var,
            "sill {sill} vs sample variance {sample_var}"
        );
        // And the fit must be at least as good as the best i.i.d. submodel.
        let n = y.len() as f64;
        let var_ml = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let ll_iid = -0.5 * n * ((2.0 * core::f64::consts::PI * var_ml).ln() + 1.0);
        assert!(fit.log_likelihood >= ll_iid - 1e-4);
    }

    #[test]
    fn fitted_likelihood_dominates_truth() {
        let truth = ModelParams::exponential(0.0, 1.0, 0.1, 0.1).unwrap();
        let data = simulated_dataset(60, &truth, 17);
        let fit = fit_mle(&data, CorrelationFamily::Exponential, &truth, None).unwrap();

        let cov_truth = truth.covariance(data.known_locations());
        let mean_truth = vec![truth.mu; data.n_known()];
        let ll_truth = mvn_logdensity(data.known_values(), &mean_truth, &cov_truth).unwrap();
        assert!(
            fit.log_likelihood >= ll_truth - 1e-4,
            "fitted {} < truth {}",
            fit.log_likelihood,
            ll_truth
        );
    }

    #[test]
    fn reported_likelihood_matches_independent_evaluation() {
        let truth = ModelParams::exponential(0.3, 0.8, 0.2, 0.15).unwrap();
        let data = simulated_dataset(50, &truth, 23);
        let fit = fit_mle(&data, CorrelationFamily::Exponential, &truth, None).unwrap();
        let cov = fit.params.covariance(data.known_locations());
        let mean = vec![fit.params.mu; data.n_known()];
        let ll = mvn_logdensity(data.known_values(), &mean, &cov).unwrap();
        assert!(
            (ll - fit.log_likelihood).abs() < 1e-6,
            "reported {} recomputed {ll}",
            fit.log_likelihood
        );
    }

    #[test]
    fn fix_kappa_is_honored() {
        let truth = ModelParams::matern(0.0, 1.0, 0.1, 0.2, 1.5).unwrap();
        let data = simulated_dataset(40, &truth, 29);
        let fit = fit_mle(&data, CorrelationFamily::Matern, &truth, Some(2.5)).unwrap();
        assert_eq!(fit.params.kappa, 2.5);
        assert_eq!(fit.params.family, CorrelationFamily::Matern);
    }
}
