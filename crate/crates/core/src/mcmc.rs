//! Metropolis-Hastings sampling of several missing locations at once.
//!
//! The posterior over missing locations is typically multi-modal: any place
//! whose observed measurement is close to an orphan value is a candidate. A
//! plain random walk gets trapped in one mode, so each component of the
//! proposal mixes two moves: with probability `p` a random walk around the
//! current position (scale `h1`), otherwise a Gaussian jump centered on a
//! uniformly chosen observed location (scale `h2`) -- the observed locations
//! are exactly where the modes form. The whole vector is accepted or rejected
//! jointly with the usual ratio, with the mixture density evaluated in both
//! directions.
//!
//! All scales are in the coordinate units of the data and "should be tuned by
//! pilot runs"; [`McmcConfig::default_tuning`] gives workable starting values.

use crate::error::invalid;
use crate::geom::{Point, Rect};
use crate::grid::Grid;
use crate::math::LN_TWO_PI;
use crate::model::{ModelParams, SpatialDataset};
use crate::posterior::Posterior;
use crate::prior::LocationPrior;
use crate::quadrature::PredictiveField;
use crate::{Error, Result};
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Sampler configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcConfig {
    /// Random-walk proposal scale.
    pub h1: f64,
    /// Scale of the proposal anchored at observed locations.
    pub h2: f64,
    /// Probability of the random-walk move (the rest anchors on the data).
    pub p: f64,
    pub iterations: usize,
    pub burn_in: usize,
    /// Keep every `thin`-th post-burn-in state.
    pub thin: usize,
    pub seed: u64,
    /// Starting locations; when absent each missing location starts at a
    /// uniformly drawn observed location.
    pub init: Option<Vec<Point>>,
}

impl McmcConfig {
    /// A configuration with the default tuning for `region`:
    /// `h1` = 10% and `h2` = 4% of the region diameter, `p` = 1/2.
    pub fn for_region(region: Rect, iterations: usize, burn_in: usize, thin: usize, seed: u64) -> Self {
        let (h1, h2, p) = Self::default_tuning(region);
        McmcConfig {
            h1,
            h2,
            p,
            iterations,
            burn_in,
            thin,
            seed,
            init: None,
        }
    }

    /// Default `(h1, h2, p)` for a study region, as fractions of its
    /// diameter.
    pub fn default_tuning(region: Rect) -> (f64, f64, f64) {
        let d = region.diameter();
        (0.1 * d, 0.04 * d, 0.5)
    }

    pub fn retained(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }

    fn validate(&self, n_orphans: usize) -> Result<()> {
        if !(self.h1 > 0.0) || !(self.h2 > 0.0) {
            return Err(invalid("proposal scales h1 and h2 must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(invalid("mixture weight p must lie in [0, 1]"));
        }
        if self.thin == 0 {
            return Err(invalid("thin must be at least 1"));
        }
        if self.burn_in >= self.iterations {
            return Err(invalid("burn_in must be smaller than iterations"));
        }
        if self.retained() < 100 {
            return Err(invalid(alloc::format!(
                "(iterations - burn_in) / thin = {} retained samples; need at least 100",
                self.retained()
            )));
        }
        if let Some(init) = &self.init {
            if init.len() != n_orphans {
                return Err(invalid(alloc::format!(
                    "init has {} locations for {} orphan values",
                    init.len(),
                    n_orphans
                )));
            }
            if init.iter().any(|p| !p.is_finite()) {
                return Err(invalid("init locations must be finite"));
            }
        }
        Ok(())
    }
}

/// A finished run: the retained chain plus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcRun {
    /// `samples[k][i]` is the position of missing location `i` in retained
    /// state `k`.
    pub samples: Vec<Vec<Point>>,
    /// Accepted moves over all iterations (burn-in included).
    pub acceptance_rate: f64,
    pub config: McmcConfig,
}

impl McmcRun {
    /// One coordinate of one missing location as a series over the retained
    /// chain (`x_axis = false` gives the vertical coordinate).
    pub fn coordinate_series(&self, orphan_index: usize, x_axis: bool) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| {
                let p = s[orphan_index];
                if x_axis {
                    p.x
                } else {
                    p.y
                }
            })
            .collect()
    }

    /// Bin the retained positions of one missing location onto `grid`,
    /// normalized to a discrete marginal density. Samples outside the grid
    /// rectangle are ignored.
    pub fn marginal_field(&self, orphan_index: usize, grid: Grid) -> Result<PredictiveField> {
        let mut counts = alloc::vec![0.0f64; grid.len()];
        for s in &self.samples {
            if let Some(cell) = grid.cell_containing(&s[orphan_index]) {
                counts[cell] += 1.0;
            }
        }
        PredictiveField::from_weights(grid, counts)
    }
}

#[inline]
fn ln_std_normal(t: f64) -> f64 {
    -0.5 * LN_TWO_PI - 0.5 * t * t
}

/// Log density of the mixture proposal for moving `from -> to`, given the
/// observed locations: per component, a random-walk kernel of scale `h1`
/// with weight `p` plus equally-weighted kernels of scale `h2` at each
/// observed location with total weight `1 - p`, all through the standard
/// Gaussian profile `f`:
///
/// ```text
/// q(to | from) = prod_i [ p/h1 f(|to_i - from_i|/h1)
///                         + (1-p)/(n h2) sum_j f(|to_i - x_j|/h2) ]
/// ```
pub fn proposal_logdensity(
    to: &[Point],
    from: &[Point],
    known: &[Point],
    h1: f64,
    h2: f64,
    p: f64,
) -> f64 {
    debug_assert_eq!(to.len(), from.len());
    let n_known = known.len() as f64;
    let ln_walk = libm::log(p) - libm::log(h1);
    let ln_anchor = libm::log(1.0 - p) - libm::log(n_known * h2);

    let mut total = 0.0;
    let mut terms: Vec<f64> = Vec::with_capacity(1 + known.len());
    for (w, z) in to.iter().zip(from) {
        terms.clear();
        terms.push(ln_walk + ln_std_normal(w.distance(z) / h1));
        for x in known {
            terms.push(ln_anchor + ln_std_normal(w.distance(x) / h2));
        }
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let sum: f64 = terms.iter().map(|t| libm::exp(t - max)).sum();
        total += max + libm::log(sum);
    }
    total
}

/// One Metropolis-Hastings chain over missing-location vectors. Holds the
/// posterior (with its cached factorization) and the proposal tuning.
#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    posterior: Posterior<'a>,
    h1: f64,
    h2: f64,
    p: f64,
}

/// Current position of a chain with its cached log target.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub current: Vec<Point>,
    pub log_density: f64,
}

impl<'a> Sampler<'a> {
    pub fn new(posterior: Posterior<'a>, h1: f64, h2: f64, p: f64) -> Result<Self> {
        if !(h1 > 0.0) || !(h2 > 0.0) {
            return Err(invalid("proposal scales must be positive"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("mixture weight p must lie in [0, 1]"));
        }
        Ok(Sampler {
            posterior,
            h1,
            h2,
            p,
        })
    }

    pub fn posterior(&self) -> &Posterior<'a> {
        &self.posterior
    }

    /// Score a starting vector. A start outside the prior support is allowed
    /// (its log density is `-inf`); the chain then moves on the first
    /// supported proposal.
    pub fn init_state(&self, init: Vec<Point>) -> Result<ChainState> {
        let log_density = self.posterior.log_density(&init)?;
        Ok(ChainState {
            current: init,
            log_density,
        })
    }

    /// Advance the chain one step. Proposes every component independently
    /// per the mixture rule, then accepts or rejects the whole vector.
    /// Returns whether the proposal was accepted.
    pub fn step(&self, state: &mut ChainState, rng: &mut impl Rng) -> Result<bool> {
        let known = self.posterior.data().known_locations();
        let proposal: Vec<Point> = state
            .current
            .iter()
            .map(|z| {
                let (center, h) = if rng.gen::<f64>() < self.p {
                    (*z, self.h1)
                } else {
                    (known[rng.gen_range(0..known.len())], self.h2)
                };
                let ex: f64 = StandardNormal.sample(rng);
                let ey: f64 = StandardNormal.sample(rng);
                Point::new(center.x + h * ex, center.y + h * ey)
            })
            .collect();

        let prop_density = self.posterior.log_density(&proposal)?;
        if prop_density == f64::NEG_INFINITY {
            // Zero target: certain rejection.
            return Ok(false);
        }

        let forward = proposal_logdensity(
            &proposal,
            &state.current,
            known,
            self.h1,
            self.h2,
            self.p,
        );
        let reverse = proposal_logdensity(
            &state.current,
            &proposal,
            known,
            self.h1,
            self.h2,
            self.p,
        );
        let log_ratio = (prop_density + reverse) - (state.log_density + forward);
        let u: f64 = rng.gen();
        if libm::log(u) < log_ratio {
            state.current = proposal;
            state.log_density = prop_density;
            Ok(true)
        } else {
            Ok(false)
        }
    }
}

/// Run a full chain: burn-in, thinning, overall acceptance rate.
/// Reproducible given `config.seed`. `min_distance` carries the
/// inhibitory-design constraint into the posterior, as in
/// [`crate::quadrature::predict_single`].
pub fn run_chain(
    data: &SpatialDataset,
    params: ModelParams,
    prior: &LocationPrior,
    min_distance: Option<f64>,
    config: &McmcConfig,
) -> Result<McmcRun> {
    if data.n_orphans() == 0 {
        return Err(invalid("dataset has no orphan values to locate"));
    }
    config.validate(data.n_orphans())?;
    let posterior = Posterior::new(data, params, prior, min_distance)?;
    let sampler = Sampler::new(posterior, config.h1, config.h2, config.p)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init = match &config.init {
        Some(init) => init.clone(),
        None => {
            let known = data.known_locations();
            (0..data.n_orphans())
                .map(|_| known[rng.gen_range(0..known.len())])
                .collect()
        }
    };
    let mut state = sampler.init_state(init)?;

    let mut samples = Vec::with_capacity(config.retained());
    let mut accepted = 0usize;
    for t in 1..=config.iterations {
        if sampler.step(&mut state, &mut rng)? {
            accepted += 1;
        }
        if t > config.burn_in && (t - config.burn_in) % config.thin == 0 {
            samples.push(state.current.clone());
        }
    }

    Ok(McmcRun {
        samples,
        acceptance_rate: accepted as f64 / config.iterations as f64,
        config: config.clone(),
    })
}

/// Sample autocorrelations of `series` at lags `1..=max_lag`, mean-centered
/// and normalized by the lag-0 variance.
pub fn autocorrelogram(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag == 0 {
        return Err(invalid("max_lag must be at least 1"));
    }
    if series.len() <= max_lag {
        return Err(invalid("series must be longer than max_lag"));
    }
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let var: f64 = centered.iter().map(|c| c * c).sum();
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((1..=max_lag)
        .map(|k| {
            let cov: f64 = (0..n - k).map(|t| centered[t] * centered[t + k]).sum();
            cov / var
        })
        .collect())
}
