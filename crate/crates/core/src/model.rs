//! The Gaussian measurement model.
//!
//! Measurements follow `Y_i = mu + S(x_i) + Z_i` where `S` is a zero-mean
//! stationary isotropic Gaussian process with variance `sigma2` and an
//! exponential or Matern correlation function, and `Z_i` is independent
//! N(0, tau2) noise. This module assembles covariance matrices, evaluates
//! multivariate normal log densities, and computes the conditional density of
//! the measurements whose locations are unknown given the located ones -- the
//! likelihood factor both prediction engines share.

use crate::bessel::bessel_k;
use crate::error::invalid;
use crate::geom::{Point, Rect};
use crate::linalg::{dot, Cholesky, Matrix};
use crate::math::LN_TWO_PI;
use crate::Result;
use alloc::vec::Vec;

/// Isotropic correlation family of the latent process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationFamily {
    /// `rho(u) = exp(-u / phi)`.
    Exponential,
    /// Matern with scale `phi` and order `kappa`; `kappa = 1/2` recovers the
    /// exponential family.
    Matern,
}

/// Parameters of the measurement model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Constant mean level.
    pub mu: f64,
    /// Variance of the spatial process.
    pub sigma2: f64,
    /// Nugget (measurement noise) variance.
    pub tau2: f64,
    /// Correlation scale, in distance units.
    pub phi: f64,
    /// Matern order; ignored by the exponential family.
    pub kappa: f64,
    pub family: CorrelationFamily,
}

impl ModelParams {
    pub fn new(
        mu: f64,
        sigma2: f64,
        tau2: f64,
        phi: f64,
        kappa: f64,
        family: CorrelationFamily,
    ) -> Result<Self> {
        let p = ModelParams {
            mu,
            sigma2,
            tau2,
            phi,
            kappa,
            family,
        };
        p.validate()?;
        Ok(p)
    }

    /// Exponential-correlation model.
    pub fn exponential(mu: f64, sigma2: f64, tau2: f64, phi: f64) -> Result<Self> {
        Self::new(mu, sigma2, tau2, phi, 0.5, CorrelationFamily::Exponential)
    }

    /// Matern-correlation model.
    pub fn matern(mu: f64, sigma2: f64, tau2: f64, phi: f64, kappa: f64) -> Result<Self> {
        Self::new(mu, sigma2, tau2, phi, kappa, CorrelationFamily::Matern)
    }

    fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite()
            && self.sigma2.is_finite()
            && self.tau2.is_finite()
            && self.phi.is_finite()
            && self.kappa.is_finite())
        {
            return Err(invalid("model parameters must be finite"));
        }
        if self.sigma2 < 0.0 {
            return Err(invalid("sigma2 must be >= 0"));
        }
        if self.tau2 < 0.0 {
            return Err(invalid("tau2 must be >= 0"));
        }
        if self.phi <= 0.0 {
            return Err(invalid("phi must be > 0"));
        }
        if self.kappa <= 0.0 {
            return Err(invalid("kappa must be > 0"));
        }
        Ok(())
    }

    /// Total variance of one measurement, `sigma2 + tau2` (the sill). Also
    /// the scale used for factorization jitter.
    pub fn sill(&self) -> f64 {
        self.sigma2 + self.tau2
    }

    /// Correlation at distance `u`. Checked variant of [`Self::corr`].
    pub fn correlation(&self, u: f64) -> Result<f64> {
        if !u.is_finite() || u < 0.0 {
            return Err(invalid("distance must be finite and non-negative"));
        }
        Ok(self.corr(u))
    }

    /// Correlation at distance `u >= 0`.
    #[inline]
    pub(crate) fn corr(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 1.0;
        }
        let x = u / self.phi;
        match self.family {
            CorrelationFamily::Exponential => libm::exp(-x),
            CorrelationFamily::Matern => {
                let k = self.kappa;
                libm::pow(x, k) * bessel_k(k, x) / (libm::pow(2.0, k - 1.0) * libm::tgamma(k))
            }
        }
    }

    /// Covariance matrix of measurements at `locations`: `sigma2 + tau2` on
    /// the diagonal, `sigma2 * rho(dist)` off it. Symmetric by construction;
    /// coincident locations with a zero nugget make it singular, which is the
    /// caller's concern.
    pub fn covariance(&self, locations: &[Point]) -> Matrix {
        let n = locations.len();
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.set(i, i, self.sill());
            for j in (i + 1)..n {
                let c = self.sigma2 * self.corr(locations[i].distance(&locations[j]));
                m.set(i, j, c);
                m.set(j, i, c);
            }
        }
        m
    }
}

/// Geostatistical measurements: located observations plus "orphan" values
/// whose coordinates are unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialDataset {
    known_locations: Vec<Point>,
    known_values: Vec<f64>,
    orphan_values: Vec<f64>,
    region: Rect,
}

impl SpatialDataset {
    pub fn new(
        known_locations: Vec<Point>,
        known_values: Vec<f64>,
        orphan_values: Vec<f64>,
        region: Rect,
    ) -> Result<Self> {
        if known_locations.is_empty() {
            return Err(invalid("at least one located observation is required"));
        }
        if known_locations.len() != known_values.len() {
            return Err(invalid(alloc::format!(
                "{} locations but {} values",
                known_locations.len(),
                known_values.len()
            )));
        }
        for (i, p) in known_locations.iter().enumerate() {
            if !p.is_finite() {
                return Err(invalid(alloc::format!("location {i} is not finite")));
            }
            if !region.contains(p) {
                return Err(invalid(alloc::format!(
                    "location {i} = ({}, {}) lies outside the region",
                    p.x,
                    p.y
                )));
            }
        }
        if known_values.iter().chain(&orphan_values).any(|v| !v.is_finite()) {
            return Err(invalid("measurement values must be finite"));
        }
        Ok(SpatialDataset {
            known_locations,
            known_values,
            orphan_values,
            region,
        })
    }

    pub fn known_locations(&self) -> &[Point] {
        &self.known_locations
    }

    pub fn known_values(&self) -> &[f64] {
        &self.known_values
    }

    pub fn orphan_values(&self) -> &[f64] {
        &self.orphan_values
    }

    pub fn region(&self) -> Rect {
        self.region
    }

    pub fn n_known(&self) -> usize {
        self.known_locations.len()
    }

    pub fn n_orphans(&self) -> usize {
        self.orphan_values.len()
    }
}

/// Multivariate normal log density of `y` under mean `mean` and covariance
/// `cov`, via Cholesky factorization (with the standard jitter fallback,
/// scaled by the mean diagonal of `cov`).
pub fn mvn_logdensity(y: &[f64], mean: &[f64], cov: &Matrix) -> Result<f64> {
    let n = y.len();
    if n == 0 || mean.len() != n || cov.n() != n {
        return Err(invalid("dimension mismatch in mvn_logdensity"));
    }
    let chol = Cholesky::new(cov, cov.mean_diagonal())?;
    let resid: Vec<f64> = y.iter().zip(mean).map(|(a, b)| a - b).collect();
    let z = chol.solve_lower(&resid);
    Ok(-0.5 * (n as f64 * LN_TWO_PI + chol.log_det() + dot(&z, &z)))
}

/// Conditional variances are floored here so that exact-interpolation points
/// (zero nugget at an observed site) stay evaluable.
const VARIANCE_FLOOR: f64 = 1e-12;

/// The conditional law of the orphan measurements given the located data,
/// as a function of candidate locations.
///
/// Factors the known-data covariance once; each evaluation then costs one
/// triangular solve per candidate location. Both the grid engine and the
/// Metropolis-Hastings engine keep one of these for the whole run.
#[derive(Debug, Clone)]
pub struct OrphanLikelihood<'a> {
    data: &'a SpatialDataset,
    params: ModelParams,
    chol_known: Cholesky,
    /// Sigma11^{-1} (y - mu), fixed across candidate locations.
    weights: Vec<f64>,
}

impl<'a> OrphanLikelihood<'a> {
    pub fn new(data: &'a SpatialDataset, params: ModelParams) -> Result<Self> {
        params.validate()?;
        let cov = params.covariance(data.known_locations());
        let chol_known = Cholesky::new(&cov, params.sill())?;
        let resid: Vec<f64> = data.known_values().iter().map(|y| y - params.mu).collect();
        let weights = chol_known.solve(&resid);
        Ok(OrphanLikelihood {
            data,
            params,
            chol_known,
            weights,
        })
    }

    pub fn data(&self) -> &'a SpatialDataset {
        self.data
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Conditional mean vector and covariance matrix of measurements taken at
    /// `x_star`, given the located data.
    pub fn conditional_moments(&self, x_star: &[Point]) -> (Vec<f64>, Matrix) {
        let n = self.data.n_known();
        let m = x_star.len();
        let known = self.data.known_locations();

        // Cross-covariance columns and their half-solves.
        let mut means = Vec::with_capacity(m);
        let mut half = Vec::with_capacity(m); // L^{-1} k_j
        for xs in x_star {
            let k: Vec<f64> = (0..n)
                .map(|i| self.params.sigma2 * self.params.corr(known[i].distance(xs)))
                .collect();
            means.push(self.params.mu + dot(&k, &self.weights));
            half.push(self.chol_known.solve_lower(&k));
        }

        let mut cov = Matrix::zeros(m);
        for j in 0..m {
            for l in j..m {
                let prior_cov = if l == j {
                    self.params.sill()
                } else {
                    self.params.sigma2 * self.params.corr(x_star[j].distance(&x_star[l]))
                };
                let c = prior_cov - dot(&half[j], &half[l]);
                cov.set(j, l, c);
                cov.set(l, j, c);
            }
        }
        for j in 0..m {
            if cov.get(j, j) < VARIANCE_FLOOR {
                cov.set(j, j, VARIANCE_FLOOR);
            }
        }
        (means, cov)
    }

    /// Log density of `y_star` under the conditional law at `x_star`.
    pub fn log_density(&self, x_star: &[Point], y_star: &[f64]) -> Result<f64> {
        if x_star.len() != y_star.len() || x_star.is_empty() {
            return Err(invalid("x_star and y_star must have equal, nonzero length"));
        }
        let (mean, cov) = self.conditional_moments(x_star);
        mvn_logdensity(y_star, &mean, &cov)
    }

    /// Log density of the dataset's own orphan values at candidate locations
    /// `x_star`.
    pub fn log_density_of_orphans(&self, x_star: &[Point]) -> Result<f64> {
        self.log_density(x_star, self.data.orphan_values())
    }
}

/// One-shot checked evaluation of the conditional orphan log density
/// `log pi(y_star | y_known, x_star)`. Candidate locations must lie inside
/// the dataset region. Loops should use [`OrphanLikelihood`] directly.
pub fn conditional_orphan_logdensity(
    y_star: &[f64],
    x_star: &[Point],
    data: &SpatialDataset,
    params: ModelParams,
) -> Result<f64> {
    for (i, p) in x_star.iter().enumerate() {
        if !p.is_finite() || !data.region().contains(p) {
            return Err(invalid(alloc::format!(
                "candidate location {i} lies outside the dataset region"
            )));
        }
    }
    OrphanLikelihood::new(data, params)?.log_density(x_star, y_star)
}
