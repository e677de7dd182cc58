//! The unnormalized posterior of the missing locations.
//!
//! Both prediction engines score a candidate location vector the same way:
//! componentwise log prior, plus an optional inhibitory admissibility term
//! when the survey design imposes a minimum distance, plus the conditional
//! log density of the orphan measurements. This module owns that sum.

use crate::geom::Point;
use crate::model::{ModelParams, OrphanLikelihood, SpatialDataset};
use crate::pointprocess::ssi_conditional_logdensity;
use crate::prior::LocationPrior;
use crate::Result;

/// Scoring context for candidate missing-location vectors, with the
/// known-data factorization cached for the lifetime of the analysis.
#[derive(Debug, Clone)]
pub struct Posterior<'a> {
    likelihood: OrphanLikelihood<'a>,
    prior: &'a LocationPrior,
    min_distance: Option<f64>,
}

impl<'a> Posterior<'a> {
    /// `min_distance` adds the inhibitory-design constraint: candidates
    /// closer than this to a known location (or to each other) get zero
    /// posterior density.
    pub fn new(
        data: &'a SpatialDataset,
        params: ModelParams,
        prior: &'a LocationPrior,
        min_distance: Option<f64>,
    ) -> Result<Self> {
        Ok(Posterior {
            likelihood: OrphanLikelihood::new(data, params)?,
            prior,
            min_distance,
        })
    }

    pub fn data(&self) -> &'a SpatialDataset {
        self.likelihood.data()
    }

    pub fn params(&self) -> &ModelParams {
        self.likelihood.params()
    }

    pub fn prior(&self) -> &LocationPrior {
        self.prior
    }

    pub fn min_distance(&self) -> Option<f64> {
        self.min_distance
    }

    /// Log prior of the candidate vector (componentwise product prior plus
    /// the inhibition term); `-inf` outside the support.
    pub fn log_prior(&self, x_star: &[Point]) -> f64 {
        let mut total = 0.0;
        for x in x_star {
            let lp = self.prior.log_density(x);
            if lp == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            total += lp;
        }
        if let Some(delta) = self.min_distance {
            total += ssi_conditional_logdensity(x_star, self.data().known_locations(), delta);
        }
        total
    }

    /// Unnormalized log posterior density at `x_star`; `-inf` outside the
    /// prior support. The likelihood factor is skipped entirely for
    /// unsupported candidates.
    pub fn log_density(&self, x_star: &[Point]) -> Result<f64> {
        let lp = self.log_prior(x_star);
        if lp == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(lp + self.likelihood.log_density_of_orphans(x_star)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::model::SpatialDataset;
    use alloc::vec;

    fn data() -> SpatialDataset {
        SpatialDataset::new(
            vec![Point::new(0.2, 0.2), Point::new(0.8, 0.7)],
            vec![1.0, -1.0],
            vec![0.5],
            Rect::unit_square(),
        )
        .unwrap()
    }

    #[test]
    fn outside_prior_support_is_neg_infinity() {
        let d = data();
        let params = ModelParams::exponential(0.0, 1.0, 0.1, 0.2).unwrap();
        let prior = LocationPrior::UniformRect(Rect::unit_square());
        let post = Posterior::new(&d, params, &prior, None).unwrap();
        let ld = post.log_density(&[Point::new(1.5, 0.5)]).unwrap();
        assert_eq!(ld, f64::NEG_INFINITY);
    }

    #[test]
    fn inhibition_zeroes_candidates_near_known_points() {
        let d = data();
        let params = ModelParams::exponential(0.0, 1.0, 0.1, 0.2).unwrap();
        let prior = LocationPrior::UniformRect(Rect::unit_square());
        let post = Posterior::new(&d, params, &prior, Some(0.1)).unwrap();
        let near = Point::new(0.21, 0.21);
        assert_eq!(post.log_density(&[near]).unwrap(), f64::NEG_INFINITY);
        let far = Point::new(0.5, 0.5);
        assert!(post.log_density(&[far]).unwrap().is_finite());
    }

    #[test]
    fn splits_into_prior_and_likelihood() {
        let d = data();
        let params = ModelParams::exponential(0.0, 1.0, 0.1, 0.2).unwrap();
        let rect = Rect::new(0.0, 2.0, 0.0, 1.0).unwrap();
        let prior = LocationPrior::UniformRect(rect);
        let post = Posterior::new(&d, params, &prior, None).unwrap();
        let x = [Point::new(0.4, 0.6)];
        let total = post.log_density(&x).unwrap();
        let lik = OrphanLikelihood::new(&d, params)
            .unwrap()
            .log_density_of_orphans(&x)
            .unwrap();
        assert!((total - (post.log_prior(&x) + lik)).abs() < 1e-14);
        assert!((post.log_prior(&x) - (-2.0f64.ln())).abs() < 1e-14);
    }
}
