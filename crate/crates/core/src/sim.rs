//! Simulation of measurement vectors at given locations.

use crate::error::invalid;
use crate::geom::Point;
use crate::linalg::Cholesky;
use crate::model::ModelParams;
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// One exact draw of the measurement vector at `locations`: mean `mu`,
/// covariance from [`ModelParams::covariance`], via the triangular factor
/// applied to i.i.d. standard normals. Deterministic given `seed`.
pub fn simulate_measurements(
    locations: &[Point],
    params: &ModelParams,
    seed: u64,
) -> Result<Vec<f64>> {
    if locations.is_empty() {
        return Err(invalid("need at least one location to simulate"));
    }
    if locations.iter().any(|p| !p.is_finite()) {
        return Err(invalid("locations must be finite"));
    }
    let n = locations.len();
    if params.sill() == 0.0 {
        // No process variance and no noise: the deterministic limit.
        return Ok(vec![params.mu; n]);
    }
    let cov = params.covariance(locations);
    let chol = Cholesky::new(&cov, params.sill())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let colored = chol.lower_times(&z);
    Ok(colored.iter().map(|s| params.mu + s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::pointprocess::sample_uniform;

    #[test]
    fn zero_variance_model_is_deterministic() {
        let params = ModelParams::exponential(2.5, 0.0, 0.0, 0.1).unwrap();
        let locs = sample_uniform(8, Rect::unit_square(), 1);
        let y = simulate_measurements(&locs, &params, 99).unwrap();
        assert!(y.iter().all(|v| *v == 2.5));
    }

    #[test]
    fn same_seed_same_draw() {
        let params = ModelParams::exponential(0.0, 1.0, 0.1, 0.1).unwrap();
        let locs = sample_uniform(20, Rect::unit_square(), 2);
        assert_eq!(
            simulate_measurements(&locs, &params, 7).unwrap(),
            simulate_measurements(&locs, &params, 7).unwrap()
        );
    }

    #[test]
    fn sample_mean_within_three_sd_band() {
        // The first simulated-data configuration: 201 uniform locations,
        // mu = 0, sigma2 = 1, tau2 = 0.1, phi = 0.1, exponential.
        let params = ModelParams::exponential(0.0, 1.0, 0.1, 0.1).unwrap();
        let locs = sample_uniform(201, Rect::unit_square(), 31);
        let y = simulate_measurements(&locs, &params, 32).unwrap();
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let cov = params.covariance(&locs);
        let total: f64 = (0..locs.len())
            .map(|i| (0..locs.len()).map(|j| cov.get(i, j)).sum::<f64>())
            .sum();
        // Var(mean) = (1' Sigma 1) / n^2
        let band = 3.0 * (total / (n * n)).sqrt();
        assert!(mean.abs() < band, "sample mean {mean}, band {band}");
    }

    #[test]
    fn replicate_covariance_matches_model() {
        // Four nearby points so every covariance entry is well away from 0.
        let locs = [
            Point::new(0.50, 0.50),
            Point::new(0.55, 0.50),
            Point::new(0.50, 0.56),
            Point::new(0.57, 0.55),
        ];
        let params = ModelParams::exponential(0.3, 1.0, 0.1, 0.5).unwrap();
        let reps = 5000usize;
        let mut draws = Vec::with_capacity(reps);
        for r in 0..reps {
            draws.push(simulate_measurements(&locs, &params, 1000 + r as u64).unwrap());
        }
        let mean: Vec<f64> = (0..4)
            .map(|i| draws.iter().map(|d| d[i]).sum::<f64>() / reps as f64)
            .collect();
        let cov_model = params.covariance(&locs);
        for i in 0..4 {
            for j in 0..4 {
                let s: f64 = draws
                    .iter()
                    .map(|d| (d[i] - mean[i]) * (d[j] - mean[j]))
                    .sum::<f64>()
                    / (reps - 1) as f64;
                let expect = cov_model.get(i, j);
                assert!(
                    ((s - expect) / expect).abs() < 0.05,
                    "entry ({i},{j}): sample {s}, model {expect}"
                );
            }
        }
    }

    #[test]
    fn single_location_variance() {
        let params = ModelParams::exponential(0.0, 0.7, 0.3, 0.2).unwrap();
        let loc = [Point::new(0.4, 0.6)];
        let reps = 10_000usize;
        let vals: Vec<f64> = (0..reps)
            .map(|r| simulate_measurements(&loc, &params, r as u64).unwrap()[0])
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (reps - 1) as f64;
        let sill = params.sill();
        assert!((var - sill).abs() < 0.1 * sill, "variance {var}");
    }
}
