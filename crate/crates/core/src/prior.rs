//! Priors for where sampling locations tend to be.
//!
//! Three variants: non-informative uniform on a rectangle, a Gaussian kernel
//! density estimate built from observed locations, and a piecewise-constant
//! intensity raster (for designs driven by covariates such as population
//! density). Priors for several missing locations factorize componentwise;
//! inhibitory designs add a separate admissibility term supplied by
//! [`crate::pointprocess`].

use crate::error::invalid;
use crate::geom::{Point, Rect};
use crate::grid::Grid;
use crate::math::LN_TWO_PI;
use crate::Result;
use alloc::vec::Vec;

/// A symmetric positive-definite 2x2 smoothing matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth {
    h11: f64,
    h12: f64,
    h22: f64,
    // cached inverse and log determinant
    inv11: f64,
    inv12: f64,
    inv22: f64,
    log_det: f64,
}

impl Bandwidth {
    pub fn new(h11: f64, h12: f64, h22: f64) -> Result<Self> {
        if !(h11.is_finite() && h12.is_finite() && h22.is_finite()) {
            return Err(invalid("bandwidth entries must be finite"));
        }
        let det = h11 * h22 - h12 * h12;
        if h11 <= 0.0 || h22 <= 0.0 || det <= 0.0 {
            return Err(invalid(
                "bandwidth matrix must be symmetric positive definite; \
                 supply an explicit bandwidth for degenerate point sets",
            ));
        }
        Ok(Bandwidth {
            h11,
            h12,
            h22,
            inv11: h22 / det,
            inv12: -h12 / det,
            inv22: h11 / det,
            log_det: libm::log(det),
        })
    }

    /// Isotropic bandwidth `h2 * I`.
    pub fn isotropic(h2: f64) -> Result<Self> {
        Self::new(h2, 0.0, h2)
    }

    pub fn entries(&self) -> (f64, f64, f64) {
        (self.h11, self.h12, self.h22)
    }

    /// Largest diagonal entry (a variance).
    pub fn max_diagonal(&self) -> f64 {
        self.h11.max(self.h22)
    }

    fn quad_form(&self, dx: f64, dy: f64) -> f64 {
        self.inv11 * dx * dx + 2.0 * self.inv12 * dx * dy + self.inv22 * dy * dy
    }

    /// Log of the bivariate Gaussian kernel density at displacement `(dx, dy)`.
    fn log_kernel(&self, dx: f64, dy: f64) -> f64 {
        -LN_TWO_PI - 0.5 * self.log_det - 0.5 * self.quad_form(dx, dy)
    }
}

/// Plug-in bandwidth `H = n^{-1/6} V`, with `V` the sample covariance matrix
/// of the points. Optimal under a bivariate-Gaussian reference; needs at
/// least 3 non-collinear points.
pub fn plugin_bandwidth(points: &[Point]) -> Result<Bandwidth> {
    let n = points.len();
    if n < 3 {
        return Err(invalid("plug-in bandwidth needs at least 3 points"));
    }
    let nf = n as f64;
    let (mut mx, mut my) = (0.0, 0.0);
    for p in points {
        if !p.is_finite() {
            return Err(invalid("non-finite point in bandwidth input"));
        }
        mx += p.x;
        my += p.y;
    }
    mx /= nf;
    my /= nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
        syy += (p.y - my) * (p.y - my);
    }
    let scale = libm::pow(nf, -1.0 / 6.0) / (nf - 1.0);
    Bandwidth::new(sxx * scale, sxy * scale, syy * scale)
}

/// Gaussian kernel density estimate over observed locations.
#[derive(Debug, Clone, PartialEq)]
pub struct KdePrior {
    points: Vec<Point>,
    bandwidth: Bandwidth,
}

impl KdePrior {
    pub fn new(points: Vec<Point>, bandwidth: Bandwidth) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("KDE prior needs at least one point"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(invalid("non-finite point in KDE input"));
        }
        Ok(KdePrior { points, bandwidth })
    }

    /// Build from points with the plug-in bandwidth.
    pub fn with_plugin_bandwidth(points: Vec<Point>) -> Result<Self> {
        let bandwidth = plugin_bandwidth(&points)?;
        Self::new(points, bandwidth)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn bandwidth(&self) -> &Bandwidth {
        &self.bandwidth
    }

    /// Log density at `x`, accumulated in log space so that points far from
    /// every kernel stay meaningful instead of underflowing.
    pub fn log_density(&self, x: &Point) -> f64 {
        let mut max = f64::NEG_INFINITY;
        let mut terms: Vec<f64> = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let t = self.bandwidth.log_kernel(x.x - p.x, x.y - p.y);
            if t > max {
                max = t;
            }
            terms.push(t);
        }
        if max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let sum: f64 = terms.iter().map(|t| libm::exp(t - max)).sum();
        max + libm::log(sum) - libm::log(self.points.len() as f64)
    }
}

/// Non-negative sampling intensity, piecewise constant over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityRaster {
    grid: Grid,
    values: Vec<f64>,
}

impl IntensityRaster {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(alloc::format!(
                "raster has {} values for a {}-cell grid",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("intensity values must be finite and >= 0"));
        }
        if values.iter().all(|v| *v == 0.0) {
            return Err(invalid("intensity raster is identically zero"));
        }
        Ok(IntensityRaster { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Unnormalized log intensity at `x`; normalization over the grid is the
    /// caller's concern.
    pub fn log_intensity(&self, x: &Point) -> f64 {
        match self.grid.cell_containing(x) {
            Some(i) if self.values[i] > 0.0 => libm::log(self.values[i]),
            _ => f64::NEG_INFINITY,
        }
    }
}

/// A grid of covariate vectors `d(x)`, `dims` values per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateRaster {
    grid: Grid,
    dims: usize,
    /// Cell-major: `values[cell * dims + k]`.
    values: Vec<f64>,
}

impl CovariateRaster {
    pub fn new(grid: Grid, dims: usize, values: Vec<f64>) -> Result<Self> {
        if dims == 0 {
            return Err(invalid("covariate raster needs at least one covariate"));
        }
        if values.len() != grid.len() * dims {
            return Err(invalid(alloc::format!(
                "covariate raster has {} values, expected {} cells x {} covariates",
                values.len(),
                grid.len(),
                dims
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("covariate values must be finite"));
        }
        Ok(CovariateRaster { grid, dims, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        &self.values[i * self.dims..(i + 1) * self.dims]
    }
}

/// Linear intensity `lambda(x) = d(x) . beta` over the covariate grid.
/// Every cell must come out non-negative; offending cells are reported.
pub fn intensity_from_covariates(
    raster: &CovariateRaster,
    beta: &[f64],
) -> Result<IntensityRaster> {
    if beta.len() != raster.dims() {
        return Err(invalid(alloc::format!(
            "beta has {} coefficients for {} covariates",
            beta.len(),
            raster.dims()
        )));
    }
    let mut values = Vec::with_capacity(raster.grid().len());
    let mut negative: Vec<usize> = Vec::new();
    for i in 0..raster.grid().len() {
        let lambda: f64 = raster.cell(i).iter().zip(beta).map(|(d, b)| d * b).sum();
        if lambda < 0.0 {
            negative.push(i);
        }
        values.push(lambda);
    }
    if !negative.is_empty() {
        let shown: Vec<_> = negative.iter().take(8).collect();
        return Err(invalid(alloc::format!(
            "intensity is negative in {} cells (first offenders: {:?})",
            negative.len(),
            shown
        )));
    }
    IntensityRaster::new(*raster.grid(), values)
}

/// Prior on a single missing location.
#[derive(Debug, Clone, PartialEq)]
pub enum LocationPrior {
    /// Uniform over a rectangle; density `1 / area` inside, zero outside.
    UniformRect(Rect),
    Kde(KdePrior),
    /// Unnormalized piecewise-constant intensity.
    Intensity(IntensityRaster),
}

impl LocationPrior {
    /// Log prior density at `x`; `-inf` outside the support. The intensity
    /// variant is unnormalized.
    pub fn log_density(&self, x: &Point) -> f64 {
        match self {
            LocationPrior::UniformRect(rect) => {
                if rect.contains(x) {
                    -libm::log(rect.area())
                } else {
                    f64::NEG_INFINITY
                }
            }
            LocationPrior::Kde(kde) => kde.log_density(x),
            LocationPrior::Intensity(raster) => raster.log_intensity(x),
        }
    }
}

/// Free-function form of [`LocationPrior::log_density`].
pub fn prior_logdensity(x: &Point, prior: &LocationPrior) -> f64 {
    prior.log_density(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn uniform_rect_unit_square() {
        let prior = LocationPrior::UniformRect(Rect::unit_square());
        assert_eq!(prior.log_density(&Point::new(0.5, 0.5)), 0.0);
        assert_eq!(prior.log_density(&Point::new(2.0, 2.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn uniform_rect_normalizes_by_area() {
        let rect = Rect::new(0.0, 2.0, 0.0, 4.0).unwrap();
        let prior = LocationPrior::UniformRect(rect);
        assert!((prior.log_density(&Point::new(1.0, 1.0)) - (-8.0f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn kde_single_point_peak() {
        let kde = KdePrior::new(
            vec![Point::new(0.3, -0.2)],
            Bandwidth::isotropic(1.0).unwrap(),
        )
        .unwrap();
        // Bivariate standard Gaussian at its center: 1 / (2 pi).
        let got = kde.log_density(&Point::new(0.3, -0.2));
        assert!((got - (-LN_TWO_PI)).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn kde_matches_term_by_term_sum() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.5),
            Point::new(-0.4, 2.0),
        ];
        let bw = Bandwidth::new(0.8, 0.2, 1.1).unwrap();
        let kde = KdePrior::new(pts.clone(), bw).unwrap();

        let (h11, h12, h22) = bw.entries();
        let det = h11 * h22 - h12 * h12;
        for x in [Point::new(0.2, 0.3), Point::new(-1.0, 1.5), Point::new(4.0, -3.0)] {
            let mut direct = 0.0;
            for p in &pts {
                let (dx, dy) = (x.x - p.x, x.y - p.y);
                let q = (h22 * dx * dx - 2.0 * h12 * dx * dy + h11 * dy * dy) / det;
                direct += (-0.5 * q).exp() / (2.0 * core::f64::consts::PI * det.sqrt());
            }
            direct /= pts.len() as f64;
            let got = kde.log_density(&x);
            assert!(
                (got - direct.ln()).abs() < 1e-12,
                "at {x:?}: {got} vs {}",
                direct.ln()
            );
        }
    }

    #[test]
    fn plugin_bandwidth_sixty_four_points_unit_covariance() {
        // 16 copies of each diagonal corner scaled so the sample covariance
        // is exactly the identity; 64^{-1/6} = 1/2.
        let c = (63.0f64 / 64.0).sqrt();
        let mut pts = Vec::new();
        for _ in 0..16 {
            pts.push(Point::new(c, c));
            pts.push(Point::new(-c, -c));
            pts.push(Point::new(c, -c));
            pts.push(Point::new(-c, c));
        }
        let h = plugin_bandwidth(&pts).unwrap();
        let (h11, h12, h22) = h.entries();
        assert!((h11 - 0.5).abs() < 1e-12);
        assert!((h22 - 0.5).abs() < 1e-12);
        assert!(h12.abs() < 1e-12);
    }

    #[test]
    fn plugin_bandwidth_degenerate_inputs() {
        assert!(plugin_bandwidth(&[Point::new(0.0, 0.0)]).is_err());
        assert!(plugin_bandwidth(&[Point::new(0.0, 0.0), Point::new(1.0, 1.0)]).is_err());
        // collinear
        let line: Vec<Point> = (0..10).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
        assert!(plugin_bandwidth(&line).is_err());
    }

    #[test]
    fn intensity_constant_covariate() {
        let grid = Grid::new(Rect::unit_square(), 4, 4).unwrap();
        let cov = CovariateRaster::new(grid, 1, vec![1.0; 16]).unwrap();
        let raster = intensity_from_covariates(&cov, &[3.5]).unwrap();
        assert!(raster.values().iter().all(|v| (*v - 3.5).abs() < 1e-15));
    }

    #[test]
    fn intensity_identity_pass_through() {
        let grid = Grid::new(Rect::unit_square(), 2, 2).unwrap();
        // d(x) = (1, population(x)), beta = (0, 1)
        let pop = [5.0, 1.0, 0.0, 2.5];
        let mut vals = Vec::new();
        for p in pop {
            vals.push(1.0);
            vals.push(p);
        }
        let cov = CovariateRaster::new(grid, 2, vals).unwrap();
        let raster = intensity_from_covariates(&cov, &[0.0, 1.0]).unwrap();
        assert_eq!(raster.values(), &pop);
    }

    #[test]
    fn intensity_dot_product_per_cell() {
        let grid = Grid::new(Rect::unit_square(), 3, 2).unwrap();
        let mut vals = Vec::new();
        for i in 0..6 {
            vals.push(1.0 + i as f64);
            vals.push(0.5 * i as f64);
        }
        let cov = CovariateRaster::new(grid, 2, vals).unwrap();
        let beta = [2.0, 3.0];
        let raster = intensity_from_covariates(&cov, &beta).unwrap();
        for i in 0..6 {
            let expect = (1.0 + i as f64) * 2.0 + (0.5 * i as f64) * 3.0;
            assert!((raster.values()[i] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn intensity_negative_cells_reported() {
        let grid = Grid::new(Rect::unit_square(), 2, 1).unwrap();
        let cov = CovariateRaster::new(grid, 1, vec![1.0, -2.0]).unwrap();
        let err = intensity_from_covariates(&cov, &[1.0]).unwrap_err();
        let msg = alloc::format!("{err}");
        assert!(msg.contains("negative"), "message: {msg}");
    }

    #[test]
    fn intensity_prior_support() {
        let grid = Grid::new(Rect::unit_square(), 2, 1).unwrap();
        let raster = IntensityRaster::new(grid, vec![0.0, 4.0]).unwrap();
        let prior = LocationPrior::Intensity(raster);
        assert_eq!(prior.log_density(&Point::new(0.25, 0.5)), f64::NEG_INFINITY);
        assert!((prior.log_density(&Point::new(0.75, 0.5)) - 4.0f64.ln()).abs() < 1e-15);
        assert_eq!(prior.log_density(&Point::new(1.5, 0.5)), f64::NEG_INFINITY);
    }

    #[test]
    fn all_zero_intensity_rejected() {
        let grid = Grid::new(Rect::unit_square(), 2, 1).unwrap();
        assert!(IntensityRaster::new(grid, vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn kde_integrates_to_one_on_covering_grid() {
        // Deterministic scattered points.
        let pts: Vec<Point> = (0..25)
            .map(|i| {
                let t = i as f64;
                Point::new((t * 0.37).sin() * 2.0, (t * 0.61).sin() * 1.5)
            })
            .collect();
        let kde = KdePrior::with_plugin_bandwidth(pts.clone()).unwrap();
        let margin = 5.0 * kde.bandwidth().max_diagonal().sqrt();
        let bounds = Rect::bounding(&pts).unwrap();
        let rect = Rect::new(
            bounds.xmin - margin,
            bounds.xmax + margin,
            bounds.ymin - margin,
            bounds.ymax + margin,
        )
        .unwrap();
        let grid = Grid::new(rect, 200, 200).unwrap();
        let mass: f64 = (0..grid.len())
            .map(|i| kde.log_density(&grid.node(i)).exp() * grid.cell_area())
            .sum();
        assert!((mass - 1.0).abs() < 0.02, "mass {mass}");
    }
}
