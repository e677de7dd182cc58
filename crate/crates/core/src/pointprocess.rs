//! Samplers for survey designs: uniform (homogeneous Poisson given n),
//! intensity-weighted (inhomogeneous Poisson given n), and simple sequential
//! inhibition on a lattice.
//!
//! Every sampler is driven by an explicit seed and is reproducible: the same
//! seed gives the same output. Sample sizes are fixed by the caller; none of
//! these simulate a random Poisson count.

use crate::error::{invalid, Error};
use crate::geom::{Point, Rect};
use crate::grid::Grid;
use crate::prior::IntensityRaster;
use crate::Result;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Configuration for simple sequential inhibition.
///
/// Points are drawn one at a time from a regular lattice, each uniform over
/// the lattice sites at distance at least `delta` from everything placed so
/// far. `delta = 0` degenerates to uniform sampling of lattice sites without
/// replacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsiConfig {
    pub n: usize,
    pub delta: f64,
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl SsiConfig {
    /// `n` points with minimum distance `delta` on the default 100x100
    /// lattice over the unit square.
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        Self::with_lattice(n, delta, Rect::unit_square(), 100, 100)
    }

    pub fn with_lattice(n: usize, delta: f64, rect: Rect, nx: usize, ny: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("SSI needs a target count of at least 1"));
        }
        if !(delta >= 0.0) {
            return Err(invalid("delta must be >= 0"));
        }
        Grid::new(rect, nx, ny)?;
        Ok(SsiConfig {
            n,
            delta,
            rect,
            nx,
            ny,
        })
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_in(rng: &mut impl Rng, rect: &Rect) -> Point {
    // Explicit affine form so zero-area rectangles collapse to their corner.
    Point {
        x: rect.xmin + rng.gen::<f64>() * rect.width(),
        y: rect.ymin + rng.gen::<f64>() * rect.height(),
    }
}

/// `n` independent uniform draws on `rect`.
pub fn sample_uniform(n: usize, rect: Rect, seed: u64) -> Vec<Point> {
    let mut rng = rng_for(seed);
    (0..n).map(|_| uniform_in(&mut rng, &rect)).collect()
}

/// `n` draws from the point process with the raster's intensity, conditioned
/// on the count: a cell is chosen with probability proportional to its
/// intensity (cells share one area), then the point is uniform within the
/// cell. Rasters are non-negative and not identically zero by construction.
pub fn sample_intensity(n: usize, raster: &IntensityRaster, seed: u64) -> Vec<Point> {
    let grid = raster.grid();
    let mut cum = Vec::with_capacity(grid.len());
    let mut total = 0.0;
    for v in raster.values() {
        total += v;
        cum.push(total);
    }

    let mut rng = rng_for(seed);
    (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            let cell = cum.partition_point(|c| *c <= u).min(grid.len() - 1);
            let (ix, iy) = grid.coords_of(cell);
            let r = grid.rect();
            let cell_rect = Rect {
                xmin: r.xmin + ix as f64 * grid.dx(),
                xmax: r.xmin + (ix + 1) as f64 * grid.dx(),
                ymin: r.ymin + iy as f64 * grid.dy(),
                ymax: r.ymin + (iy + 1) as f64 * grid.dy(),
            };
            uniform_in(&mut rng, &cell_rect)
        })
        .collect()
}

/// Simple sequential inhibition on the configured lattice. Fails with
/// [`Error::PackingInfeasible`] if the admissible set empties before `n`
/// points are placed.
pub fn sample_ssi(config: &SsiConfig, seed: u64) -> Result<Vec<Point>> {
    let grid = Grid::new(config.rect, config.nx, config.ny)?;
    let nodes = grid.nodes();
    let mut alive: Vec<usize> = (0..nodes.len()).collect();
    let mut placed: Vec<Point> = Vec::with_capacity(config.n);
    let mut rng = rng_for(seed);

    while placed.len() < config.n {
        if alive.is_empty() {
            return Err(Error::PackingInfeasible {
                placed: placed.len(),
                requested: config.n,
            });
        }
        let pick = rng.gen_range(0..alive.len());
        let chosen = alive[pick];
        let p = nodes[chosen];
        placed.push(p);
        // Lattice sites are used at most once even when delta = 0.
        alive.retain(|&j| j != chosen && nodes[j].distance(&p) >= config.delta);
    }

    for i in 0..placed.len() {
        for j in (i + 1)..placed.len() {
            assert!(
                placed[i].distance(&placed[j]) >= config.delta,
                "SSI produced a pair closer than delta"
            );
        }
    }
    Ok(placed)
}

/// Log of the inhibitory prior term for candidate missing locations under a
/// design with minimum permissible distance `delta`: 0 (uniform over the
/// admissible set, up to a constant) when every candidate keeps distance
/// `delta` from all known locations and from the other candidates, `-inf`
/// otherwise.
pub fn ssi_conditional_logdensity(x_star: &[Point], known: &[Point], delta: f64) -> f64 {
    for (i, a) in x_star.iter().enumerate() {
        if known.iter().any(|k| a.distance(k) < delta) {
            return f64::NEG_INFINITY;
        }
        if x_star[(i + 1)..].iter().any(|b| a.distance(b) < delta) {
            return f64::NEG_INFINITY;
        }
    }
    0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn uniform_stays_in_rect() {
        let pts = sample_uniform(201, Rect::unit_square(), 7);
        assert_eq!(pts.len(), 201);
        assert!(pts.iter().all(|p| Rect::unit_square().contains(p)));
    }

    #[test]
    fn uniform_degenerate_rect_collapses() {
        let corner = Rect::new(0.25, 0.25, 0.75, 0.75).unwrap();
        let pts = sample_uniform(1, corner, 3);
        assert_eq!(pts[0], Point::new(0.25, 0.75));
    }

    #[test]
    fn uniform_quadrant_counts_within_binomial_band() {
        let n = 10_000usize;
        let pts = sample_uniform(n, Rect::unit_square(), 11);
        let mut counts = [0usize; 4];
        for p in &pts {
            let q = (p.x >= 0.5) as usize + 2 * ((p.y >= 0.5) as usize);
            counts[q] += 1;
        }
        // 99% band: 2500 +/- 4 sqrt(2500 * 0.75)
        let half_width = 4.0 * (2500.0f64 * 0.75).sqrt();
        for c in counts {
            assert!(
                (c as f64 - 2500.0).abs() <= half_width,
                "quadrant count {c} outside band"
            );
        }
    }

    #[test]
    fn samplers_are_reproducible() {
        assert_eq!(
            sample_uniform(50, Rect::unit_square(), 42),
            sample_uniform(50, Rect::unit_square(), 42)
        );
        let cfg = SsiConfig::new(40, 0.05).unwrap();
        assert_eq!(sample_ssi(&cfg, 9).unwrap(), sample_ssi(&cfg, 9).unwrap());
    }

    fn two_cell_raster(a: f64, b: f64) -> IntensityRaster {
        let grid = Grid::new(Rect::unit_square(), 2, 1).unwrap();
        IntensityRaster::new(grid, vec![a, b]).unwrap()
    }

    #[test]
    fn intensity_point_mass_cell() {
        let raster = two_cell_raster(0.0, 1.0);
        let pts = sample_intensity(500, &raster, 5);
        assert!(pts.iter().all(|p| p.x >= 0.5));
    }

    #[test]
    fn intensity_three_to_one_ratio() {
        let n = 10_000usize;
        let raster = two_cell_raster(3.0, 1.0);
        let pts = sample_intensity(n, &raster, 13);
        let left = pts.iter().filter(|p| p.x < 0.5).count();
        // Binomial(10^4, 0.75): sd ~ 43; allow ~4.6 sd.
        assert!(
            (left as f64 - 7500.0).abs() < 200.0,
            "left-cell count {left}"
        );
    }

    #[test]
    fn constant_intensity_matches_uniform_distribution() {
        // Two-sample chi-square on a 4x4 binning; critical value for
        // p = 0.001 at 15 degrees of freedom is 37.697.
        let n = 10_000usize;
        let grid = Grid::new(Rect::unit_square(), 5, 5).unwrap();
        let raster = IntensityRaster::new(grid, vec![2.0; 25]).unwrap();
        let a = sample_intensity(n, &raster, 17);
        let b = sample_uniform(n, Rect::unit_square(), 18);
        let bin = Grid::new(Rect::unit_square(), 4, 4).unwrap();
        let mut ca = [0.0f64; 16];
        let mut cb = [0.0f64; 16];
        for p in &a {
            ca[bin.cell_containing(p).unwrap()] += 1.0;
        }
        for p in &b {
            cb[bin.cell_containing(p).unwrap()] += 1.0;
        }
        let chi2: f64 = ca
            .iter()
            .zip(&cb)
            .map(|(x, y)| (x - y) * (x - y) / (x + y))
            .sum();
        assert!(chi2 < 37.697, "chi-square statistic {chi2}");
    }

    #[test]
    fn ssi_respects_minimum_distance() {
        let cfg = SsiConfig::new(201, 0.04).unwrap();
        let pts = sample_ssi(&cfg, 21).unwrap();
        assert_eq!(pts.len(), 201);
        let mut min = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                min = min.min(pts[i].distance(&pts[j]));
            }
        }
        assert!(min >= 0.04, "min pairwise distance {min}");
    }

    #[test]
    fn ssi_zero_delta_samples_without_replacement() {
        let cfg = SsiConfig::with_lattice(25, 0.0, Rect::unit_square(), 5, 5).unwrap();
        let pts = sample_ssi(&cfg, 2).unwrap();
        assert_eq!(pts.len(), 25);
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                assert!(pts[i] != pts[j]);
            }
        }
    }

    #[test]
    fn ssi_infeasible_packing_reports_progress() {
        let cfg = SsiConfig::new(2, 1.5).unwrap();
        match sample_ssi(&cfg, 1) {
            Err(Error::PackingInfeasible { placed, requested }) => {
                assert_eq!((placed, requested), (1, 2));
            }
            other => panic!("expected packing error, got {other:?}"),
        }
    }

    #[test]
    fn inhibition_density_violation_and_admissible() {
        let known = [Point::new(0.5, 0.5)];
        let delta = 0.1;
        let too_close = [Point::new(0.5 + delta / 2.0, 0.5)];
        assert_eq!(
            ssi_conditional_logdensity(&too_close, &known, delta),
            f64::NEG_INFINITY
        );
        let fine = [Point::new(0.5 + 2.0 * delta, 0.5)];
        assert_eq!(ssi_conditional_logdensity(&fine, &known, delta), 0.0);
    }

    #[test]
    fn inhibition_applies_between_candidates() {
        let known: [Point; 0] = [];
        let pair = [Point::new(0.2, 0.2), Point::new(0.2, 0.25)];
        assert_eq!(
            ssi_conditional_logdensity(&pair, &known, 0.1),
            f64::NEG_INFINITY
        );
        assert_eq!(ssi_conditional_logdensity(&pair, &known, 0.01), 0.0);
    }

    #[test]
    fn inhibition_grid_scan_matches_exhaustive_check() {
        let known = [
            Point::new(0.2, 0.3),
            Point::new(0.7, 0.8),
            Point::new(0.5, 0.1),
        ];
        let delta = 0.15;
        let grid = Grid::new(Rect::unit_square(), 20, 20).unwrap();
        for i in 0..grid.len() {
            let node = grid.node(i);
            let admissible = known.iter().all(|k| {
                let dx = node.x - k.x;
                let dy = node.y - k.y;
                (dx * dx + dy * dy) >= delta * delta
            });
            let got = ssi_conditional_logdensity(&[node], &known, delta);
            assert_eq!(got == 0.0, admissible, "node {node:?}");
        }
    }
}
