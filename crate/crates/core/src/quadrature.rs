//! Exact-on-grid predictive distribution for a single missing location.
//!
//! With one orphan measurement the posterior over its location is a density
//! on the plane; evaluating the unnormalized log posterior at every node of a
//! regular grid and normalizing (in log space, with max subtraction) gives a
//! discrete field that is exact up to the grid resolution. Highest-density
//! regions and point summaries come straight off the field.

use crate::error::{invalid, Error};
use crate::geom::Point;
use crate::grid::Grid;
use crate::model::{ModelParams, SpatialDataset};
use crate::posterior::Posterior;
use crate::prior::LocationPrior;
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;

/// What a field was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProvenance {
    pub params: ModelParams,
    pub prior: LocationPrior,
    pub n_known: usize,
    pub orphan_values: Vec<f64>,
    pub min_distance: Option<f64>,
}

/// A normalized discrete density over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveField {
    grid: Grid,
    weights: Vec<f64>,
    provenance: Option<FieldProvenance>,
}

/// Point summaries of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSummary {
    pub mean: Point,
    /// Node of largest weight (first index on exact ties).
    pub mode: Point,
    /// Component-wise weighted median.
    pub median: Point,
}

impl PredictiveField {
    /// Normalize non-negative `weights` into a field. At least one weight
    /// must be positive.
    pub fn from_weights(grid: Grid, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(invalid("weight vector does not match grid size"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(invalid("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptySupport);
        }
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(PredictiveField {
            grid,
            weights,
            provenance: None,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Normalized weights in grid (row-major) order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn provenance(&self) -> Option<&FieldProvenance> {
        self.provenance.as_ref()
    }

    /// Indices of the discrete highest-density region of coverage
    /// `1 - alpha`: the smallest set of nodes, filled in decreasing weight
    /// order (ties by index), whose mass reaches `1 - alpha`.
    pub fn hdr(&self, alpha: f64) -> Result<Vec<usize>> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha must lie in (0, 1)"));
        }
        let mut order: Vec<usize> = (0..self.weights.len()).collect();
        order.sort_by(|&a, &b| {
            self.weights[b]
                .partial_cmp(&self.weights[a])
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let mut picked = Vec::new();
        let mut mass = 0.0;
        for i in order {
            if self.weights[i] <= 0.0 {
                break;
            }
            picked.push(i);
            mass += self.weights[i];
            if mass >= 1.0 - alpha {
                break;
            }
        }
        Ok(picked)
    }

    /// Mean, mode, and component-wise median of the field.
    pub fn summary(&self) -> FieldSummary {
        let (mut mx, mut my) = (0.0, 0.0);
        let mut mode_idx = 0usize;
        for (i, w) in self.weights.iter().enumerate() {
            let p = self.grid.node(i);
            mx += w * p.x;
            my += w * p.y;
            if *w > self.weights[mode_idx] {
                mode_idx = i;
            }
        }

        let median = Point {
            x: self.marginal_median(true),
            y: self.marginal_median(false),
        };
        FieldSummary {
            mean: Point::new(mx, my),
            mode: self.grid.node(mode_idx),
            median,
        }
    }

    /// 50% weighted quantile of one coordinate: the smallest node coordinate
    /// whose cumulative marginal mass reaches one half.
    fn marginal_median(&self, x_axis: bool) -> f64 {
        let bins = if x_axis { self.grid.nx() } else { self.grid.ny() };
        let mut marginal = vec![0.0; bins];
        for (i, w) in self.weights.iter().enumerate() {
            let (ix, iy) = self.grid.coords_of(i);
            marginal[if x_axis { ix } else { iy }] += w;
        }
        let mut cum = 0.0;
        for (b, m) in marginal.iter().enumerate() {
            cum += m;
            if cum >= 0.5 {
                let node = if x_axis {
                    self.grid.center(b, 0).x
                } else {
                    self.grid.center(0, b).y
                };
                return node;
            }
        }
        // Reachable only through accumulated rounding; fall back to the top bin.
        if x_axis {
            self.grid.center(bins - 1, 0).x
        } else {
            self.grid.center(0, bins - 1).y
        }
    }
}

/// Total-variation distance between two discrete distributions on the same
/// support: half the L1 distance.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Predictive field of the single missing location in `data`, evaluated on
/// `grid`. The grid must cover the dataset region; `min_distance` applies an
/// inhibitory-design constraint (see [`Posterior::new`]).
pub fn predict_single(
    data: &SpatialDataset,
    params: ModelParams,
    prior: &LocationPrior,
    min_distance: Option<f64>,
    grid: Grid,
) -> Result<PredictiveField> {
    if data.n_orphans() != 1 {
        return Err(invalid(alloc::format!(
            "grid prediction handles exactly one missing location; this dataset has {} \
             (use the MCMC engine for several)",
            data.n_orphans()
        )));
    }
    let region = data.region();
    let gr = grid.rect();
    if gr.xmin > region.xmin || gr.xmax < region.xmax || gr.ymin > region.ymin || gr.ymax < region.ymax
    {
        return Err(invalid("grid must cover the dataset region"));
    }
    let posterior = Posterior::new(data, params, prior, min_distance)?;

    let mut log_weights = Vec::with_capacity(grid.len());
    let mut max = f64::NEG_INFINITY;
    for i in 0..grid.len() {
        let lw = posterior.log_density(&[grid.node(i)])?;
        if lw > max {
            max = lw;
        }
        log_weights.push(lw);
    }
    if max == f64::NEG_INFINITY {
        return Err(Error::EmptySupport);
    }
    let unnormalized: Vec<f64> = log_weights.iter().map(|lw| libm::exp(lw - max)).collect();
    let mut field = PredictiveField::from_weights(grid, unnormalized)?;
    field.provenance = Some(FieldProvenance {
        params,
        prior: prior.clone(),
        n_known: data.n_known(),
        orphan_values: data.orphan_values().to_vec(),
        min_distance,
    });
    Ok(field)
}
