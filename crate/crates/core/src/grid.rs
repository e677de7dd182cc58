//! Regular rectangular grids of cell centers.
//!
//! One grid type serves every discretized object in the crate: quadrature
//! nodes, intensity rasters, inhibition lattices, and binned chain marginals.
//! Nodes are cell centers, stored row-major with `x` varying fastest.

use crate::error::invalid;
use crate::geom::{Point, Rect};
use crate::Result;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    rect: Rect,
    nx: usize,
    ny: usize,
}

impl Grid {
    pub fn new(rect: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(invalid("grid resolution must be at least 1x1"));
        }
        if rect.width() <= 0.0 || rect.height() <= 0.0 {
            return Err(invalid("grid rectangle must have positive area"));
        }
        Ok(Grid { rect, nx, ny })
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.rect.width() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.rect.height() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Center of cell `(ix, iy)`.
    pub fn center(&self, ix: usize, iy: usize) -> Point {
        debug_assert!(ix < self.nx && iy < self.ny);
        Point {
            x: self.rect.xmin + (ix as f64 + 0.5) * self.dx(),
            y: self.rect.ymin + (iy as f64 + 0.5) * self.dy(),
        }
    }

    /// Center of the cell with flat index `i` (row-major, `x` fastest).
    pub fn node(&self, i: usize) -> Point {
        self.center(i % self.nx, i / self.nx)
    }

    pub fn index_of(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// `(ix, iy)` pair for a flat index.
    pub fn coords_of(&self, i: usize) -> (usize, usize) {
        (i % self.nx, i / self.nx)
    }

    /// Flat index of the cell containing `p`, or `None` if `p` lies outside
    /// the grid rectangle. Points on the far edges belong to the last cell.
    pub fn cell_containing(&self, p: &Point) -> Option<usize> {
        if !self.rect.contains(p) {
            return None;
        }
        let fx = libm::floor((p.x - self.rect.xmin) / self.dx()) as usize;
        let fy = libm::floor((p.y - self.rect.ymin) / self.dy()) as usize;
        let ix = fx.min(self.nx - 1);
        let iy = fy.min(self.ny - 1);
        Some(self.index_of(ix, iy))
    }

    /// All cell centers in flat-index order.
    pub fn nodes(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }
}
