//! Planar points and axis-aligned rectangles.
//!
//! All distances in the crate are Euclidean in the coordinate units of the
//! data; nothing here knows about projections or geodesics.

use crate::error::invalid;
use crate::Result;

/// A location in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Point) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

/// An axis-aligned rectangle, closed on all sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    /// A rectangle from its corner coordinates. Degenerate (zero-width or
    /// zero-height) rectangles are allowed; inverted ones are not.
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        if !(xmin.is_finite() && xmax.is_finite() && ymin.is_finite() && ymax.is_finite()) {
            return Err(invalid("rectangle coordinates must be finite"));
        }
        if xmin > xmax || ymin > ymax {
            return Err(invalid(alloc::format!(
                "rectangle is inverted: [{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        Ok(Rect {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    /// The unit square [0, 1] x [0, 1].
    pub const fn unit_square() -> Self {
        Rect {
            xmin: 0.0,
            xmax: 1.0,
            ymin: 0.0,
            ymax: 1.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Length of the diagonal.
    pub fn diameter(&self) -> f64 {
        libm::hypot(self.width(), self.height())
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    /// Smallest rectangle containing all `points`.
    pub fn bounding(points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("cannot bound an empty point set"));
        }
        let mut r = Rect {
            xmin: f64::INFINITY,
            xmax: f64::NEG_INFINITY,
            ymin: f64::INFINITY,
            ymax: f64::NEG_INFINITY,
        };
        for p in points {
            if !p.is_finite() {
                return Err(invalid("non-finite point in bounding set"));
            }
            r.xmin = r.xmin.min(p.x);
            r.xmax = r.xmax.max(p.x);
            r.ymin = r.ymin.min(p.y);
            r.ymax = r.ymax.max(p.y);
        }
        Ok(r)
    }
}
