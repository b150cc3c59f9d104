//! Planar geometry: points, rectangles, the integration region and the
//! geometric scale ladder used by every scale-coupled computation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::InvalidParameter(format!(
                "degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Rect { x0, y0, x1, y1 })
    }

    /// The unit square `(0,1)^2`.
    pub fn unit() -> Self {
        Rect {
            x0: 0.0,
            y0: 0.0,
            x1: 1.0,
            y1: 1.0,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    /// True if `p` lies at distance at least `margin` from the boundary.
    pub fn contains_with_margin(&self, p: &Point, margin: f64) -> bool {
        p.x >= self.x0 + margin
            && p.x <= self.x1 - margin
            && p.y >= self.y0 + margin
            && p.y <= self.y1 - margin
    }

    /// True if `inner`, grown by `margin` on every side, stays inside `self`.
    pub fn encloses_with_margin(&self, inner: &Rect, margin: f64) -> bool {
        inner.x0 - margin >= self.x0
            && inner.x1 + margin <= self.x1
            && inner.y0 - margin >= self.y0
            && inner.y1 + margin <= self.y1
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// Geometric ladder of regularisation scales `eps_j = eps0 * ratio^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleLadder {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl ScaleLadder {
    pub fn new(eps0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(eps0 > 0.0 && eps0 <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps0 must lie in (0, 1], got {eps0}"
            )));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ladder ratio must lie in (0, 1), got {ratio}"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidParameter("ladder must have at least one scale".into()));
        }
        Ok(ScaleLadder { eps0, ratio, count })
    }

    /// Scales in decreasing order, `eps0` first.
    pub fn scales(&self) -> Vec<f64> {
        (0..self.count)
            .map(|j| self.eps0 * self.ratio.powi(j as i32))
            .collect()
    }

    pub fn eps_min(&self) -> f64 {
        self.eps0 * self.ratio.powi(self.count as i32 - 1)
    }
}

/// Integration region: a sub-rectangle of the field domain together with the
/// midpoint grid used to discretise Lebesgue measure on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub rect: Rect,
    pub grid_n: usize,
}

impl Region {
    pub fn new(rect: Rect, grid_n: usize) -> Result<Self> {
        if grid_n == 0 {
            return Err(Error::InvalidParameter("grid_n must be positive".into()));
        }
        Ok(Region { rect, grid_n })
    }

    /// Midpoints of the grid cells along the x axis.
    pub fn grid_xs(&self) -> Vec<f64> {
        let step = self.rect.width() / self.grid_n as f64;
        (0..self.grid_n)
            .map(|i| self.rect.x0 + (i as f64 + 0.5) * step)
            .collect()
    }

    /// Midpoints of the grid cells along the y axis.
    pub fn grid_ys(&self) -> Vec<f64> {
        let step = self.rect.height() / self.grid_n as f64;
        (0..self.grid_n)
            .map(|i| self.rect.y0 + (i as f64 + 0.5) * step)
            .collect()
    }

    pub fn cell_area(&self) -> f64 {
        (self.rect.width() / self.grid_n as f64) * (self.rect.height() / self.grid_n as f64)
    }

    pub fn area(&self) -> f64 {
        self.rect.area()
    }

    /// Checks that the region, inflated by `margin`, stays inside `domain`.
    pub fn validate_margin(&self, domain: &Rect, margin: f64) -> Result<()> {
        if domain.encloses_with_margin(&self.rect, margin) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "region {:?} with margin {margin} does not fit inside the domain {:?}",
                self.rect, domain
            )))
        }
    }
}
