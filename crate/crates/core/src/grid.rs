use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform discretization of `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDoc")]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

#[derive(Deserialize)]
struct GridDoc {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl TryFrom<GridDoc> for Grid {
    type Error = Error;

    fn try_from(doc: GridDoc) -> Result<Self> {
        Grid::new(doc.x_min, doc.x_max, doc.n_points)
    }
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::param(format!("grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_points < 3 {
            return Err(Error::param(format!("grid needs at least 3 points, got {n_points}")));
        }
        Ok(Grid { x_min, x_max, n_points })
    }

    /// Smallest grid on `[x_min, x_max]` whose spacing does not exceed `h_max`.
    pub fn with_spacing(x_min: f64, x_max: f64, h_max: f64) -> Result<Self> {
        if h_max <= 0.0 {
            return Err(Error::param("grid spacing must be positive"));
        }
        let intervals = ((x_max - x_min) / h_max - 1e-9).ceil().max(2.0) as usize;
        Grid::new(x_min, x_max, intervals + 1)
    }

    /// Symmetric grid `[-half_width, half_width]` with an odd point count so
    /// that the origin is a node.
    pub fn symmetric(half_width: f64, h_max: f64) -> Result<Self> {
        let half = ((half_width / h_max - 1e-9).ceil().max(1.0)) as usize;
        Grid::new(-half_width, half_width, 2 * half + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.h()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.x_min) / self.h()).round();
        t.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// True when the grid is its own mirror image under `x -> -x`.
    pub fn is_symmetric(&self) -> bool {
        let scale = self.x_max.abs().max(self.x_min.abs()).max(1.0);
        (self.x_min + self.x_max).abs() <= 1e-12 * scale
    }

    /// A grid over the same interval with `2(n-1)+1` points.
    pub fn refined(&self) -> Self {
        Grid { n_points: 2 * (self.n_points - 1) + 1, ..*self }
    }
}
