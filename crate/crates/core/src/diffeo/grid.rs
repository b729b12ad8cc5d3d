use std::f64::consts::PI;

use super::Manifold;

/// Default number of grid cells for sup-norm sweeps.
pub const DEFAULT_GRID: usize = 1024;

/// Equally spaced sample points on `[lo, hi]`.
///
/// `cells` intervals give `cells + 1` points; a periodic grid omits `hi`
/// (it is identified with `lo`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
    pub periodic: bool,
}

impl Grid {
    pub fn unit(cells: usize) -> Self {
        Grid { lo: 0.0, hi: 1.0, cells: cells.max(1), periodic: false }
    }

    pub fn circle(cells: usize) -> Self {
        Grid { lo: 0.0, hi: 1.0, cells: cells.max(1), periodic: true }
    }

    pub fn window(lo: f64, hi: f64, cells: usize) -> Self {
        Grid { lo, hi, cells: cells.max(1), periodic: false }
    }

    /// `[0,1]` for the interval, `[0,1)` for the circle and `[0, 4π]` for the line.
    pub fn default_for(manifold: Manifold, cells: usize) -> Self {
        match manifold {
            Manifold::Interval => Self::unit(cells),
            Manifold::Circle => Self::circle(cells),
            Manifold::Line => Self::window(0.0, 4.0 * PI, cells),
        }
    }

    pub fn len(&self) -> usize {
        if self.periodic {
            self.cells
        } else {
            self.cells + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        if i == self.cells && !self.periodic {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * (i as f64 / self.cells as f64)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}
