//! 1-D meshes of the domain `[0, 2pi]`.
//!
//! Two builders cover the benchmark studies: a uniform mesh, and a "split"
//! mesh that divides `[0, pi/2]` and `[pi/2, 2pi]` into equally many cells,
//! giving a 1:3 size ratio between the two regions.  A general breakpoint
//! constructor exists so projection and quadrature tests can work on a
//! single reference cell such as `[-1, 1]`.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::{Error, Result};

/// A partition of an interval into cells `[x_{j-1/2}, x_{j+1/2}]`.
///
/// Cell `j` covers `[breakpoints[j], breakpoints[j + 1]]`; `half_size(j)` is
/// the map factor between the cell and the reference cell `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    breakpoints: Vec<f64>,
    sizes: Vec<f64>,
    half_sizes: Vec<f64>,
    centers: Vec<f64>,
}

impl Mesh1D {
    /// Uniform mesh of `[0, 2pi]` with `n` cells.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "a mesh needs at least one cell");
        let breakpoints = (0..=n).map(|i| TAU * i as f64 / n as f64).collect();
        Self::from_sorted(breakpoints)
    }

    /// Split mesh of `[0, 2pi]`: `n/2` equal cells on `[0, pi/2]` and `n/2`
    /// equal cells on `[pi/2, 2pi]`, so cell sizes alternate between
    /// `pi/n` and `3pi/n` across the midpoint.  `n` must be even.
    pub fn split(n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::OddSplitCount(n));
        }
        let half = n / 2;
        let mut breakpoints = Vec::with_capacity(n + 1);
        for i in 0..half {
            breakpoints.push(FRAC_PI_2 * i as f64 / half as f64);
        }
        for i in 0..half {
            breakpoints.push(FRAC_PI_2 + (TAU - FRAC_PI_2) * i as f64 / half as f64);
        }
        breakpoints.push(TAU);
        Ok(Self::from_sorted(breakpoints))
    }

    /// Mesh from explicit breakpoints, which must be strictly increasing.
    pub fn from_breakpoints(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NonMonotoneBreakpoints);
        }
        Ok(Self::from_sorted(breakpoints))
    }

    fn from_sorted(breakpoints: Vec<f64>) -> Self {
        let sizes: Vec<f64> = breakpoints.windows(2).map(|w| w[1] - w[0]).collect();
        let half_sizes = sizes.iter().map(|h| 0.5 * h).collect();
        let centers = breakpoints
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect();
        Self {
            breakpoints,
            sizes,
            half_sizes,
            centers,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.sizes.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn cell_size(&self, j: usize) -> f64 {
        self.sizes[j]
    }

    pub fn half_size(&self, j: usize) -> f64 {
        self.half_sizes[j]
    }

    pub fn center(&self, j: usize) -> f64 {
        self.centers[j]
    }

    /// Left face `x_{j-1/2}` of cell `j`.
    pub fn left_edge(&self, j: usize) -> f64 {
        self.breakpoints[j]
    }

    /// Right face `x_{j+1/2}` of cell `j`.
    pub fn right_edge(&self, j: usize) -> f64 {
        self.breakpoints[j + 1]
    }

    pub fn h_min(&self) -> f64 {
        self.sizes.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn h_max(&self) -> f64 {
        self.sizes.iter().cloned().fold(0.0, f64::max)
    }

    /// `h_max / h_min`; 1 for uniform meshes, 3 for split meshes.
    pub fn quasi_uniformity(&self) -> f64 {
        self.h_max() / self.h_min()
    }

    pub fn domain_start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn domain_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_end() - self.domain_start()
    }

    /// Map `x` inside cell `j` to the reference coordinate `s` in `[-1, 1]`.
    ///
    /// Points may overshoot a face by up to `1e-12 * h_j` (to absorb
    /// round-off in face coordinates); anything further out is an error.
    pub fn to_reference(&self, j: usize, x: f64) -> Result<f64> {
        let lo = self.left_edge(j);
        let hi = self.right_edge(j);
        let slack = 1e-12 * self.sizes[j];
        if x < lo - slack || x > hi + slack {
            return Err(Error::OutOfCell { x, cell: j, lo, hi });
        }
        let s = (x - self.centers[j]) / self.half_sizes[j];
        Ok(s.clamp(-1.0, 1.0))
    }

    /// Map a reference coordinate `s` in `[-1, 1]` to the point of cell `j`.
    pub fn from_reference(&self, j: usize, s: f64) -> f64 {
        debug_assert!((-1.0..=1.0).contains(&s));
        self.centers[j] + self.half_sizes[j] * s
    }
}
