//! Cylindrical grids.
//!
//! The radial grid is cell-centered, `r_j = (j + 1/2) dr`, so no sample sits
//! on the coordinate axis. The axial grid is node-centered on the symmetric
//! interval `[-z_max, z_max]` including the endpoints.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid parameters must be positive: {0}")]
    NonPositive(&'static str),
    #[error("n_z must be at least 4 (got {0})")]
    TooFewZNodes(usize),
    #[error("grids do not match: {0}")]
    Mismatch(&'static str),
}

/// Cell-centered radial grid on `(0, r_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RGrid {
    pub r_max: f64,
    pub n_r: usize,
}

impl RGrid {
    pub fn new(r_max: f64, n_r: usize) -> Result<Self, GridError> {
        if r_max <= 0.0 {
            return Err(GridError::NonPositive("r_max"));
        }
        if n_r == 0 {
            return Err(GridError::NonPositive("n_r"));
        }
        Ok(RGrid { r_max, n_r })
    }

    #[inline]
    pub fn dr(&self) -> f64 {
        self.r_max / self.n_r as f64
    }

    #[inline]
    pub fn r(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dr()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_r).map(|j| self.r(j)).collect()
    }

    /// Index of the cell containing `r`, clamped to the grid.
    pub fn locate(&self, r: f64) -> usize {
        let j = (r / self.dr() - 0.5).round();
        (j.max(0.0) as usize).min(self.n_r - 1)
    }
}

/// Product grid: cell-centered in `r`, node-centered in `z` over
/// `[-z_max, z_max]` with `n_z >= 4` uniform nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RZGrid {
    pub r: RGrid,
    pub z_max: f64,
    pub n_z: usize,
}

impl RZGrid {
    pub fn new(r_max: f64, n_r: usize, z_max: f64, n_z: usize) -> Result<Self, GridError> {
        let r = RGrid::new(r_max, n_r)?;
        if z_max <= 0.0 {
            return Err(GridError::NonPositive("z_max"));
        }
        if n_z < 4 {
            return Err(GridError::TooFewZNodes(n_z));
        }
        Ok(RZGrid { r, z_max, n_z })
    }

    #[inline]
    pub fn dz(&self) -> f64 {
        2.0 * self.z_max / (self.n_z - 1) as f64
    }

    #[inline]
    pub fn z(&self, k: usize) -> f64 {
        -self.z_max + k as f64 * self.dz()
    }

    #[inline]
    pub fn n_r(&self) -> usize {
        self.r.n_r
    }

    #[inline]
    pub fn dr(&self) -> f64 {
        self.r.dr()
    }

    #[inline]
    pub fn r(&self, j: usize) -> f64 {
        self.r.r(j)
    }

    pub fn same_shape(&self, other: &RZGrid) -> Result<(), GridError> {
        if self == other {
            Ok(())
        } else {
            Err(GridError::Mismatch("RZGrid shape or extents differ"))
        }
    }
}
