//! Field containers on cylindrical grids.
//!
//! Vector fields are stored through their components in the coordinate
//! derivative basis `(d_r, d_theta, d_z)`; the metric weight `r^2` on the
//! theta component is applied by the inner products in [`crate::norms`].
//! Single-angular-mode fields store a complex amplitude `a` with the physical
//! field `Re(a e^{i m theta})`.

use crate::grid::{GridError, RGrid, RZGrid};
use ndarray::{Array1, Array2};
use num_complex::Complex64;

/// Real scalar samples on an `(r, z)` grid, shape `(n_r, n_z)`.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: RZGrid,
    pub data: Array2<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &RZGrid) -> Self {
        ScalarField { grid: grid.clone(), data: Array2::zeros((grid.n_r(), grid.n_z)) }
    }

    pub fn from_fn(grid: &RZGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut s = Self::zeros(grid);
        for j in 0..grid.n_r() {
            for k in 0..grid.n_z {
                s.data[[j, k]] = f(grid.r(j), grid.z(k));
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Axisymmetric real vector field `U = U^r d_r + U^theta d_theta + U^z d_z`.
#[derive(Debug, Clone)]
pub struct AxiVectorField {
    pub grid: RZGrid,
    pub r: Array2<f64>,
    pub theta: Array2<f64>,
    pub z: Array2<f64>,
}

impl AxiVectorField {
    pub fn zeros(grid: &RZGrid) -> Self {
        let shape = (grid.n_r(), grid.n_z);
        AxiVectorField {
            grid: grid.clone(),
            r: Array2::zeros(shape),
            theta: Array2::zeros(shape),
            z: Array2::zeros(shape),
        }
    }

    pub fn from_fns(
        grid: &RZGrid,
        ur: impl Fn(f64, f64) -> f64,
        utheta: impl Fn(f64, f64) -> f64,
        uz: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut u = Self::zeros(grid);
        for j in 0..grid.n_r() {
            for k in 0..grid.n_z {
                let (r, z) = (grid.r(j), grid.z(k));
                u.r[[j, k]] = ur(r, z);
                u.theta[[j, k]] = utheta(r, z);
                u.z[[j, k]] = uz(r, z);
            }
        }
        u
    }

    pub fn check_grid(&self, other: &AxiVectorField) -> Result<(), GridError> {
        self.grid.same_shape(&other.grid)
    }

    /// Pointwise squared magnitude with the `r^2` metric weight on theta.
    pub fn magnitude_sq(&self) -> Array2<f64> {
        let mut m = Array2::zeros(self.r.raw_dim());
        for j in 0..self.grid.n_r() {
            let r = self.grid.r(j);
            for k in 0..self.grid.n_z {
                let (a, b, c) = (self.r[[j, k]], self.theta[[j, k]], self.z[[j, k]]);
                m[[j, k]] = a * a + r * r * b * b + c * c;
            }
        }
        m
    }
}

/// Complex radial amplitude of a single angular mode: field `Re(a(r) e^{i m theta})`.
#[derive(Debug, Clone)]
pub struct RadialMode {
    pub m: i64,
    pub grid: RGrid,
    pub data: Array1<Complex64>,
}

impl RadialMode {
    pub fn zeros(grid: &RGrid, m: i64) -> Self {
        RadialMode { m, grid: grid.clone(), data: Array1::zeros(grid.n_r) }
    }

    pub fn from_fn(grid: &RGrid, m: i64, f: impl Fn(f64) -> Complex64) -> Self {
        let mut s = Self::zeros(grid, m);
        for j in 0..grid.n_r {
            s.data[j] = f(grid.r(j));
        }
        s
    }
}

/// Complex `(r, z)` amplitude of a single angular mode with all three vector
/// components: field `Re(a^c(r,z) e^{i m theta})` per component `c`.
#[derive(Debug, Clone)]
pub struct AxiModeVector {
    pub m: i64,
    pub grid: RZGrid,
    pub r: Array2<Complex64>,
    pub theta: Array2<Complex64>,
    pub z: Array2<Complex64>,
}

impl AxiModeVector {
    pub fn zeros(grid: &RZGrid, m: i64) -> Self {
        let shape = (grid.n_r(), grid.n_z);
        AxiModeVector {
            m,
            grid: grid.clone(),
            r: Array2::zeros(shape),
            theta: Array2::zeros(shape),
            z: Array2::zeros(shape),
        }
    }
}

/// Complex `(r, z)` scalar amplitude of a single angular mode.
#[derive(Debug, Clone)]
pub struct AxiModeScalar {
    pub m: i64,
    pub grid: RZGrid,
    pub data: Array2<Complex64>,
}

impl AxiModeScalar {
    pub fn zeros(grid: &RZGrid, m: i64) -> Self {
        AxiModeScalar { m, grid: grid.clone(), data: Array2::zeros((grid.n_r(), grid.n_z)) }
    }

    pub fn from_fn(grid: &RZGrid, m: i64, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut s = Self::zeros(grid, m);
        for j in 0..grid.n_r() {
            for k in 0..grid.n_z {
                s.data[[j, k]] = f(grid.r(j), grid.z(k));
            }
        }
        s
    }
}
