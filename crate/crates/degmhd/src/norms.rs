//! Weighted norms and inner products.
//!
//! All integrals carry the cylindrical measure `r dr dtheta dz` and the
//! metric weights `(1, r^2, 1)` on coordinate-basis components. Radial
//! quadrature is the midpoint rule on the cell-centered grid; axial
//! quadrature is the trapezoid rule; the angular integral of a single-mode
//! field is evaluated over one exact period.

use crate::calculus::{ddr, ddz, Parity};
use crate::field::{AxiVectorField, RadialMode, ScalarField};
use crate::grid::RGrid;
use ndarray::Array1;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NormError {
    #[error("Sobolev order must be a nonnegative integer")]
    BadOrder,
    #[error("Lebesgue exponent must satisfy p >= 1 (got {0})")]
    BadExponent(f64),
}

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[inline]
fn z_weight(k: usize, n_z: usize) -> f64 {
    if k == 0 || k == n_z - 1 {
        0.5
    } else {
        1.0
    }
}

/// `int a b r dr dtheta dz` for axisymmetric scalars (the angular integral
/// contributes `2 pi`).
pub fn inner_product_scalar(a: &ScalarField, b: &ScalarField) -> f64 {
    let g = &a.grid;
    let mut acc = 0.0;
    for j in 0..g.n_r() {
        let r = g.r(j);
        for k in 0..g.n_z {
            acc += z_weight(k, g.n_z) * a.data[[j, k]] * b.data[[j, k]] * r;
        }
    }
    acc * g.dr() * g.dz() * TWO_PI
}

/// `int U . V r dr dtheta dz` with the metric weights of the coordinate basis.
pub fn inner_product_vector(a: &AxiVectorField, b: &AxiVectorField) -> f64 {
    let g = &a.grid;
    let mut acc = 0.0;
    for j in 0..g.n_r() {
        let r = g.r(j);
        for k in 0..g.n_z {
            let dot = a.r[[j, k]] * b.r[[j, k]]
                + r * r * a.theta[[j, k]] * b.theta[[j, k]]
                + a.z[[j, k]] * b.z[[j, k]];
            acc += z_weight(k, g.n_z) * dot * r;
        }
    }
    acc * g.dr() * g.dz() * TWO_PI
}

/// `L^p` norm of an axisymmetric scalar with measure `r dr dtheta dz`.
pub fn lp_norm_scalar(f: &ScalarField, p: f64) -> Result<f64, NormError> {
    if p < 1.0 {
        return Err(NormError::BadExponent(p));
    }
    let g = &f.grid;
    let mut acc = 0.0;
    for j in 0..g.n_r() {
        let r = g.r(j);
        for k in 0..g.n_z {
            acc += z_weight(k, g.n_z) * f.data[[j, k]].abs().powf(p) * r;
        }
    }
    Ok((acc * g.dr() * g.dz() * TWO_PI).powf(1.0 / p))
}

/// `W^{s,p}` norm of an axisymmetric scalar using full mixed partials of
/// order at most `s`.
pub fn sobolev_norm_scalar(f: &ScalarField, s: i32, p: f64) -> Result<f64, NormError> {
    if s < 0 {
        return Err(NormError::BadOrder);
    }
    if p < 1.0 {
        return Err(NormError::BadExponent(p));
    }
    let g = &f.grid;
    let mut acc = 0.0;
    for ir in 0..=s {
        for iz in 0..=(s - ir) {
            let mut d = f.data.clone();
            let mut parity = Parity::Even;
            for _ in 0..ir {
                d = ddr(&d, g, parity);
                parity = if parity == Parity::Even { Parity::Odd } else { Parity::Even };
            }
            for _ in 0..iz {
                d = ddz(&d, g);
            }
            let tmp = ScalarField { grid: g.clone(), data: d };
            acc += lp_norm_scalar(&tmp, p)?.powf(p);
        }
    }
    Ok(acc.powf(1.0 / p))
}

// ---------------------------------------------------------------------------
// Single-mode (1-d radial amplitude) norms. The reconstructed field is
// Re(a(r) e^{i m theta}); theta integrals run over one exact period.

const N_THETA: usize = 64;

fn theta_nodes(m: i64) -> (Vec<f64>, f64, f64) {
    // For m != 0 integrate over one period and multiply by |m|; for m = 0 the
    // integrand is theta-independent.
    if m == 0 {
        (vec![0.0], TWO_PI, 1.0)
    } else {
        let period = TWO_PI / m.unsigned_abs() as f64;
        let h = period / N_THETA as f64;
        let nodes = (0..N_THETA).map(|i| (i as f64 + 0.5) * h).collect();
        (nodes, h, m.unsigned_abs() as f64)
    }
}

fn d_radial(data: &Array1<Complex64>, grid: &RGrid) -> Array1<Complex64> {
    let n = grid.n_r;
    let h = grid.dr();
    let mut out = Array1::zeros(n);
    out[0] = (-3.0 * data[0] + 4.0 * data[1] - data[2]) / (2.0 * h);
    for j in 1..n - 1 {
        out[j] = (data[j + 1] - data[j - 1]) / (2.0 * h);
    }
    out[n - 1] = (3.0 * data[n - 1] - 4.0 * data[n - 2] + data[n - 3]) / (2.0 * h);
    out
}

/// `L^p(r dr dtheta)` norm of the reconstructed real field of a mode.
pub fn mode_lp(mode: &RadialMode, p: f64) -> Result<f64, NormError> {
    if p < 1.0 {
        return Err(NormError::BadExponent(p));
    }
    let g = &mode.grid;
    let (nodes, h, fold) = theta_nodes(mode.m);
    let mut acc = 0.0;
    for &th in &nodes {
        let phase = Complex64::from_polar(1.0, mode.m as f64 * th);
        let mut radial = 0.0;
        for j in 0..g.n_r {
            let v = (mode.data[j] * phase).re;
            radial += v.abs().powf(p) * g.r(j);
        }
        acc += radial * g.dr() * h * fold;
    }
    Ok(acc.powf(1.0 / p))
}

/// Mixed norm `L^2_theta L^p_{r dr}`: inner `L^p` in `r`, then `L^2` in theta.
pub fn mode_mixed(mode: &RadialMode, p: f64) -> Result<f64, NormError> {
    if p < 1.0 {
        return Err(NormError::BadExponent(p));
    }
    let g = &mode.grid;
    let (nodes, h, fold) = theta_nodes(mode.m);
    let mut acc = 0.0;
    for &th in &nodes {
        let phase = Complex64::from_polar(1.0, mode.m as f64 * th);
        let mut radial = 0.0;
        for j in 0..g.n_r {
            let v = (mode.data[j] * phase).re;
            radial += v.abs().powf(p) * g.r(j);
        }
        let inner = (radial * g.dr()).powf(1.0 / p);
        acc += inner * inner * h * fold;
    }
    Ok(acc.sqrt())
}

/// `W^{s,p}` norm of a mode field: theta derivatives are exact
/// multiplications by `i m`, radial derivatives are finite differences.
pub fn mode_sobolev(mode: &RadialMode, s: i32, p: f64) -> Result<f64, NormError> {
    if s < 0 {
        return Err(NormError::BadOrder);
    }
    if p < 1.0 {
        return Err(NormError::BadExponent(p));
    }
    let g = &mode.grid;
    let im = Complex64::new(0.0, mode.m as f64);
    let mut acc = 0.0;
    for ir in 0..=s {
        for it in 0..=(s - ir) {
            let mut d = mode.data.clone();
            for _ in 0..ir {
                d = d_radial(&d, g);
            }
            // each theta derivative multiplies by i m and, acting on the
            // physical field, divides by r per the coordinate-basis gradient;
            // here we track the plain partial d_theta (used by W^{s,p} with
            // mixed partials in (r, theta) against the measure r dr dtheta).
            let mut factor = Complex64::new(1.0, 0.0);
            for _ in 0..it {
                factor *= im;
            }
            let term = RadialMode {
                m: mode.m,
                grid: g.clone(),
                data: d.mapv(|v| v * factor),
            };
            acc += mode_lp(&term, p)?.powf(p);
        }
    }
    Ok(acc.powf(1.0 / p))
}

/// `L^2(r dr)` norm of a real radial sample vector.
pub fn radial_l2(g: &[f64], grid: &RGrid) -> f64 {
    let mut acc = 0.0;
    for j in 0..grid.n_r {
        acc += g[j] * g[j] * grid.r(j);
    }
    (acc * grid.dr()).sqrt()
}

/// `H^s(r dr)` norm of a real radial sample vector (pure radial derivatives).
pub fn radial_sobolev(g: &[f64], grid: &RGrid, s: i32) -> f64 {
    let mut data: Array1<Complex64> = Array1::from_iter(g.iter().map(|&v| Complex64::new(v, 0.0)));
    let mut acc = 0.0;
    for j in 0..=s {
        let re: Vec<f64> = data.iter().map(|v| v.re).collect();
        let n = radial_l2(&re, grid);
        acc += n * n;
        if j < s {
            data = d_radial(&data, grid);
        }
    }
    acc.sqrt()
}

/// Quadrature of both sides of the radial Hardy inequality
/// `|| (r d_r + k + 1) u ||^2_{L^2(r dr)} >= k^2 || u ||^2_{L^2(r dr)}`.
///
/// Returns `(lhs, rhs)`.
pub fn hardy_pair(u: &[f64], grid: &RGrid, k: u32) -> (f64, f64) {
    let n = grid.n_r;
    let h = grid.dr();
    let mut op = vec![0.0; n];
    for j in 0..n {
        let du = if j == 0 {
            // u is a smooth even function of r at the axis
            (u[1] - u[0]) / (2.0 * h)
        } else if j == n - 1 {
            (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h)
        } else {
            (u[j + 1] - u[j - 1]) / (2.0 * h)
        };
        op[j] = grid.r(j) * du + (k as f64 + 1.0) * u[j];
    }
    let lhs = radial_l2(&op, grid).powi(2);
    let rhs = (k as f64).powi(2) * radial_l2(u, grid).powi(2);
    (lhs, rhs)
}

/// Pointwise magnitude samples of a mode-field gradient pair, used by the
/// degeneration measurements: given radial amplitudes of the components in an
/// orthonormal frame, returns the mixed norm of the Euclidean magnitude.
pub fn mixed_norm_of_magnitude(
    components: &[&Array1<Complex64>],
    m: i64,
    grid: &RGrid,
    p: f64,
) -> Result<f64, NormError> {
    if p < 1.0 {
        return Err(NormError::BadExponent(p));
    }
    let (nodes, h, fold) = theta_nodes(m);
    let mut acc = 0.0;
    for &th in &nodes {
        let phase = Complex64::from_polar(1.0, m as f64 * th);
        let mut radial = 0.0;
        for j in 0..grid.n_r {
            let mut mag2 = 0.0;
            for c in components {
                let v = (c[j] * phase).re;
                mag2 += v * v;
            }
            radial += mag2.powf(p / 2.0) * grid.r(j);
        }
        let inner = (radial * grid.dr()).powf(1.0 / p);
        acc += inner * inner * h * fold;
    }
    Ok(acc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RZGrid;

    #[test]
    fn zero_field_all_norms_vanish() {
        let g = RZGrid::new(1.0, 16, 1.0, 9).unwrap();
        let f = ScalarField::zeros(&g);
        for s in 0..3 {
            for &p in &[1.0, 1.5, 2.0] {
                assert_eq!(sobolev_norm_scalar(&f, s, p).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn invalid_arguments_rejected() {
        let g = RZGrid::new(1.0, 16, 1.0, 9).unwrap();
        let f = ScalarField::zeros(&g);
        assert_eq!(sobolev_norm_scalar(&f, -1, 2.0).unwrap_err(), NormError::BadOrder);
        assert_eq!(
            sobolev_norm_scalar(&f, 0, 0.5).unwrap_err(),
            NormError::BadExponent(0.5)
        );
    }

    #[test]
    fn norm_consistency_l2_squared_equals_inner_product() {
        let g = RZGrid::new(1.5, 24, 1.0, 17).unwrap();
        let f = ScalarField::from_fn(&g, |r, z| (r - 0.7) * (-z * z).exp());
        let n = sobolev_norm_scalar(&f, 0, 2.0).unwrap();
        let ip = inner_product_scalar(&f, &f);
        assert!((n * n - ip).abs() < 1e-12 * ip.max(1.0));
    }

    #[test]
    fn inner_product_symmetric() {
        let g = RZGrid::new(1.5, 24, 1.0, 17).unwrap();
        let a = ScalarField::from_fn(&g, |r, z| r * z);
        let b = ScalarField::from_fn(&g, |r, z| (r + z).sin());
        assert!((inner_product_scalar(&a, &b) - inner_product_scalar(&b, &a)).abs() < 1e-14);
    }

    #[test]
    fn mode_l2_equals_sqrt_pi_radial_norm() {
        // || Re(a e^{i m th}) ||_{L^2(r dr dth)} = sqrt(pi) ||a||_{L^2(r dr)} for m != 0.
        let g = RGrid::new(2.0, 256).unwrap();
        let a = RadialMode::from_fn(&g, 8, |r| {
            Complex64::new((-(r - 1.0) * (r - 1.0) * 20.0).exp(), 0.0)
        });
        let re: Vec<f64> = a.data.iter().map(|v| v.re).collect();
        let expect = std::f64::consts::PI.sqrt() * radial_l2(&re, &g);
        let got = mode_lp(&a, 2.0).unwrap();
        assert!((got - expect).abs() < 0.01 * expect, "{got} vs {expect}");
        let mixed = mode_mixed(&a, 2.0).unwrap();
        assert!((mixed - expect).abs() < 0.01 * expect);
    }

    #[test]
    fn l1_over_l2_shrinks_with_support() {
        // Rescaling g(r) -> g(r/sigma) concentrates support; the L1/L2 ratio
        // must decrease with sigma.
        let g = RGrid::new(2.0, 512).unwrap();
        let ratio = |sigma: f64| {
            let a = RadialMode::from_fn(&g, 8, |r| {
                let u = (r - 1.0) / sigma;
                Complex64::new((-u * u * 8.0).exp(), 0.0)
            });
            mode_lp(&a, 1.0).unwrap() / mode_lp(&a, 2.0).unwrap()
        };
        let r1 = ratio(0.5);
        let r2 = ratio(0.125);
        assert!(r2 < r1, "ratio must shrink: {r2} vs {r1}");
    }

    #[test]
    fn hardy_inequality_on_random_profiles() {
        let g = RGrid::new(4.0, 600).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let c1 = 0.8 + 1.6 * rnd();
            let w1 = 0.1 + 0.3 * rnd();
            let amp = 0.5 + rnd();
            let u: Vec<f64> = g
                .nodes()
                .iter()
                .map(|&r| amp * (-(r - c1) * (r - c1) / (w1 * w1)).exp())
                .collect();
            for k in [1u32, 2, 3] {
                let (lhs, rhs) = hardy_pair(&u, &g, k);
                assert!(
                    lhs >= rhs - 10.0 * g.dr() * rhs.max(1.0),
                    "Hardy violated: lhs {lhs} rhs {rhs} k {k}"
                );
            }
        }
    }
}
