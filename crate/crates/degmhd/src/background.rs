//! Axisymmetric background flows.
//!
//! The E-MHD background `Pi(t, r, z) d_theta` obeys the inviscid Burgers
//! equation `d_t Pi - 2 Pi d_z Pi = 0`, solved exactly by characteristics
//! `z' = -2 Pi` with monotone cubic resampling. The Hall background couples
//! `(Omega, Pi)` through the swirl-free velocity recovered from the stream
//! function `-slashed_laplacian(Phi) = Omega`.

use crate::bump::Cutoff;
use crate::calculus::{self, Parity};
use crate::field::ScalarField;
use crate::grid::RZGrid;
use crate::norms;
use crate::profile::RadialProfile;
use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BackgroundError {
    #[error("requested time {t} is at or beyond the shock time {shock}")]
    PastShock { t: f64, shock: f64 },
    #[error("CFL violation at t = {t}: dt = {dt} exceeds the advective bound {bound}")]
    Cfl { t: f64, dt: f64, bound: f64 },
    #[error("viscous stability violated: need nu*dt <= min(dr,dz)^2/4")]
    ViscousStability,
    #[error("solution diverged (NaN) after t = {last_valid}")]
    Diverged { last_valid: f64 },
    #[error("stream solver failed: {0}")]
    Stream(String),
}

// ---------------------------------------------------------------------------
// Monotone cubic (Fritsch-Carlson) interpolation on strictly increasing knots.

pub(crate) struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub(crate) fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2);
        let mut slopes = vec![0.0; n - 1];
        for i in 0..n - 1 {
            slopes[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        }
        let mut d = vec![0.0; n];
        d[0] = slopes[0];
        d[n - 1] = slopes[n - 2];
        for i in 1..n - 1 {
            if slopes[i - 1] * slopes[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                let w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
                let w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
                d[i] = (w1 + w2) / (w1 / slopes[i - 1] + w2 / slopes[i]);
            }
        }
        MonotoneCubic { x, y, d }
    }

    pub(crate) fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        if xq <= self.x[0] {
            return self.y[0];
        }
        if xq >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x[mid] <= xq {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.x[lo + 1] - self.x[lo];
        let t = (xq - self.x[lo]) / h;
        let (y0, y1) = (self.y[lo], self.y[lo + 1]);
        let (d0, d1) = (self.d[lo], self.d[lo + 1]);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }
}

// ---------------------------------------------------------------------------
// Burgers background by characteristics.

/// Exact solution of `d_t Pi - 2 Pi d_z Pi = 0` from gridded initial data.
pub struct BurgersSolution {
    pub grid: RZGrid,
    pub initial: ScalarField,
    shock: f64,
    sup: f64,
}

impl BurgersSolution {
    pub fn new(initial: ScalarField) -> Self {
        let grid = initial.grid.clone();
        let shock = shock_time(&initial);
        let sup = initial.max_abs();
        BurgersSolution { grid, initial, shock, sup }
    }

    pub fn shock_time(&self) -> f64 {
        self.shock
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    /// Solution at time `t`, resampled to the grid row by row.
    pub fn eval(&self, t: f64) -> Result<ScalarField, BackgroundError> {
        if t >= self.shock {
            return Err(BackgroundError::PastShock { t, shock: self.shock });
        }
        let g = &self.grid;
        let mut out = ScalarField::zeros(g);
        for j in 0..g.n_r() {
            let mut x = Vec::with_capacity(g.n_z);
            let mut y = Vec::with_capacity(g.n_z);
            for k in 0..g.n_z {
                let z0 = g.z(k);
                let v = self.initial.data[[j, k]];
                x.push(z0 - 2.0 * v * t);
                y.push(v);
            }
            let interp = MonotoneCubic::new(x, y);
            for k in 0..g.n_z {
                out.data[[j, k]] = interp.eval(g.z(k));
            }
        }
        Ok(out)
    }

    /// `int Pi^2 r dr dz` evaluated in characteristic coordinates, where it
    /// is conserved exactly up to quadrature roundoff.
    pub fn quadratic_invariant(&self, t: f64) -> Result<f64, BackgroundError> {
        if t >= self.shock {
            return Err(BackgroundError::PastShock { t, shock: self.shock });
        }
        let g = &self.grid;
        let mut acc = 0.0;
        for j in 0..g.n_r() {
            let r = g.r(j);
            for k in 0..g.n_z {
                // jacobian dz/dz0 = 1 - 2 t dz(Pi0)
                let dpi = if k == 0 {
                    (self.initial.data[[j, 1]] - self.initial.data[[j, 0]]) / g.dz()
                } else if k == g.n_z - 1 {
                    (self.initial.data[[j, k]] - self.initial.data[[j, k - 1]]) / g.dz()
                } else {
                    (self.initial.data[[j, k + 1]] - self.initial.data[[j, k - 1]]) / (2.0 * g.dz())
                };
                let jac = 1.0 - 2.0 * t * dpi;
                let v = self.initial.data[[j, k]];
                let w = if k == 0 || k == g.n_z - 1 { 0.5 } else { 1.0 };
                acc += w * v * v * jac * r;
            }
        }
        Ok(acc * g.dr() * g.dz())
    }
}

/// First characteristic-crossing time `1 / (2 max (d_z Pi0)_+)`.
pub fn shock_time(initial: &ScalarField) -> f64 {
    let g = &initial.grid;
    let dz = calculus::ddz(&initial.data, g);
    let mut m = 0.0f64;
    for v in dz.iter() {
        m = m.max(*v);
    }
    if m <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / (2.0 * m)
    }
}

/// Finite speed of propagation: wherever the two data sets agree on the
/// dependence interval `[z - t sup, z + t sup]`, the solutions at `(t, r, z)`
/// must agree to resampling tolerance.
pub fn finite_speed_check(
    a0: &ScalarField,
    b0: &ScalarField,
    t: f64,
    tol: f64,
) -> Result<bool, BackgroundError> {
    let sa = BurgersSolution::new(a0.clone());
    let sb = BurgersSolution::new(b0.clone());
    let at = sa.eval(t)?;
    let bt = sb.eval(t)?;
    let g = &a0.grid;
    let sup = sa.sup_norm().max(sb.sup_norm());
    let reach = t * 2.0 * sup + g.dz(); // characteristic speed is 2|Pi|
    let scale = sup.max(1e-300);
    for j in 0..g.n_r() {
        for k in 0..g.n_z {
            let z = g.z(k);
            let mut agree = true;
            for k2 in 0..g.n_z {
                let z2 = g.z(k2);
                if (z2 - z).abs() <= reach
                    && (a0.data[[j, k2]] - b0.data[[j, k2]]).abs() > 1e-14 * scale
                {
                    agree = false;
                    break;
                }
            }
            // skip points whose dependence interval leaves the grid
            if z - reach < -g.z_max || z + reach > g.z_max {
                continue;
            }
            if agree && (at.data[[j, k]] - bt.data[[j, k]]).abs() > tol * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Canonical E-MHD background data `Pi0 = f(r) chi(z / 10)` where `chi` is
/// the plateau cutoff at scale `ell` (so the plateau half-width is `10 ell`).
pub fn emhd_initial(profile: &RadialProfile, grid: &RZGrid) -> ScalarField {
    let chi = Cutoff::new(10.0 * profile.ell);
    ScalarField::from_fn(grid, |r, z| profile.eval(r) * chi.eval(z))
}

// ---------------------------------------------------------------------------
// Stream function solver: -(drr + (3/r) dr + dzz) Phi = Omega.

/// Symmetric positive definite banded solve for the 5-d Laplace problem.
/// Dirichlet zero at `r = r_max` and at both axial boundaries; the axis needs
/// no condition because the `r^3` flux vanishes there.
pub struct StreamSolver {
    grid: RZGrid,
    band: Array2<f64>, // Cholesky factor, band-lower storage
    bw: usize,
    n: usize,
}

impl StreamSolver {
    pub fn new(grid: &RZGrid) -> Result<Self, BackgroundError> {
        let n_r = grid.n_r();
        let n_zi = grid.n_z - 2;
        let n = n_r * n_zi;
        let bw = n_r;
        let dr2 = grid.dr() * grid.dr();
        let dz2 = grid.dz() * grid.dz();
        // assemble symmetric band (lower triangle), row-scaled by r_j^3
        let mut band = Array2::zeros((bw + 1, n));
        let face = |j: usize| -> f64 {
            let rf = j as f64 * grid.dr();
            rf * rf * rf
        };
        for ki in 0..n_zi {
            for j in 0..n_r {
                let idx = ki * n_r + j;
                let r = grid.r(j);
                let r3 = r * r * r;
                let mut diag = (face(j) + face(j + 1)) / dr2 + 2.0 * r3 / dz2;
                if j == n_r - 1 {
                    // Dirichlet face at r_max through the half cell
                    diag += face(n_r) / dr2;
                }
                band[[0, idx]] = diag;
                if j + 1 < n_r {
                    band[[1, idx]] = -face(j + 1) / dr2; // couples (j,ki) - (j+1,ki)
                }
                if ki + 1 < n_zi {
                    band[[bw, idx]] = -r3 / dz2; // couples (j,ki) - (j,ki+1)
                }
            }
        }
        // in-place banded Cholesky
        for i in 0..n {
            let mut d = band[[0, i]];
            let lo = i.saturating_sub(bw);
            for k in lo..i {
                let l = band[[i - k, k]];
                d -= l * l;
            }
            if d <= 0.0 {
                return Err(BackgroundError::Stream(format!(
                    "non-positive pivot {d} at row {i}"
                )));
            }
            let d = d.sqrt();
            band[[0, i]] = d;
            let hi = (i + bw).min(n - 1);
            for jrow in i + 1..=hi {
                let mut s = band[[jrow - i, i]];
                let lo2 = jrow.saturating_sub(bw);
                for k in lo2.max(i.saturating_sub(bw))..i {
                    if jrow - k <= bw {
                        s -= band[[jrow - k, k]] * band[[i - k, k]];
                    }
                }
                band[[jrow - i, i]] = s / d;
            }
        }
        Ok(StreamSolver { grid: grid.clone(), band, bw, n })
    }

    /// Solve for the stream function of a vorticity amplitude field.
    pub fn solve(&self, omega: &ScalarField) -> ScalarField {
        let g = &self.grid;
        let n_r = g.n_r();
        let n_zi = g.n_z - 2;
        let mut rhs = vec![0.0; self.n];
        for ki in 0..n_zi {
            for j in 0..n_r {
                let r = g.r(j);
                rhs[ki * n_r + j] = omega.data[[j, ki + 1]] * r * r * r;
            }
        }
        // forward then backward substitution on the band
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let mut s = rhs[i];
            for k in lo..i {
                s -= self.band[[i - k, k]] * rhs[k];
            }
            rhs[i] = s / self.band[[0, i]];
        }
        for i in (0..self.n).rev() {
            let hi = (i + self.bw).min(self.n - 1);
            let mut s = rhs[i];
            for k in i + 1..=hi {
                s -= self.band[[k - i, i]] * rhs[k];
            }
            rhs[i] = s / self.band[[0, i]];
        }
        let mut phi = ScalarField::zeros(g);
        for ki in 0..n_zi {
            for j in 0..n_r {
                phi.data[[j, ki + 1]] = rhs[ki * n_r + j];
            }
        }
        phi
    }

    /// Apply the discrete operator `-slashed_laplacian` (the flux form that
    /// was assembled and factored) to a field.
    pub fn apply_operator(&self, phi: &ScalarField) -> ScalarField {
        let g = &self.grid;
        let n_r = g.n_r();
        let dr2 = g.dr() * g.dr();
        let dz2 = g.dz() * g.dz();
        let face = |j: usize| -> f64 {
            let rf = j as f64 * g.dr();
            rf * rf * rf
        };
        let mut out = ScalarField::zeros(g);
        for k in 1..g.n_z - 1 {
            for j in 0..n_r {
                let r = g.r(j);
                let r3 = r * r * r;
                let p = phi.data[[j, k]];
                let p_lo = if j == 0 { 0.0 } else { phi.data[[j - 1, k]] };
                let mut radial = if j == 0 {
                    -face(1) * (phi.data[[1, k]] - p)
                } else if j == n_r - 1 {
                    2.0 * face(n_r) * p - face(j) * (p_lo - p)
                } else {
                    -face(j + 1) * (phi.data[[j + 1, k]] - p) - face(j) * (p_lo - p)
                };
                radial /= dr2;
                let axial = -r3 * (phi.data[[j, k + 1]] - 2.0 * p + phi.data[[j, k - 1]]) / dz2;
                out.data[[j, k]] = (radial + axial) / r3;
            }
        }
        out
    }

    /// Residual `||A Phi - Omega||_inf` of a solve against the assembled
    /// operator, over the interior rows. Direct solve: roundoff level.
    pub fn residual_inf(&self, phi: &ScalarField, omega: &ScalarField) -> f64 {
        let applied = self.apply_operator(phi);
        let g = &self.grid;
        let mut m = 0.0f64;
        for j in 0..g.n_r() {
            for k in 1..g.n_z - 1 {
                m = m.max((applied.data[[j, k]] - omega.data[[j, k]]).abs());
            }
        }
        m
    }
}

/// Velocity recovered from the stream function:
/// `V^r = -r dz(Phi)`, `V^z = 2 Phi + r dr(Phi)`.
pub fn velocity_from_stream(phi: &ScalarField) -> (Array2<f64>, Array2<f64>) {
    let g = &phi.grid;
    let dphi_z = calculus::ddz(&phi.data, g);
    let dphi_r = calculus::ddr(&phi.data, g, Parity::Even);
    let mut vr = Array2::zeros((g.n_r(), g.n_z));
    let mut vz = Array2::zeros((g.n_r(), g.n_z));
    for j in 0..g.n_r() {
        let r = g.r(j);
        for k in 0..g.n_z {
            vr[[j, k]] = -r * dphi_z[[j, k]];
            vz[[j, k]] = 2.0 * phi.data[[j, k]] + r * dphi_r[[j, k]];
        }
    }
    (vr, vz)
}

// ---------------------------------------------------------------------------
// Hall background evolution.

/// One output sample of a Hall run.
#[derive(Debug, Clone)]
pub struct HallSample {
    pub t: f64,
    pub h_norms: [f64; 4],
    pub sup_dz_pi_on_chi: f64,
    pub v_inf: f64,
    pub grad_v_l2: f64,
    pub pi_minus_pie_l2: f64,
    pub div_v_inf: f64,
}

pub struct HallTrajectory {
    pub samples: Vec<HallSample>,
    pub omega: ScalarField,
    pub pi: ScalarField,
    pub pi_euler: ScalarField,
    pub velocity: (Array2<f64>, Array2<f64>),
}

pub struct HallConfig {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub n_outputs: usize,
    /// Cutoff scale for the `sup |dz Pi|` monitor window `|z| <= 2 scale`.
    pub chi_scale: f64,
}

/// RK4 evolution of the axisymmetric Hall system
/// `d_t Omega + (V.grad) Omega + 2 Pi dz Pi = nu slashed_laplacian(Omega)`,
/// `d_t Pi + (V.grad) Pi - 2 Pi dz Pi = 0`,
/// together with a co-discretized Burgers reference `Pi_e` (same stencils and
/// integrator, velocity forced to zero) so that the small-time comparison
/// `||Pi - Pi_e||` isolates the velocity coupling instead of scheme error.
pub fn evolve_hall(
    omega0: &ScalarField,
    pi0: &ScalarField,
    cfg: &HallConfig,
) -> Result<HallTrajectory, BackgroundError> {
    let g = omega0.grid.clone();
    let solver = StreamSolver::new(&g)?;
    let min_h = g.dr().min(g.dz());
    if cfg.nu > 0.0 && cfg.nu * cfg.dt > 0.25 * min_h * min_h {
        return Err(BackgroundError::ViscousStability);
    }

    let mut omega = omega0.data.clone();
    let mut pi = pi0.data.clone();
    let mut pie = pi0.data.clone();
    let mut t = 0.0;
    let mut samples = Vec::new();

    let rhs = |omega: &Array2<f64>, pi: &Array2<f64>, pie: &Array2<f64>| {
        let om_field = ScalarField { grid: g.clone(), data: omega.clone() };
        let phi = solver.solve(&om_field);
        let (vr, vz) = velocity_from_stream(&phi);
        let dom_r = calculus::ddr(omega, &g, Parity::Even);
        let dom_z = calculus::ddz(omega, &g);
        let dpi_r = calculus::ddr(pi, &g, Parity::Even);
        let dpi_z = calculus::ddz(pi, &g);
        let dpie_z = calculus::ddz(pie, &g);
        let lap_om = calculus::slashed_laplacian(&om_field);
        let shape = (g.n_r(), g.n_z);
        let mut d_om = Array2::zeros(shape);
        let mut d_pi = Array2::zeros(shape);
        let mut d_pie = Array2::zeros(shape);
        for j in 0..g.n_r() {
            for k in 0..g.n_z {
                let adv_om = vr[[j, k]] * dom_r[[j, k]] + vz[[j, k]] * dom_z[[j, k]];
                let adv_pi = vr[[j, k]] * dpi_r[[j, k]] + vz[[j, k]] * dpi_z[[j, k]];
                d_om[[j, k]] =
                    -adv_om - 2.0 * pi[[j, k]] * dpi_z[[j, k]] + cfg.nu * lap_om.data[[j, k]];
                d_pi[[j, k]] = -adv_pi + 2.0 * pi[[j, k]] * dpi_z[[j, k]];
                d_pie[[j, k]] = 2.0 * pie[[j, k]] * dpie_z[[j, k]];
            }
        }
        (d_om, d_pi, d_pie, vr, vz)
    };

    let record = |t: f64,
                  omega: &Array2<f64>,
                  pi: &Array2<f64>,
                  pie: &Array2<f64>,
                  samples: &mut Vec<HallSample>| {
        let om_field = ScalarField { grid: g.clone(), data: omega.clone() };
        let phi = solver.solve(&om_field);
        let (vr, vz) = velocity_from_stream(&phi);
        let pi_field = ScalarField { grid: g.clone(), data: pi.clone() };
        let mut h_norms = [0.0; 4];
        for (i, h) in h_norms.iter_mut().enumerate() {
            *h = norms::sobolev_norm_scalar(&pi_field, (i + 1) as i32, 2.0).unwrap();
        }
        let dpi_z = calculus::ddz(pi, &g);
        let mut sup_dz = 0.0f64;
        for j in 0..g.n_r() {
            for k in 0..g.n_z {
                if g.z(k).abs() <= 2.0 * cfg.chi_scale {
                    sup_dz = sup_dz.max(dpi_z[[j, k]].abs());
                }
            }
        }
        let mut v_inf = 0.0f64;
        for j in 0..g.n_r() {
            for k in 0..g.n_z {
                let mag = (vr[[j, k]] * vr[[j, k]] + vz[[j, k]] * vz[[j, k]]).sqrt();
                v_inf = v_inf.max(mag);
            }
        }
        // grad V in L^2(r dr dz); divergence-free residual away from boundaries
        let dvr_r = calculus::ddr(&vr, &g, Parity::Odd);
        let dvr_z = calculus::ddz(&vr, &g);
        let dvz_r = calculus::ddr(&vz, &g, Parity::Even);
        let dvz_z = calculus::ddz(&vz, &g);
        let mut acc = 0.0;
        let mut diff = 0.0;
        let mut div_inf = 0.0f64;
        for j in 0..g.n_r() {
            let r = g.r(j);
            for k in 0..g.n_z {
                let w = if k == 0 || k == g.n_z - 1 { 0.5 } else { 1.0 };
                let gsq = dvr_r[[j, k]].powi(2)
                    + dvr_z[[j, k]].powi(2)
                    + dvz_r[[j, k]].powi(2)
                    + dvz_z[[j, k]].powi(2);
                acc += w * gsq * r;
                let d = pi[[j, k]] - pie[[j, k]];
                diff += w * d * d * r;
                if j + 1 < g.n_r() && k > 0 && k + 1 < g.n_z {
                    let div = dvr_r[[j, k]] + vr[[j, k]] / r + dvz_z[[j, k]];
                    div_inf = div_inf.max(div.abs());
                }
            }
        }
        samples.push(HallSample {
            t,
            h_norms,
            sup_dz_pi_on_chi: sup_dz,
            v_inf,
            grad_v_l2: (acc * g.dr() * g.dz()).sqrt(),
            pi_minus_pie_l2: (diff * g.dr() * g.dz()).sqrt(),
            div_v_inf: div_inf,
        });
    };

    record(0.0, &omega, &pi, &pie, &mut samples);
    let n_steps = (cfg.t_end / cfg.dt).round() as usize;
    let out_every = (n_steps / cfg.n_outputs.max(1)).max(1);

    for step in 0..n_steps {
        let (k1_om, k1_pi, k1_pie, vr, vz) = rhs(&omega, &pi, &pie);
        let mut vmax = 0.0f64;
        for j in 0..g.n_r() {
            for k in 0..g.n_z {
                vmax = vmax
                    .max(vr[[j, k]].abs())
                    .max(vz[[j, k]].abs())
                    .max(2.0 * pi[[j, k]].abs());
            }
        }
        if vmax > 0.0 {
            let bound = min_h / vmax;
            if cfg.dt > bound {
                return Err(BackgroundError::Cfl { t, dt: cfg.dt, bound });
            }
        }
        let half = 0.5 * cfg.dt;
        let om2 = &omega + &(&k1_om * half);
        let pi2 = &pi + &(&k1_pi * half);
        let pie2 = &pie + &(&k1_pie * half);
        let (k2_om, k2_pi, k2_pie, _, _) = rhs(&om2, &pi2, &pie2);
        let om3 = &omega + &(&k2_om * half);
        let pi3 = &pi + &(&k2_pi * half);
        let pie3 = &pie + &(&k2_pie * half);
        let (k3_om, k3_pi, k3_pie, _, _) = rhs(&om3, &pi3, &pie3);
        let om4 = &omega + &(&k3_om * cfg.dt);
        let pi4 = &pi + &(&k3_pi * cfg.dt);
        let pie4 = &pie + &(&k3_pie * cfg.dt);
        let (k4_om, k4_pi, k4_pie, _, _) = rhs(&om4, &pi4, &pie4);
        let w = cfg.dt / 6.0;
        omega = &omega + &((&(&k1_om + &(&k2_om * 2.0)) + &(&(&k3_om * 2.0) + &k4_om)) * w);
        pi = &pi + &((&(&k1_pi + &(&k2_pi * 2.0)) + &(&(&k3_pi * 2.0) + &k4_pi)) * w);
        pie = &pie + &((&(&k1_pie + &(&k2_pie * 2.0)) + &(&(&k3_pie * 2.0) + &k4_pie)) * w);
        hyperviscous_filter(&mut omega);
        t += cfg.dt;
        if omega.iter().any(|v| !v.is_finite()) || pi.iter().any(|v| !v.is_finite()) {
            return Err(BackgroundError::Diverged { last_valid: t - cfg.dt });
        }
        if (step + 1) % out_every == 0 || step + 1 == n_steps {
            record(t, &omega, &pi, &pie, &mut samples);
        }
    }

    let om_field = ScalarField { grid: g.clone(), data: omega };
    let phi = solver.solve(&om_field);
    let velocity = velocity_from_stream(&phi);
    Ok(HallTrajectory {
        samples,
        omega: om_field,
        pi: ScalarField { grid: g.clone(), data: pi },
        pi_euler: ScalarField { grid: g.clone(), data: pie },
        velocity,
    })
}

/// Weak fourth-difference filter, coefficient 1e-2, applied per direction.
fn hyperviscous_filter(u: &mut Array2<f64>) {
    let eps = 1e-2;
    let (n_r, n_z) = (u.shape()[0], u.shape()[1]);
    let orig = u.clone();
    let at = |j: isize, k: isize| -> f64 {
        if j < 0 || k < 0 || j >= n_r as isize || k >= n_z as isize {
            0.0
        } else {
            orig[[j as usize, k as usize]]
        }
    };
    for j in 0..n_r as isize {
        for k in 0..n_z as isize {
            let d4r = at(j - 2, k) - 4.0 * at(j - 1, k) + 6.0 * at(j, k) - 4.0 * at(j + 1, k)
                + at(j + 2, k);
            let d4z = at(j, k - 2) - 4.0 * at(j, k - 1) + 6.0 * at(j, k) - 4.0 * at(j, k + 1)
                + at(j, k + 2);
            u[[j as usize, k as usize]] -= eps * (d4r + d4z);
        }
    }
}

/// Ratio `sup_t ||Pi(t)||_{H^m} / ||Pi(0)||_{H^m}` with a flag when it
/// exceeds 10.
pub struct AprioriReport {
    pub ratio: f64,
    pub bounded: bool,
}

pub fn apriori_monitor(samples: &[HallSample], m: usize) -> AprioriReport {
    assert!((1..=4).contains(&m));
    let initial = samples[0].h_norms[m - 1];
    let sup = samples.iter().fold(0.0f64, |a, s| a.max(s.h_norms[m - 1]));
    let ratio = sup / initial;
    AprioriReport { ratio, bounded: ratio <= 10.0 }
}

/// `||Pi(t) - Pi0 - 2 t Pi0 dz(Pi0)||_{H^m} / t^2` for the small-time Taylor
/// comparison; the first-order coefficient comes from `d_t Pi = 2 Pi dz Pi`.
/// `z_window` restricts the measured region (data that do not vanish at the
/// axial boundary pick up resampling clamp artifacts there).
pub fn taylor_residual(
    pi_t: &ScalarField,
    pi0: &ScalarField,
    t: f64,
    m: i32,
    z_window: Option<f64>,
) -> f64 {
    let g = &pi0.grid;
    let dz0 = calculus::ddz(&pi0.data, g);
    let mut res = ScalarField::zeros(g);
    for j in 0..g.n_r() {
        for k in 0..g.n_z {
            if let Some(w) = z_window {
                if g.z(k).abs() > w {
                    continue;
                }
            }
            res.data[[j, k]] = pi_t.data[[j, k]]
                - pi0.data[[j, k]]
                - 2.0 * t * pi0.data[[j, k]] * dz0[[j, k]];
        }
    }
    norms::sobolev_norm_scalar(&res, m, 2.0).unwrap() / (t * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RZGrid;

    #[test]
    fn z_independent_data_is_stationary() {
        let g = RZGrid::new(1.0, 8, 1.0, 33).unwrap();
        let p0 = ScalarField::from_fn(&g, |r, _| r * (1.0 - r));
        let sol = BurgersSolution::new(p0.clone());
        assert_eq!(sol.shock_time(), f64::INFINITY);
        let pt = sol.eval(5.0).unwrap();
        for j in 0..g.n_r() {
            for k in 0..g.n_z {
                assert!((pt.data[[j, k]] - p0.data[[j, k]]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn linear_patch_evolves_as_rarefaction() {
        // Pi0 = z has dz Pi0 = 1, shock at t = 1/2, and Pi(t, z) = z/(1-2t).
        let g = RZGrid::new(1.0, 4, 1.0, 201).unwrap();
        let p0 = ScalarField::from_fn(&g, |_, z| z);
        let sol = BurgersSolution::new(p0);
        assert!((sol.shock_time() - 0.5).abs() < 1e-10);
        let t = 0.2;
        let pt = sol.eval(t).unwrap();
        for k in 0..g.n_z {
            let z = g.z(k);
            if z.abs() < 0.5 {
                let expect = z / (1.0 - 2.0 * t);
                assert!(
                    (pt.data[[1, k]] - expect).abs() < 1e-8,
                    "z={z}: {} vs {expect}",
                    pt.data[[1, k]]
                );
            }
        }
    }

    #[test]
    fn shock_time_matches_slope() {
        let g = RZGrid::new(1.0, 4, 2.0, 401).unwrap();
        // slope 2 at the origin, compactly modulated
        let p0 = ScalarField::from_fn(&g, |_, z| 2.0 * z * (-(z * z)).exp());
        let shock = shock_time(&p0);
        assert!((shock - 0.25).abs() < 0.01, "shock {shock}");
    }

    #[test]
    fn lemma_window_keeps_plateau_exact() {
        // Pi0 = f(r) chi(z/10): dz Pi = 0 on |z| <= 2 ell for t <= 4 ell.
        let p = RadialProfile::linear_capped(1.0 / 40.0, 1.0 / 20.0).unwrap();
        let ell = p.ell;
        let g = RZGrid::new(0.125, 24, 25.0 * ell, 257).unwrap();
        let p0 = emhd_initial(&p, &g);
        let sol = BurgersSolution::new(p0);
        let t = 4.0 * ell;
        assert!(t < sol.shock_time(), "window must precede the shock");
        let pt = sol.eval(t).unwrap();
        for j in 0..g.n_r() {
            let f = p.eval(g.r(j));
            for k in 0..g.n_z {
                if g.z(k).abs() <= 2.0 * ell {
                    assert!(
                        (pt.data[[j, k]] - f).abs() < 1e-13,
                        "plateau moved at r={}, z={}",
                        g.r(j),
                        g.z(k)
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_invariant_conserved() {
        let p = RadialProfile::linear_capped(1.0 / 40.0, 1.0 / 20.0).unwrap();
        let g = RZGrid::new(0.125, 24, 25.0 * p.ell, 257).unwrap();
        let p0 = emhd_initial(&p, &g);
        let sol = BurgersSolution::new(p0);
        let q0 = sol.quadratic_invariant(0.0).unwrap();
        let q1 = sol.quadratic_invariant(2.0 * p.ell).unwrap();
        assert!((q1 - q0).abs() < 1e-6 * q0, "drift {}", ((q1 - q0) / q0).abs());
    }

    #[test]
    fn finite_speed_cone() {
        let g = RZGrid::new(1.0, 4, 4.0, 257).unwrap();
        let base = ScalarField::from_fn(&g, |_, z| 0.3 * (-(z * z)).exp());
        assert!(finite_speed_check(&base, &base, 0.5, 1e-10).unwrap());
        // differ far outside the cone: still agree inside it
        let far = ScalarField::from_fn(&g, |_, z| {
            0.3 * (-(z * z)).exp() + 0.2 * (-(z - 3.0) * (z - 3.0) * 40.0).exp()
        });
        assert!(finite_speed_check(&base, &far, 0.3, 1e-8).unwrap());
        // differ inside: solutions must disagree somewhere
        let near = ScalarField::from_fn(&g, |_, z| {
            0.3 * (-(z * z)).exp() + 0.1 * (-(z * z) * 30.0).exp()
        });
        let sa = BurgersSolution::new(base.clone());
        let sb = BurgersSolution::new(near.clone());
        let at = sa.eval(0.3).unwrap();
        let bt = sb.eval(0.3).unwrap();
        let mut differs = false;
        for k in 0..g.n_z {
            if (at.data[[1, k]] - bt.data[[1, k]]).abs() > 1e-6 {
                differs = true;
            }
        }
        assert!(differs);
    }

    #[test]
    fn stream_solver_zero_and_manufactured() {
        let g = RZGrid::new(4.0, 48, 4.0, 49).unwrap();
        let solver = StreamSolver::new(&g).unwrap();
        let zero = ScalarField::zeros(&g);
        let phi0 = solver.solve(&zero);
        assert!(phi0.max_abs() < 1e-14);

        // manufactured: Phi* = exp(-(r^2+z^2)), Omega := -slashed_lap(Phi*)
        let phi_star = |r: f64, z: f64| (-(r * r + z * z)).exp();
        let omega = ScalarField::from_fn(&g, |r, z| {
            let e = phi_star(r, z);
            let drr = (4.0 * r * r - 2.0) * e;
            let dr_term = 3.0 / r * (-2.0 * r) * e;
            let dzz = (4.0 * z * z - 2.0) * e;
            -(drr + dr_term + dzz)
        });
        let phi = solver.solve(&omega);
        let res = solver.residual_inf(&phi, &omega);
        let omega_inf = omega.max_abs();
        assert!(res / omega_inf < 1e-8, "plug-back residual {res}");
        let mut worst = 0.0f64;
        for j in 0..g.n_r() - 4 {
            for k in 2..g.n_z - 2 {
                worst = worst.max((phi.data[[j, k]] - phi_star(g.r(j), g.z(k))).abs());
            }
        }
        let h2 = g.dr() * g.dr() + g.dz() * g.dz();
        assert!(worst < 3.0 * h2, "manufactured solution error {worst} vs h^2 {h2}");
    }

    #[test]
    fn hall_zero_data_stays_zero() {
        let g = RZGrid::new(1.0, 16, 1.0, 17).unwrap();
        let zero = ScalarField::zeros(&g);
        let cfg = HallConfig { nu: 0.0, dt: 1e-3, t_end: 1e-2, n_outputs: 2, chi_scale: 0.1 };
        let traj = evolve_hall(&zero, &zero, &cfg).unwrap();
        assert!(traj.pi.max_abs() == 0.0 && traj.omega.max_abs() == 0.0);
    }

    #[test]
    fn taylor_residual_of_linear_patch() {
        // Pi0 = z: Pi(t) = z/(1-2t) = z(1 + 2t + 4t^2 + ...), so
        // (Pi - Pi0 - 2t Pi0 dz Pi0)/t^2 -> 4 ||z|| as t -> 0.
        let g = RZGrid::new(1.0, 4, 0.5, 401).unwrap();
        let p0 = ScalarField::from_fn(&g, |_, z| z);
        let sol = BurgersSolution::new(p0.clone());
        let t = 1e-3;
        let pt = sol.eval(t).unwrap();
        let window = 0.4;
        let res = taylor_residual(&pt, &p0, t, 0, Some(window));
        let masked = ScalarField::from_fn(&g, |_, z| if z.abs() <= window { z } else { 0.0 });
        let z_norm = norms::sobolev_norm_scalar(&masked, 0, 2.0).unwrap();
        assert!(
            (res - 4.0 * z_norm).abs() < 0.05 * (4.0 * z_norm),
            "residual/t^2 = {res}, expected {}",
            4.0 * z_norm
        );
    }
}
