//! Compactly supported right inverse of the divergence on axis-centered
//! cylinders.
//!
//! The kernel is `G_U(x,y) = int_0^1 (x-y)/s w_U(y + (x-y)/s) s^-3 ds`; in
//! the variable `u = 1/s` the integrand is supported on an analytically
//! computed window `[max(1, u_-), u_+]` where the ray from `y` through `x`
//! crosses the mollifier ball, and is smooth there, so a fixed Gauss-Legendre
//! rule converges fast. With a radial mollifier centered on the axis the
//! operator commutes with rotations, hence with `d_theta`, without any
//! angular averaging: the paper's averaged kernel coincides with `G_U`.
//!
//! For a single-mode source `Re(S(r,z) e^{i m theta})` the output is again a
//! single mode and reduces to a 2-d integral against the `m`-th angular
//! Fourier coefficient of the kernel.

use crate::bump::{Cutoff, UnitBump3};
use crate::packet::Snapshot;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

type C64 = Complex64;

#[derive(Debug, Error, PartialEq)]
pub enum BogovskiiError {
    #[error("source is not mean-zero: |mean| = {mean} exceeds 1e-8 * ||g||_L1 = {tol}")]
    NotMeanZero { mean: f64, tol: f64 },
    #[error("source support leaks outside the cylinder (cell {0:?})")]
    SupportViolation([usize; 3]),
    #[error("correction support exceeds the domain: need L >= {need}, have {have}")]
    DomainTooSmall { need: f64, have: f64 },
}

/// Gauss-Legendre rule on `[0, 1]`.
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..n {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[k] = 0.5 * (1.0 - x); // map [-1,1] -> [0,1], reversed order
            weights[k] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Axis-centered cylinder `{ |(x,y)| < L, |z| < L }` with mollifier ball of
/// radius `i(U) = L/4` at the origin.
pub struct CylinderDomain {
    pub half_width: f64,
    pub inner_radius: f64,
    bump: UnitBump3,
}

impl CylinderDomain {
    pub fn new(half_width: f64) -> Self {
        CylinderDomain { half_width, inner_radius: 0.25 * half_width, bump: UnitBump3::new() }
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        let rho2 = p[0] * p[0] + p[1] * p[1];
        rho2 < self.half_width * self.half_width && p[2].abs() < self.half_width
    }

    /// `w_U(p) = i(U)^-3 w(p / i(U))`, radial, unit mass.
    pub fn mollifier(&self, p: [f64; 3]) -> f64 {
        let i = self.inner_radius;
        let r2 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (i * i);
        self.bump.eval_r2(r2) / (i * i * i)
    }

    /// Integration window in `u = 1/s`: the ray `y + u d` meets the
    /// mollifier ball for `u` in `(u_-, u_+)`; only `u >= 1` contributes.
    #[inline]
    fn window(&self, y: [f64; 3], d: [f64; 3]) -> Option<(f64, f64)> {
        let dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        if dd < 1e-28 {
            return None;
        }
        let cd = y[0] * d[0] + y[1] * d[1] + y[2] * d[2];
        let cc = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        let r2 = self.inner_radius * self.inner_radius;
        let disc = cd * cd - dd * (cc - r2);
        if disc <= 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let u_lo = ((-cd - sq) / dd).max(1.0);
        let u_hi = (-cd + sq) / dd;
        if u_hi <= u_lo {
            None
        } else {
            Some((u_lo, u_hi))
        }
    }

    /// Kernel `G_U(x, y)` by Gauss-Legendre quadrature over the window
    /// (`int d u^2 w_U(y + u d) du` after the substitution `u = 1/s`).
    pub fn kernel(&self, x: [f64; 3], y: [f64; 3], gl: &GaussLegendre) -> [f64; 3] {
        let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        let Some((u_lo, u_hi)) = self.window(y, d) else {
            return [0.0; 3];
        };
        let span = u_hi - u_lo;
        let mut acc = 0.0;
        for (t, w) in gl.nodes.iter().zip(&gl.weights) {
            let u = u_lo + span * t;
            let p = [y[0] + u * d[0], y[1] + u * d[1], y[2] + u * d[2]];
            acc += w * u * u * self.mollifier(p);
        }
        let s = acc * span;
        [d[0] * s, d[1] * s, d[2] * s]
    }

    /// Brute-force reference: midpoint rule in the original `s` variable.
    pub fn kernel_bruteforce(&self, x: [f64; 3], y: [f64; 3], n: usize) -> [f64; 3] {
        let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        let h = 1.0 / n as f64;
        let mut out = [0.0; 3];
        for k in 0..n {
            let s = (k as f64 + 0.5) * h;
            let p = [y[0] + d[0] / s, y[1] + d[1] / s, y[2] + d[2] / s];
            let w = self.mollifier(p);
            if w > 0.0 {
                let c = w / (s * s * s * s) * h;
                out[0] += d[0] * c;
                out[1] += d[1] * c;
                out[2] += d[2] * c;
            }
        }
        out
    }
}

/// Cell-centered cube grid on `[-L, L]^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeGrid {
    pub l: f64,
    pub n: usize,
}

impl CubeGrid {
    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.l + (i as f64 + 0.5) * self.h()
    }

    pub fn point(&self, idx: [usize; 3]) -> [f64; 3] {
        [self.coord(idx[0]), self.coord(idx[1]), self.coord(idx[2])]
    }

    #[inline]
    pub fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn volume_element(&self) -> f64 {
        let h = self.h();
        h * h * h
    }
}

/// Scalar source on a cube grid, validated for the right-inverse
/// preconditions.
pub struct DivData {
    pub grid: CubeGrid,
    pub data: Vec<f64>,
}

impl DivData {
    pub fn new(grid: CubeGrid, data: Vec<f64>, dom: &CylinderDomain) -> Result<Self, BogovskiiError> {
        assert_eq!(data.len(), grid.n * grid.n * grid.n);
        let dv = grid.volume_element();
        let mut mean = 0.0;
        let mut l1 = 0.0;
        for i in 0..grid.n {
            for j in 0..grid.n {
                for k in 0..grid.n {
                    let v = data[grid.flat(i, j, k)];
                    mean += v * dv;
                    l1 += v.abs() * dv;
                    if v != 0.0 && !dom.contains(grid.point([i, j, k])) {
                        return Err(BogovskiiError::SupportViolation([i, j, k]));
                    }
                }
            }
        }
        let tol = 1e-8 * l1;
        if mean.abs() > tol.max(1e-300) {
            return Err(BogovskiiError::NotMeanZero { mean: mean.abs(), tol });
        }
        Ok(DivData { grid, data })
    }
}

/// Apply the right inverse to a batch of sources sharing one kernel sweep.
/// Near-diagonal source cells are subdivided 4x per axis so the concentrated
/// part of the kernel is integrated accurately.
pub fn div_inverse_batch(
    dom: &CylinderDomain,
    grid: &CubeGrid,
    sources: &[&[f64]],
) -> Vec<Vec<[f64; 3]>> {
    let n = grid.n;
    let gl = GaussLegendre::new(12);
    let dv = grid.volume_element();
    let n_src = sources.len();
    let total = n * n * n;
    let results: Vec<Vec<[f64; 3]>> = (0..total)
        .into_par_iter()
        .map(|t| {
            let ti = t / (n * n);
            let tj = (t / n) % n;
            let tk = t % n;
            let x = grid.point([ti, tj, tk]);
            let mut acc = vec![[0.0f64; 3]; n_src];
            for si in 0..n {
                for sj in 0..n {
                    for sk in 0..n {
                        let sflat = grid.flat(si, sj, sk);
                        let mut any = false;
                        for src in sources {
                            if src[sflat] != 0.0 {
                                any = true;
                                break;
                            }
                        }
                        if !any {
                            continue;
                        }
                        let y = grid.point([si, sj, sk]);
                        let near = ti.abs_diff(si) <= 2 && tj.abs_diff(sj) <= 2 && tk.abs_diff(sk) <= 2;
                        let g = if near {
                            // refine the cell 4x4x4
                            let h = grid.h();
                            let sub = 4;
                            let hh = h / sub as f64;
                            let mut gsum = [0.0f64; 3];
                            for a in 0..sub {
                                for b in 0..sub {
                                    for c in 0..sub {
                                        let yy = [
                                            y[0] - 0.5 * h + (a as f64 + 0.5) * hh,
                                            y[1] - 0.5 * h + (b as f64 + 0.5) * hh,
                                            y[2] - 0.5 * h + (c as f64 + 0.5) * hh,
                                        ];
                                        let k = dom.kernel(x, yy, &gl);
                                        gsum[0] += k[0];
                                        gsum[1] += k[1];
                                        gsum[2] += k[2];
                                    }
                                }
                            }
                            let scale = 1.0 / (sub * sub * sub) as f64;
                            [gsum[0] * scale, gsum[1] * scale, gsum[2] * scale]
                        } else {
                            dom.kernel(x, y, &gl)
                        };
                        if g[0] == 0.0 && g[1] == 0.0 && g[2] == 0.0 {
                            continue;
                        }
                        for (m, src) in sources.iter().enumerate() {
                            let v = src[sflat] * dv;
                            if v != 0.0 {
                                acc[m][0] += g[0] * v;
                                acc[m][1] += g[1] * v;
                                acc[m][2] += g[2] * v;
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();
    // transpose: per-source fields
    let mut out = vec![vec![[0.0f64; 3]; total]; n_src];
    for (t, acc) in results.into_iter().enumerate() {
        for (m, v) in acc.into_iter().enumerate() {
            out[m][t] = v;
        }
    }
    out
}

pub fn div_inverse(dom: &CylinderDomain, g: &DivData) -> Vec<[f64; 3]> {
    div_inverse_batch(dom, &g.grid, &[&g.data]).remove(0)
}

/// Finite-difference divergence of a vector sample field on the cube grid.
pub fn divergence_fd(grid: &CubeGrid, h: &[[f64; 3]]) -> Vec<f64> {
    let n = grid.n;
    let dx = grid.h();
    let mut out = vec![0.0; n * n * n];
    let get = |c: usize, i: isize, j: isize, k: isize| -> f64 {
        if i < 0 || j < 0 || k < 0 || i >= n as isize || j >= n as isize || k >= n as isize {
            0.0
        } else {
            h[grid.flat(i as usize, j as usize, k as usize)][c]
        }
    };
    for i in 0..n as isize {
        for j in 0..n as isize {
            for k in 0..n as isize {
                let d = (get(0, i + 1, j, k) - get(0, i - 1, j, k)
                    + get(1, i, j + 1, k)
                    - get(1, i, j - 1, k)
                    + get(2, i, j, k + 1)
                    - get(2, i, j, k - 1))
                    / (2.0 * dx);
                out[grid.flat(i as usize, j as usize, k as usize)] = d;
            }
        }
    }
    out
}

pub fn l2_scalar(grid: &CubeGrid, g: &[f64]) -> f64 {
    (g.iter().map(|v| v * v).sum::<f64>() * grid.volume_element()).sqrt()
}

pub fn l2_vector(grid: &CubeGrid, h: &[[f64; 3]]) -> f64 {
    (h.iter().map(|v| v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sum::<f64>()
        * grid.volume_element())
    .sqrt()
}

/// `||grad h||_{L^2}` by centered differences.
pub fn grad_l2(grid: &CubeGrid, h: &[[f64; 3]]) -> f64 {
    let n = grid.n;
    let dx = grid.h();
    let get = |c: usize, i: isize, j: isize, k: isize| -> f64 {
        if i < 0 || j < 0 || k < 0 || i >= n as isize || j >= n as isize || k >= n as isize {
            0.0
        } else {
            h[grid.flat(i as usize, j as usize, k as usize)][c]
        }
    };
    let mut acc = 0.0;
    for i in 0..n as isize {
        for j in 0..n as isize {
            for k in 0..n as isize {
                for c in 0..3 {
                    let gx = (get(c, i + 1, j, k) - get(c, i - 1, j, k)) / (2.0 * dx);
                    let gy = (get(c, i, j + 1, k) - get(c, i, j - 1, k)) / (2.0 * dx);
                    let gz = (get(c, i, j, k + 1) - get(c, i, j, k - 1)) / (2.0 * dx);
                    acc += gx * gx + gy * gy + gz * gz;
                }
            }
        }
    }
    (acc * grid.volume_element()).sqrt()
}

// ---------------------------------------------------------------------------
// Single-angular-mode path.

/// Single-mode scalar source `Re(S(r, z) e^{i m theta})` sampled on a tensor
/// product of radial and axial nodes (uniform spacings).
pub struct ModeSource {
    pub m: i64,
    pub r_nodes: Vec<f64>,
    pub z_nodes: Vec<f64>,
    /// `data[ir][iz]`
    pub data: Vec<Vec<C64>>,
}

/// Mode amplitudes of the output field in the orthonormal cylindrical frame
/// `(e_r, e_theta, e_z)` at the requested targets.
pub fn div_inverse_mode(
    dom: &CylinderDomain,
    src: &ModeSource,
    targets: &[(f64, f64)],
    n_theta: usize,
) -> Vec<[C64; 3]> {
    let gl = GaussLegendre::new(12);
    let dr = if src.r_nodes.len() > 1 { src.r_nodes[1] - src.r_nodes[0] } else { 1.0 };
    let dz = if src.z_nodes.len() > 1 { src.z_nodes[1] - src.z_nodes[0] } else { 1.0 };
    let dth = 2.0 * std::f64::consts::PI / n_theta as f64;
    // precompute angular tables
    let trig: Vec<(f64, f64, C64)> = (0..n_theta)
        .map(|q| {
            let th = (q as f64 + 0.5) * dth;
            (th.cos(), th.sin(), C64::from_polar(1.0, src.m as f64 * th))
        })
        .collect();
    targets
        .par_iter()
        .map(|&(rt, zt)| {
            let x = [rt, 0.0, zt];
            let mut out = [C64::new(0.0, 0.0); 3];
            for (ir, &rs) in src.r_nodes.iter().enumerate() {
                for (iz, &zs) in src.z_nodes.iter().enumerate() {
                    let s = src.data[ir][iz];
                    if s.norm_sqr() == 0.0 {
                        continue;
                    }
                    let wvol = rs * dr * dz * dth;
                    for &(cth, sth, phase) in &trig {
                        let y = [rs * cth, rs * sth, zs];
                        let g = dom.kernel(x, y, &gl);
                        if g[0] == 0.0 && g[1] == 0.0 && g[2] == 0.0 {
                            continue;
                        }
                        let amp = s * phase * wvol;
                        out[0] += amp * g[0];
                        out[1] += amp * g[1];
                        out[2] += amp * g[2];
                    }
                }
            }
            // at theta = 0 the Cartesian components coincide with the
            // orthonormal cylindrical frame components
            out
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Divergence-free initial data b0 = chi b~0 - div^{-1}(chi' b~0^z).

pub struct DivFreeReport {
    /// relative size of the correction: ||zeta|| / ||chi b~0||
    pub correction_fraction: f64,
    /// pairing defect |<b0, chi b~0> - lχ^(1/2) ||b0|| ||b~0||| (relative)
    pub pairing_defect: f64,
    /// max |div b0| at mode level over the probe grid
    pub div_sup: f64,
    /// edge-to-peak ratio of |zeta| on the target box (decay check)
    pub zeta_edge_ratio: f64,
}

/// Assemble the divergence-free data from a packet snapshot at t = 0 and
/// report the pairing bookkeeping of the construction.
pub fn divfree_initial_data(
    snapshot: &Snapshot,
    chi: &Cutoff,
    dom: &CylinderDomain,
    n_theta: usize,
) -> Result<DivFreeReport, BogovskiiError> {
    let m = snapshot.lambda as i64;
    // source: chi'(z) * b~z(r) on the chi' bands
    let need = snapshot.r.last().copied().unwrap_or(0.0).max(2.0 * chi.scale);
    if dom.half_width < need {
        return Err(BogovskiiError::DomainTooSmall { need, have: dom.half_width });
    }
    // radial nodes: subsample the snapshot eta grid to a uniform r grid that
    // resolves the radial oscillation
    let r_lo = snapshot.r[0];
    let r_hi = *snapshot.r.last().unwrap();
    let f_min = snapshot.f.iter().cloned().fold(f64::INFINITY, f64::min).max(1e-12);
    let wavelength = 2.0 * std::f64::consts::PI * f_min / snapshot.lambda as f64;
    let nr = (((r_hi - r_lo) / (wavelength / 10.0)).ceil() as usize).clamp(16, 4000);
    let dr = (r_hi - r_lo) / nr as f64;
    let r_nodes: Vec<f64> = (0..nr).map(|j| r_lo + (j as f64 + 0.5) * dr).collect();
    let bz_at = |r: f64| -> C64 {
        // linear interpolation in the snapshot's r table
        if r <= snapshot.r[0] || r >= *snapshot.r.last().unwrap() {
            return C64::new(0.0, 0.0);
        }
        let mut lo = 0;
        let mut hi = snapshot.r.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if snapshot.r[mid] <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = (r - snapshot.r[lo]) / (snapshot.r[lo + 1] - snapshot.r[lo]);
        let mm = snapshot.m_bz[lo] * (1.0 - t) + snapshot.m_bz[lo + 1] * t;
        let ph = snapshot.phase[lo] * (1.0 - t) + snapshot.phase[lo + 1] * t;
        mm * C64::from_polar(1.0, snapshot.lambda as f64 * ph)
    };
    let psi_at = |r: f64| -> C64 {
        if r <= snapshot.r[0] || r >= *snapshot.r.last().unwrap() {
            return C64::new(0.0, 0.0);
        }
        let mut lo = 0;
        let mut hi = snapshot.r.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if snapshot.r[mid] <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = (r - snapshot.r[lo]) / (snapshot.r[lo + 1] - snapshot.r[lo]);
        let mm = snapshot.m_psi[lo] * (1.0 - t) + snapshot.m_psi[lo + 1] * t;
        let ph = snapshot.phase[lo] * (1.0 - t) + snapshot.phase[lo + 1] * t;
        mm * C64::from_polar(1.0, snapshot.lambda as f64 * ph)
    };
    // axial nodes across the chi' support
    let nz = 48;
    let z_max = 2.0 * chi.scale;
    let dz = 2.0 * z_max / nz as f64;
    let z_nodes: Vec<f64> = (0..nz).map(|k| -z_max + (k as f64 + 0.5) * dz).collect();
    let data: Vec<Vec<C64>> = r_nodes
        .iter()
        .map(|&r| z_nodes.iter().map(|&z| chi.d1(z) * bz_at(r)).collect())
        .collect();
    let src = ModeSource { m, r_nodes: r_nodes.clone(), z_nodes: z_nodes.clone(), data };

    // targets: source box inflated radially and axially
    let span_r = r_hi - r_lo;
    let t_r_lo = (r_lo - 1.5 * span_r).max(0.05 * r_lo);
    let t_r_hi = (r_hi + 1.5 * span_r).min(dom.half_width * 0.98);
    let nt_r = 72;
    let dt_r = (t_r_hi - t_r_lo) / nt_r as f64;
    let t_z_hi = (z_max * 2.0).min(dom.half_width * 0.98);
    let nt_z = 64;
    let dt_z = 2.0 * t_z_hi / nt_z as f64;
    let mut targets = Vec::new();
    for a in 0..nt_r {
        for b in 0..nt_z {
            targets.push((
                t_r_lo + (a as f64 + 0.5) * dt_r,
                -t_z_hi + (b as f64 + 0.5) * dt_z,
            ));
        }
    }
    let zeta_raw = div_inverse_mode(dom, &src, &targets, n_theta);
    // zeta = -div^{-1}(chi' b~z)
    let zeta: Vec<[C64; 3]> = zeta_raw
        .into_iter()
        .map(|v| [-v[0], -v[1], -v[2]])
        .collect();

    // quadrature helpers over the target grid (mode fields: <Re A, Re B> over
    // theta gives pi Re(A conj(B)))
    let pi = std::f64::consts::PI;
    let mut zeta_norm_sq = 0.0;
    let mut cross = 0.0; // < zeta, chi b~0 >
    let mut peak = 0.0f64;
    let mut edge = 0.0f64;
    for (idx, &(r, z)) in targets.iter().enumerate() {
        let w = r * dt_r * dt_z;
        let zv = &zeta[idx];
        let mag = (zv[0].norm_sqr() + zv[1].norm_sqr() + zv[2].norm_sqr()).sqrt();
        zeta_norm_sq += pi * mag * mag * w;
        peak = peak.max(mag);
        let on_edge = idx % nt_z == 0
            || idx % nt_z == nt_z - 1
            || idx / nt_z == 0
            || idx / nt_z == nt_r - 1;
        if on_edge {
            edge = edge.max(mag);
        }
        // chi b~0 components in the orthonormal frame:
        // b^r = i m psi / r, phys theta = -d_r psi, z = bz
        let chi_v = chi.eval(z);
        if chi_v != 0.0 {
            let a_psi = psi_at(r);
            let dr_h = 1e-3 * dr;
            let dpsi = (psi_at(r + dr_h) - psi_at(r - dr_h)) / (2.0 * dr_h);
            let b_r = C64::new(0.0, m as f64) * a_psi / r;
            let b_t = -dpsi;
            let b_z = bz_at(r);
            let dot = (zv[0] * b_r.conj() + zv[1] * b_t.conj() + zv[2] * b_z.conj()).re;
            cross += pi * chi_v * dot * w;
        }
    }

    // z-independent packet norms
    let b_xy = snapshot.b_l2();
    let chi2 = chi.mass_l2sq();
    let chib_sq = chi2 * b_xy * b_xy;
    let pairing = chib_sq + cross;
    let b0_sq = chib_sq + 2.0 * cross + zeta_norm_sq;
    let rhs = chi2.sqrt() * b0_sq.sqrt() * b_xy;
    let pairing_defect = (pairing - rhs).abs() / rhs;

    // mode-level divergence residual of b0 on a probe grid inside the plateau
    // region: div(chi b~0) + div zeta = chi' b~z + div zeta must vanish.
    let mut div_sup = 0.0f64;
    let probe_pts: Vec<(f64, f64)> = (0..24)
        .flat_map(|a| {
            (0..12).map(move |b| {
                (
                    r_lo + span_r * (a as f64 + 0.5) / 24.0,
                    -1.8 * chi.scale + 3.6 * chi.scale * (b as f64 + 0.5) / 12.0,
                )
            })
        })
        .collect();
    let hz = 0.35 * dt_z;
    let hr = 0.35 * dt_r;
    let mut stencil = Vec::new();
    for &(r, z) in &probe_pts {
        stencil.push((r + hr, z));
        stencil.push((r - hr, z));
        stencil.push((r, z + hz));
        stencil.push((r, z - hz));
        stencil.push((r, z));
    }
    let zeta_probe = div_inverse_mode(dom, &src, &stencil, n_theta);
    let mut scale = 0.0f64;
    for (q, &(r, z)) in probe_pts.iter().enumerate() {
        let zp = |k: usize, c: usize| -zeta_probe[5 * q + k][c];
        // div in cylindrical frame components:
        // dr(zr) + zr/r + i m (ztheta_phys)/r + dz(zz)
        let d_r = (zp(0, 0) - zp(1, 0)).re / (2.0 * hr);
        let d_r_im = (zp(0, 0) - zp(1, 0)).im / (2.0 * hr);
        let zr = -zeta_probe[5 * q + 4][0];
        let zt = -zeta_probe[5 * q + 4][1];
        let d_z = (zp(2, 2) - zp(3, 2)) / (2.0 * hz);
        let im = C64::new(0.0, m as f64);
        let div_zeta = C64::new(d_r, d_r_im) + zr / r + im * zt / r + d_z;
        let forcing = chi.d1(z) * bz_at(r);
        let res = (div_zeta + forcing).norm();
        div_sup = div_sup.max(res);
        scale = scale.max(forcing.norm());
    }
    if scale > 0.0 {
        div_sup /= scale;
    }

    Ok(DivFreeReport {
        correction_fraction: zeta_norm_sq.sqrt() / chib_sq.sqrt(),
        pairing_defect,
        div_sup,
        zeta_edge_ratio: if peak > 0.0 { edge / peak } else { 0.0 },
    })
}
