//! The stretched radial coordinate `eta` with `eta'(r) = 1/f(r)` and
//! `eta(r1) = 0`, together with everything the wave-packet construction
//! derives from it: `f_*(eta) = f/r`, the characteristic speed
//! `c = sqrt(1 - f_*^2)`, the phase integral and the travel-time coordinate.
//!
//! `eta -> -infinity` as `r -> r0+`; the chart is truncated where `f` falls
//! below `f_floor` and continued with `f_* = 0` exactly (straight
//! characteristics). The envelope support never reaches the truncation in
//! finite time, so the continuation is invisible to measured quantities.

use crate::profile::RadialProfile;
use thiserror::Error;

pub const F_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ChartError {
    #[error("profile is not positive on (r0, r1): f({r}) = {f}")]
    NonPositive { r: f64, f: f64 },
    #[error("wave speed degenerate: f_* = {0} has magnitude >= 1")]
    SupersonicProfile(f64),
}

/// Tabulated chart data on a uniform `eta` grid from `eta_min` to 0.
pub struct EtaChart {
    pub profile: RadialProfile,
    pub d_eta: f64,
    pub eta_min: f64,
    /// `r(eta)`; index `i` holds `eta = eta_min + i * d_eta`.
    r_tab: Vec<f64>,
    /// `int_eta^0 (c - 1)` per node
    p_up_tab: Vec<f64>,
    /// `int_eta^0 1/c` per node
    zeta_up_tab: Vec<f64>,
    /// analytic estimate of `int_{-inf}^{eta_min} (c - 1)`
    tail_p: f64,
    /// whether `f_*(eta) <= exp(eta)/3` held on the whole table
    pub fstar_bound_holds: bool,
}

impl EtaChart {
    pub fn new(profile: &RadialProfile) -> Result<Self, ChartError> {
        Self::with_resolution(profile, 1e-3)
    }

    pub fn with_resolution(profile: &RadialProfile, d_eta: f64) -> Result<Self, ChartError> {
        let r1 = profile.r1();
        for i in 1..200 {
            let r = profile.r0 + (r1 - profile.r0) * i as f64 / 200.0;
            let f = profile.eval(r);
            if f <= 0.0 {
                return Err(ChartError::NonPositive { r, f });
            }
        }
        let fstar_of = |r: f64| profile.eval(r) / r;
        let speed_of = |r: f64| {
            let fs = fstar_of(r);
            (1.0 - fs * fs).sqrt()
        };
        // integrate (r, P_up, Z_up) downward in eta with RK4:
        //   dr/deta = f(r),   P_up(eta) = int_eta^0 (c-1),   Z_up = int_eta^0 1/c
        // so dP_up/deta = -(c-1) and dZ_up/deta = -1/c along decreasing eta.
        let mut r = r1;
        let mut p_up = 0.0;
        let mut z_up = 0.0;
        let mut r_rev = vec![r];
        let mut p_rev = vec![0.0];
        let mut z_rev = vec![0.0];
        let mut bound_ok = fstar_of(r1) <= 1.0 / 3.0 + 1e-12;
        let h = -d_eta;
        let mut eta = 0.0;
        loop {
            let k1r = profile.eval(r);
            let k1p = -(speed_of(r) - 1.0);
            let k1z = -1.0 / speed_of(r);
            let r2 = r + 0.5 * h * k1r;
            let k2r = profile.eval(r2);
            let k2p = -(speed_of(r2) - 1.0);
            let k2z = -1.0 / speed_of(r2);
            let r3 = r + 0.5 * h * k2r;
            let k3r = profile.eval(r3);
            let k3p = -(speed_of(r3) - 1.0);
            let k3z = -1.0 / speed_of(r3);
            let r4 = r + h * k3r;
            let k4r = profile.eval(r4);
            let k4p = -(speed_of(r4) - 1.0);
            let k4z = -1.0 / speed_of(r4);
            r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
            p_up += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            z_up += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
            eta += h;
            r_rev.push(r);
            p_rev.push(p_up);
            z_rev.push(z_up);
            let fs = fstar_of(r);
            if fs.abs() >= 1.0 {
                return Err(ChartError::SupersonicProfile(fs));
            }
            if fs > eta.exp() / 3.0 + 1e-12 {
                bound_ok = false;
            }
            if profile.eval(r) < F_FLOOR || eta < -80.0 {
                break;
            }
        }
        r_rev.reverse();
        p_rev.reverse();
        z_rev.reverse();
        let n = r_rev.len();
        let eta_min = -(n as f64 - 1.0) * d_eta;
        // |c - 1| <= f_*^2 / 2 and f_* decays like e^eta below the floor
        let fs_min = fstar_of(r_rev[0]);
        let tail_p = -0.25 * fs_min * fs_min;
        Ok(EtaChart {
            profile: profile.clone(),
            d_eta,
            eta_min,
            r_tab: r_rev,
            p_up_tab: p_rev,
            zeta_up_tab: z_rev,
            tail_p,
            fstar_bound_holds: bound_ok,
        })
    }

    #[inline]
    fn index_weight(&self, eta: f64) -> (usize, f64) {
        let x = (eta - self.eta_min) / self.d_eta;
        let i = (x.floor().max(0.0) as usize).min(self.r_tab.len() - 2);
        (i, x - i as f64)
    }

    fn interp(&self, tab: &[f64], eta: f64) -> f64 {
        let (i, t) = self.index_weight(eta);
        if i == 0 || i + 2 >= tab.len() {
            return tab[i] * (1.0 - t) + tab[i + 1] * t;
        }
        lagrange4(tab[i - 1], tab[i], tab[i + 1], tab[i + 2], t)
    }

    /// `r(eta)`, continued by `r(eta_min)` below the truncation.
    pub fn r_of_eta(&self, eta: f64) -> f64 {
        if eta <= self.eta_min {
            return self.r_tab[0];
        }
        if eta >= 0.0 {
            return *self.r_tab.last().unwrap();
        }
        self.interp(&self.r_tab, eta)
    }

    /// `f_*(eta) = f(r(eta)) / r(eta)`; exactly 0 below the truncation.
    pub fn fstar(&self, eta: f64) -> f64 {
        if eta <= self.eta_min {
            return 0.0;
        }
        let r = self.r_of_eta(eta);
        self.profile.eval(r) / r
    }

    /// Characteristic speed `c = sqrt(1 - f_*^2)`.
    pub fn speed(&self, eta: f64) -> f64 {
        let fs = self.fstar(eta);
        (1.0 - fs * fs).sqrt()
    }

    /// `d f_* / d eta = f_* (f' - f_*)`.
    pub fn fstar_eta(&self, eta: f64) -> f64 {
        if eta <= self.eta_min {
            return 0.0;
        }
        let r = self.r_of_eta(eta);
        let fs = self.profile.eval(r) / r;
        fs * (self.profile.d1(r) - fs)
    }

    /// `d c / d eta = -f_* f_*' / c`.
    pub fn speed_eta(&self, eta: f64) -> f64 {
        let fs = self.fstar(eta);
        if fs == 0.0 {
            return 0.0;
        }
        -fs * self.fstar_eta(eta) / self.speed(eta)
    }

    /// Phase `Phi(tau, eta) = tau + eta + int_{-inf}^{eta} (c - 1)`.
    pub fn phase(&self, tau: f64, eta: f64) -> f64 {
        tau + eta + self.phase_integral(eta)
    }

    /// `int_{-inf}^{eta} (sqrt(1 - f_*^2) - 1) d eta'`.
    pub fn phase_integral(&self, eta: f64) -> f64 {
        if eta <= self.eta_min {
            return self.tail_p;
        }
        let at = if eta >= 0.0 { 0.0 } else { self.interp(&self.p_up_tab, eta) };
        self.tail_p + self.p_up_tab[0] - at
    }

    /// Travel-time coordinate `zeta(eta) = -int_eta^0 1/c`, increasing in
    /// `eta` with `zeta(0) = 0`; characteristics obey
    /// `zeta(eta(tau)) = zeta(eta_0) - tau` exactly.
    pub fn zeta(&self, eta: f64) -> f64 {
        if eta >= 0.0 {
            return eta;
        }
        if eta <= self.eta_min {
            return -self.zeta_up_tab[0] + (eta - self.eta_min);
        }
        -self.interp(&self.zeta_up_tab, eta)
    }

    /// Inverse of [`EtaChart::zeta`].
    pub fn eta_of_zeta(&self, z: f64) -> f64 {
        let z_min = -self.zeta_up_tab[0];
        if z <= z_min {
            return self.eta_min + (z - z_min);
        }
        if z >= 0.0 {
            return z;
        }
        let mut lo = self.eta_min;
        let mut hi = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.zeta(mid) < z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut eta = 0.5 * (lo + hi);
        for _ in 0..3 {
            let fval = self.zeta(eta) - z;
            eta -= fval * self.speed(eta);
            eta = eta.clamp(self.eta_min, 0.0);
        }
        eta
    }

    /// `eta(r)` by bisection plus Newton polish (`d eta / d r = 1/f`).
    pub fn eta_of_r(&self, r: f64) -> f64 {
        let r = r.clamp(self.r_tab[0], *self.r_tab.last().unwrap());
        let mut lo = self.eta_min;
        let mut hi = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.r_of_eta(mid) < r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut eta = 0.5 * (lo + hi);
        for _ in 0..4 {
            let f = self.profile.eval(self.r_of_eta(eta)).max(F_FLOOR);
            eta -= (self.r_of_eta(eta) - r) / f;
            eta = eta.clamp(self.eta_min, 0.0);
        }
        eta
    }

    /// Sup-norm residual of the Hamilton-Jacobi equation
    /// `-(d_tau Phi)^2 + (d_eta Phi)^2 + f_*^2 = 0`, plugging the tabulated
    /// phase back with fourth-order finite differences (`d_tau Phi = 1`
    /// exactly by construction).
    pub fn hamilton_jacobi_residual_sup(&self) -> f64 {
        let h = self.d_eta;
        let n = self.r_tab.len();
        let mut worst = 0.0f64;
        for i in 2..n - 2 {
            let eta = self.eta_min + i as f64 * h;
            let pm2 = self.phase(0.0, eta - 2.0 * h);
            let pm1 = self.phase(0.0, eta - h);
            let pp1 = self.phase(0.0, eta + h);
            let pp2 = self.phase(0.0, eta + 2.0 * h);
            let dphi = (pm2 - 8.0 * pm1 + 8.0 * pp1 - pp2) / (12.0 * h);
            let fs = self.fstar(eta);
            let res = -1.0 + dphi * dphi + fs * fs;
            worst = worst.max(res.abs());
        }
        worst
    }
}

#[inline]
fn lagrange4(y0: f64, y1: f64, y2: f64, y3: f64, t: f64) -> f64 {
    // nodes at -1, 0, 1, 2; evaluation at t in [0, 1]
    let a = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let b = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let c = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let d = (t + 1.0) * t * (t - 1.0) / 6.0;
    a * y0 + b * y1 + c * y2 + d * y3
}
