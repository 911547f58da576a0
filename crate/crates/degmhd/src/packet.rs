//! Degenerating wave packets.
//!
//! The packet is assembled from the chart as
//! `psi~ = Re[ lambda^-1 e^{i lambda (theta + Phi)} ell f^(1/2) h ]` and
//! `b~^z = -Re[ (i lambda f)^-1 d_t(..) ]`, with the envelope transported in
//! closed form along the travel-time coordinate. The partner `b~^z` keeps the
//! `(i lambda)^-1 d_tau h` term of `-(f d_theta)^-1 d_t psi~`, which makes the
//! `psi` equation residual vanish identically; the quoted leading-order form
//! is recovered at `O(lambda^-1)`.
//!
//! All measurements run in `eta` quadrature with the exact Jacobian
//! `r dr = r f d_eta`, so the collapsing radial oscillation never has to be
//! resolved on an `r` grid. Phases are handled analytically: amplitudes are
//! stored as smooth envelopes times `e^{i lambda Phi}`.

use crate::bump::EnvelopeSeed;
use crate::chart::EtaChart;
use crate::fit::{self, LineFit};
use crate::profile::RadialProfile;
use num_complex::Complex64;

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);
const N_THETA: usize = 64;

/// A wave packet for the background `mu * f(r) d_theta`, frequency `lambda`.
pub struct WavePacket {
    pub chart: EtaChart,
    pub lambda: u32,
    /// Profile rescaling factor: the packet for `mu f` is the packet for `f`
    /// with time reparametrized `t -> mu t`.
    pub mu: f64,
    /// Multiplier on the canonical seed; 0 gives the trivial packet.
    pub seed_scale: f64,
    seed: EnvelopeSeed,
    pub warnings: Vec<String>,
}

impl WavePacket {
    pub fn new(profile: &RadialProfile, lambda: u32) -> Result<Self, crate::chart::ChartError> {
        let chart = EtaChart::new(profile)?;
        Ok(Self::from_chart(chart, lambda))
    }

    /// Assemble on an existing chart (used for sanity profiles that bypass
    /// the admissibility checks).
    pub fn from_chart(chart: EtaChart, lambda: u32) -> Self {
        let mut warnings = Vec::new();
        let lam_ell = lambda as f64 * chart.profile.ell;
        if lam_ell < 8.0 {
            warnings.push(format!(
                "lambda*ell = {lam_ell:.2} < 8: asymptotic regime is marginal"
            ));
        }
        // canonical seed lives on eta in (-1, 0), i.e. r in (r0 + ell/e, r1);
        // the half-interval hypothesis (r0 + ell/2, r1) is slightly tighter.
        warnings.push("supp g0 starts at r0 + ell/e, below the half-interval convention".into());
        WavePacket { chart, lambda, mu: 1.0, seed_scale: 1.0, seed: EnvelopeSeed::new(), warnings }
    }

    /// Same packet driven by the profile `mu * f`: time rescaling only.
    pub fn rescaled(&self, mu: f64) -> Self {
        WavePacket {
            chart: EtaChart::new(&self.chart.profile).unwrap(),
            lambda: self.lambda,
            mu,
            seed_scale: self.seed_scale,
            seed: EnvelopeSeed::new(),
            warnings: self.warnings.clone(),
        }
    }

    #[inline]
    pub fn tau_of_t(&self, t: f64) -> f64 {
        self.lambda as f64 * self.mu * t
    }

    /// Envelope `h(tau, eta)` in closed form: transport along the travel-time
    /// chart with the `sqrt(c(eta_0)/c(eta))` amplitude relation.
    pub fn envelope(&self, tau: f64, eta: f64) -> f64 {
        let z0 = self.chart.zeta(eta) + tau;
        let eta0 = self.chart.eta_of_zeta(z0);
        if eta0 <= -1.0 || eta0 >= 0.0 {
            return 0.0;
        }
        let h0 = self.seed_scale * self.seed.eval(eta0);
        h0 * (self.chart.speed(eta0) / self.chart.speed(eta)).sqrt()
    }

    /// Pointwise complex amplitudes `(a_psi, a_bz)` at `(t, eta)`, with the
    /// envelope derivatives evaluated by local differences; used by the
    /// finite-difference-in-time residual audits.
    pub fn amplitudes_at(&self, t: f64, eta: f64) -> (C64, C64) {
        let tau = self.tau_of_t(t);
        let lam = self.lambda as f64;
        let ell = self.chart.profile.ell;
        let r = self.chart.r_of_eta(eta);
        let f = self.chart.profile.eval(r).max(crate::chart::F_FLOOR);
        let c = self.chart.speed(eta);
        let cp = self.chart.speed_eta(eta);
        let de = 1e-4;
        let h = self.envelope(tau, eta);
        let h_eta = (self.envelope(tau, eta + de) - self.envelope(tau, eta - de)) / (2.0 * de);
        let h_tau = c * h_eta + 0.5 * cp * h;
        let phase = C64::from_polar(1.0, lam * self.chart.phase(tau, eta));
        let w = ell / lam * (f / r).sqrt();
        let a_psi = C64::new(w * h, 0.0) * phase;
        let base = -ell / (f * r).sqrt();
        let a_bz = (C64::new(base * h, 0.0) - I / lam * C64::new(base * h_tau, 0.0)) * phase;
        (a_psi, a_bz)
    }

    /// Support endpoints of `h(tau, .)` in `eta`, exact from the chart.
    pub fn envelope_support(&self, tau: f64) -> (f64, f64) {
        let left = self.chart.eta_of_zeta(self.chart.zeta(-1.0) - tau);
        let right = self.chart.eta_of_zeta(-tau);
        (left, right)
    }

    /// `|| h(tau, .) ||_{L^2(d eta)}` by direct quadrature.
    pub fn envelope_l2(&self, tau: f64) -> f64 {
        let (lo, hi) = self.envelope_support(tau);
        let n = 4000;
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let eta = lo + (i as f64 + 0.5) * h;
            let v = self.envelope(tau, eta);
            acc += v * v;
        }
        (acc * h).sqrt()
    }

    /// Initial radial profile `g0(r) = (f/r)^{1/2} h(0, eta(r))`.
    pub fn g0(&self, r: f64) -> f64 {
        let p = &self.chart.profile;
        if r <= p.r0 || r >= p.r1() {
            return 0.0;
        }
        let eta = self.chart.eta_of_r(r);
        let f = p.eval(r);
        self.seed_scale * (f / r).sqrt() * self.seed.eval(eta)
    }

    /// `|| g0 ||_{H^s(r dr)}` on a fine radial quadrature over the support.
    pub fn g0_radial_sobolev(&self, s: i32) -> f64 {
        let p = &self.chart.profile;
        let n = 8192;
        let lo = p.r0;
        let hi = p.r1();
        let dr = (hi - lo) / n as f64;
        let mut vals: Vec<f64> = (0..n).map(|j| self.g0(lo + (j as f64 + 0.5) * dr)).collect();
        let mut acc = 0.0;
        for _ in 0..=s {
            let mut sq = 0.0;
            for (j, v) in vals.iter().enumerate() {
                let r = lo + (j as f64 + 0.5) * dr;
                sq += v * v * r;
            }
            acc += sq * dr;
            // derivative by centered differences for the next order
            let mut next = vec![0.0; n];
            for j in 1..n - 1 {
                next[j] = (vals[j + 1] - vals[j - 1]) / (2.0 * dr);
            }
            vals = next;
        }
        acc.sqrt()
    }

    /// Both sides of the corrected envelope/initial-norm identity
    /// `||g0||_{L^2(r dr dtheta)} = sqrt(2 pi) || f h0 ||_{L^2(d eta)}`.
    pub fn g0_identity(&self) -> (f64, f64) {
        let p = &self.chart.profile;
        let n = 16384;
        let (lo, hi) = (p.r0, p.r1());
        let dr = (hi - lo) / n as f64;
        let mut lhs = 0.0;
        for j in 0..n {
            let r = lo + (j as f64 + 0.5) * dr;
            let v = self.g0(r);
            lhs += v * v * r;
        }
        let lhs = (lhs * dr * 2.0 * std::f64::consts::PI).sqrt();
        let m = 16384;
        let de = 30.0 / m as f64;
        let mut rhs = 0.0;
        for i in 0..m {
            let eta = -30.0 + (i as f64 + 0.5) * de;
            let f = p.eval(self.chart.r_of_eta(eta));
            let v = f * self.seed.eval(eta);
            rhs += v * v;
        }
        let rhs = (rhs * de * 2.0 * std::f64::consts::PI).sqrt();
        (lhs, rhs)
    }

    /// Assemble a snapshot at physical time `t` with quadrature spacing
    /// `d_eta` (defaults are fine for norms; error plug-backs shrink it).
    pub fn snapshot(&self, t: f64) -> Snapshot {
        self.snapshot_with_resolution(t, 1e-3f64.min(0.1 / self.lambda as f64))
    }

    pub fn snapshot_with_resolution(&self, t: f64, d_eta: f64) -> Snapshot {
        let tau = self.tau_of_t(t);
        let (lo, hi) = self.envelope_support(tau);
        let pad = 8.0 * d_eta;
        let eta_lo = lo - pad;
        let eta_hi = (hi + pad).min(0.0);
        let n = ((eta_hi - eta_lo) / d_eta).ceil() as usize + 1;
        let lam = self.lambda as f64;
        let ell = self.chart.profile.ell;

        let mut s = Snapshot {
            t,
            tau,
            lambda: self.lambda,
            ell,
            d_eta,
            eta: Vec::with_capacity(n),
            r: Vec::with_capacity(n),
            f: Vec::with_capacity(n),
            fp: Vec::with_capacity(n),
            fpp: Vec::with_capacity(n),
            c: Vec::with_capacity(n),
            cp: Vec::with_capacity(n),
            phase: Vec::with_capacity(n),
            h: Vec::with_capacity(n),
            h_eta: Vec::new(),
            h_tau: Vec::new(),
            h_tautau: Vec::new(),
            m_psi: Vec::new(),
            m_bz: Vec::new(),
            weight: Vec::with_capacity(n),
        };
        for i in 0..n {
            let eta = eta_lo + i as f64 * d_eta;
            let r = self.chart.r_of_eta(eta);
            let (f, fp, fpp) = self.chart.profile.eval_d(r);
            let f = f.max(crate::chart::F_FLOOR);
            s.eta.push(eta);
            s.r.push(r);
            s.f.push(f);
            s.fp.push(fp);
            s.fpp.push(fpp);
            s.c.push(self.chart.speed(eta));
            s.cp.push(self.chart.speed_eta(eta));
            s.phase.push(self.chart.phase(tau, eta));
            s.h.push(self.envelope(tau, eta));
            s.weight.push(r * f * d_eta);
        }
        s.h_eta = fd4(&s.h, d_eta);
        s.h_tau = (0..n).map(|i| s.c[i] * s.h_eta[i] + 0.5 * s.cp[i] * s.h[i]).collect();
        let h_tau_eta = fd4(&s.h_tau, d_eta);
        s.h_tautau =
            (0..n).map(|i| s.c[i] * h_tau_eta[i] + 0.5 * s.cp[i] * s.h_tau[i]).collect();
        // psi~ = Re[ lam^-1 e^{i lam (th + Phi)} ell (f/r)^{1/2} h ]: the
        // (f/r)^{1/2} weight is what the eta change of variables produces and
        // is required for the transport equation to cancel the first-order
        // Laplacian term; at t = 0 this gives exactly psi~ = lam^-1 ell g0.
        s.m_psi = (0..n)
            .map(|i| C64::new(ell / lam * (s.f[i] / s.r[i]).sqrt() * s.h[i], 0.0))
            .collect();
        s.m_bz = (0..n)
            .map(|i| {
                let base = -ell / (s.f[i] * s.r[i]).sqrt();
                // -(f d_theta)^{-1} d_t psi~ keeps the (i lam)^{-1} h_tau
                // term; (i lam)^{-1} = -i/lam.
                C64::new(base * s.h[i], 0.0) - I / lam * C64::new(base * s.h_tau[i], 0.0)
            })
            .collect();
        s
    }

    /// Fitted slope of `log(mixed degeneration norm)` against `t` and the
    /// reported rate constant `kappa = -slope / ((1/p - 1/2) lambda)`.
    pub fn degeneration_rate(&self, p: f64, ts: &[f64]) -> Result<DegenerationFit, &'static str> {
        if ts.len() < 4 {
            return Err("degeneration fit needs at least 4 time samples");
        }
        let values: Vec<f64> = ts.iter().map(|&t| self.snapshot(t).mixed_degeneration_norm(p)).collect();
        let fit = fit::log_slope(ts, &values);
        let expo = 1.0 / p - 0.5;
        let kappa = if expo.abs() < 1e-12 {
            0.0
        } else {
            -fit.slope / (expo * self.lambda as f64 * self.mu)
        };
        Ok(DegenerationFit { fit, kappa, values })
    }
}

#[derive(Debug)]
pub struct DegenerationFit {
    pub fit: LineFit,
    pub kappa: f64,
    pub values: Vec<f64>,
}

/// Evaluated packet at one time: smooth complex envelopes `M` with the phase
/// `e^{i lambda Phi}` factored out, on a uniform `eta` quadrature grid.
pub struct Snapshot {
    pub t: f64,
    pub tau: f64,
    pub lambda: u32,
    pub ell: f64,
    pub d_eta: f64,
    pub eta: Vec<f64>,
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    pub fp: Vec<f64>,
    pub fpp: Vec<f64>,
    pub c: Vec<f64>,
    pub cp: Vec<f64>,
    pub phase: Vec<f64>,
    pub h: Vec<f64>,
    pub h_eta: Vec<f64>,
    pub h_tau: Vec<f64>,
    pub h_tautau: Vec<f64>,
    /// smooth amplitude of psi~ (phase factored out)
    pub m_psi: Vec<C64>,
    /// smooth amplitude of b~^z
    pub m_bz: Vec<C64>,
    /// quadrature weight `r f d_eta` per node
    pub weight: Vec<f64>,
}

impl Snapshot {
    #[inline]
    fn lam(&self) -> f64 {
        self.lambda as f64
    }

    #[inline]
    fn e_phase(&self, i: usize) -> C64 {
        C64::from_polar(1.0, self.lam() * self.phase[i])
    }

    /// Full complex amplitude of psi~ at node `i`.
    pub fn a_psi(&self, i: usize) -> C64 {
        self.m_psi[i] * self.e_phase(i)
    }

    /// Full complex amplitude of b~^z at node `i`.
    pub fn a_bz(&self, i: usize) -> C64 {
        self.m_bz[i] * self.e_phase(i)
    }

    fn n(&self) -> usize {
        self.eta.len()
    }

    /// `d/dr` of an amplitude given as smooth `m` (phase factored out):
    /// returns the smooth part of the derivative amplitude,
    /// `(1/f)(m_eta + i lambda c m)`.
    fn d_dr_smooth(&self, m: &[C64]) -> Vec<C64> {
        let m_eta = fd4c(m, self.d_eta);
        (0..self.n())
            .map(|i| (m_eta[i] + I * self.lam() * self.c[i] * m[i]) / self.f[i])
            .collect()
    }

    /// radial component amplitude `b^r = i lambda psi / r` (smooth part)
    fn m_br(&self) -> Vec<C64> {
        (0..self.n()).map(|i| I * self.lam() * self.m_psi[i] / self.r[i]).collect()
    }

    /// physical theta component `-d_r psi` (smooth part)
    fn m_btheta(&self) -> Vec<C64> {
        self.d_dr_smooth(&self.m_psi).into_iter().map(|v| -v).collect()
    }

    /// `L^2(r dr dtheta)` norm of one mode amplitude.
    fn l2_of(&self, m: &[C64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n() {
            acc += m[i].norm_sqr() * self.weight[i];
        }
        (std::f64::consts::PI * acc).sqrt()
    }

    /// Mixed norm `L^2_theta L^p_{r dr}` of the Euclidean magnitude of a set
    /// of component amplitudes (phase shared).
    fn mixed_of(&self, comps: &[&[C64]], p: f64) -> f64 {
        let lam_fold = self.lambda as f64;
        let period = 2.0 * std::f64::consts::PI / lam_fold;
        let h_th = period / N_THETA as f64;
        let mut acc = 0.0;
        for it in 0..N_THETA {
            let th = (it as f64 + 0.5) * h_th;
            let mut radial = 0.0;
            for i in 0..self.n() {
                let rot = C64::from_polar(1.0, self.lam() * (th + self.phase[i]));
                let mut mag2 = 0.0;
                for comp in comps {
                    let v = (comp[i] * rot).re;
                    mag2 += v * v;
                }
                radial += mag2.powf(p / 2.0) * self.weight[i];
            }
            let inner = radial.powf(1.0 / p);
            acc += inner * inner * h_th * lam_fold;
        }
        acc.sqrt()
    }

    /// `||b~^z||_{L2th Lp} + ||grad psi~||_{L2th Lp}`, the degeneration norm.
    pub fn mixed_degeneration_norm(&self, p: f64) -> f64 {
        let grad_r = self.d_dr_smooth(&self.m_psi);
        let grad_th = self.m_br(); // i lam psi / r = r^{-1} d_theta psi
        self.mixed_of(&[&self.m_bz], p) + self.mixed_of(&[&grad_r, &grad_th], p)
    }

    /// `(||b~^z||_{L^2}, ||grad psi~||_{L^2})`.
    pub fn l2_pair(&self) -> (f64, f64) {
        let grad_r = self.d_dr_smooth(&self.m_psi);
        let grad_th = self.m_br();
        let g2 = (self.l2_of(&grad_r).powi(2) + self.l2_of(&grad_th).powi(2)).sqrt();
        (self.l2_of(&self.m_bz), g2)
    }

    /// `||b~||_{L^2}` over all three components.
    pub fn b_l2(&self) -> f64 {
        let br = self.m_br();
        let bth = self.m_btheta();
        (self.l2_of(&br).powi(2) + self.l2_of(&bth).powi(2) + self.l2_of(&self.m_bz).powi(2))
            .sqrt()
    }

    /// `||psi~||_{L^2}` (the smoothing-side quantity).
    pub fn psi_l2(&self) -> f64 {
        self.l2_of(&self.m_psi)
    }

    /// `W^{1,2}`-type norm of `b~`: components plus their `(d_r, r^-1 d_theta)`
    /// derivatives.
    pub fn b_h1(&self) -> f64 {
        let comps = [self.m_br(), self.m_btheta(), self.m_bz.clone()];
        let mut acc = 0.0;
        for c in &comps {
            acc += self.l2_of(c).powi(2);
            let dr = self.d_dr_smooth(c);
            acc += self.l2_of(&dr).powi(2);
            let dth: Vec<C64> =
                (0..self.n()).map(|i| I * self.lam() * c[i] / self.r[i]).collect();
            acc += self.l2_of(&dth).powi(2);
        }
        acc.sqrt()
    }

    /// `|| d_r b~ ||_{L^2}` over the three components, for the brute-force
    /// derivative bound.
    pub fn b_dr_l2(&self) -> f64 {
        let comps = [self.m_br(), self.m_btheta(), self.m_bz.clone()];
        let mut acc = 0.0;
        for c in &comps {
            let dr = self.d_dr_smooth(c);
            acc += self.l2_of(&dr).powi(2);
        }
        acc.sqrt()
    }

    /// Residual of the `b^z` equation (the only nonvanishing error of the
    /// packet): `err = d_t b~^z - i lam f Lap_lam psi~ + i lam g psi~`, all
    /// derivatives taken analytically on the phase and by smooth finite
    /// differences on the envelopes. Returns `||err_b~||_{L^2(xy)}`.
    pub fn err_l2(&self) -> f64 {
        let lam = self.lam();
        let n = self.n();
        // d_t amplitude of b~^z: lam * (d_tau M + i lam M) since Phi_tau = 1
        let dtau_m_bz: Vec<C64> = (0..n)
            .map(|i| {
                let base = -self.ell / (self.f[i] * self.r[i]).sqrt();
                C64::new(base * self.h_tau[i], 0.0)
                    - I / lam * C64::new(base * self.h_tautau[i], 0.0)
            })
            .collect();
        let x: Vec<C64> = {
            let m_eta = fd4c(&self.m_psi, self.d_eta);
            (0..n).map(|i| m_eta[i] + I * lam * self.c[i] * self.m_psi[i]).collect()
        };
        let x_eta = fd4c(&x, self.d_eta);
        let mut acc = 0.0;
        for i in 0..n {
            let dt_bz = lam * (dtau_m_bz[i] + I * lam * self.m_bz[i]);
            // Lap_lam psi = psi_rr + psi_r / r - lam^2 psi / r^2 (smooth parts)
            let d1 = x[i] / self.f[i];
            let d2 = (x_eta[i] - self.fp[i] * x[i] + I * lam * self.c[i] * x[i])
                / (self.f[i] * self.f[i]);
            let lap = d2 + d1 / self.r[i] - lam * lam * self.m_psi[i] / (self.r[i] * self.r[i]);
            let g = self.fpp[i] + 3.0 * self.fp[i] / self.r[i];
            let err = dt_bz - I * lam * self.f[i] * lap + I * lam * g * self.m_psi[i];
            acc += err.norm_sqr() * self.weight[i];
        }
        (std::f64::consts::PI * acc).sqrt()
    }

    /// Hall companions are algebraic: `u~^z = -psi~`, `omega~ = -b~^z`.
    /// Returns the smoothing pair `(||u~^z|| + ||grad_perp (-Lap)^-1 omega~||,
    /// ||grad u~^z|| + ||omega~||)`.
    pub fn hall_smoothing_norms(&self) -> (f64, f64) {
        let uz_l2 = self.psi_l2();
        let quad = self.neg_laplacian_inverse_quadform();
        let low = uz_l2 + quad.sqrt();
        let duz_r = self.d_dr_smooth(&self.m_psi);
        let duz_th: Vec<C64> =
            (0..self.n()).map(|i| I * self.lam() * self.m_psi[i] / self.r[i]).collect();
        let grad_uz = (self.l2_of(&duz_r).powi(2) + self.l2_of(&duz_th).powi(2)).sqrt();
        let high = grad_uz + self.l2_of(&self.m_bz);
        (low, high)
    }

    /// `< (-Lap_lam)^{-1} omega~, omega~ >_{L^2(r dr dtheta)}` with
    /// `omega~ = -b~^z`, via a fine radial collocation and a tridiagonal
    /// solve with Dirichlet walls far outside the support.
    pub fn neg_laplacian_inverse_quadform(&self) -> f64 {
        let lam = self.lam();
        let r_lo_support = self.r[0];
        let r_hi_support = *self.r.last().unwrap();
        let span = (r_hi_support - r_lo_support).max(1e-6);
        let r_lo = (r_lo_support - 2.0 * span).max(r_lo_support * 0.2).max(1e-6);
        let r_hi = r_hi_support + 2.0 * span;
        // resolve the local radial wavelength 2 pi f / lam
        let f_min = self.f.iter().cloned().fold(f64::INFINITY, f64::min).max(1e-9);
        let dr_wave = 2.0 * std::f64::consts::PI * f_min / lam / 12.0;
        let n = (((r_hi - r_lo) / dr_wave).ceil() as usize).clamp(200, 400_000);
        let dr = (r_hi - r_lo) / n as f64;
        // sample omega~ on the collocation grid
        let mut omega = vec![C64::new(0.0, 0.0); n];
        for (k, w) in omega.iter_mut().enumerate() {
            let r = r_lo + (k as f64 + 0.5) * dr;
            if r <= r_lo_support || r >= r_hi_support {
                continue;
            }
            // locate eta by inverting r within the snapshot table
            let mut lo = 0usize;
            let mut hi = self.n() - 1;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.r[mid] <= r {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = (r - self.r[lo]) / (self.r[lo + 1] - self.r[lo]).max(1e-300);
            let m = self.m_bz[lo] * (1.0 - t) + self.m_bz[lo + 1] * t;
            let ph = self.phase[lo] * (1.0 - t) + self.phase[lo + 1] * t;
            *w = -(m * C64::from_polar(1.0, self.lam() * ph));
        }
        // tridiagonal solve of (-lap_lam) q = omega
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut cc = vec![0.0; n];
        for k in 0..n {
            let r = r_lo + (k as f64 + 0.5) * dr;
            b[k] = 2.0 / (dr * dr) + lam * lam / (r * r);
            a[k] = -1.0 / (dr * dr) + 1.0 / (2.0 * r * dr); // sub-diagonal
            cc[k] = -1.0 / (dr * dr) - 1.0 / (2.0 * r * dr); // super-diagonal
        }
        let mut q = omega.clone();
        // Thomas algorithm
        let mut cp = vec![0.0; n];
        cp[0] = cc[0] / b[0];
        q[0] /= b[0];
        for k in 1..n {
            let m = b[k] - a[k] * cp[k - 1];
            cp[k] = cc[k] / m;
            q[k] = (q[k] - a[k] * q[k - 1]) / m;
        }
        for k in (0..n - 1).rev() {
            let next = q[k + 1];
            q[k] -= cp[k] * next;
        }
        let mut acc = 0.0;
        for k in 0..n {
            let r = r_lo + (k as f64 + 0.5) * dr;
            acc += (q[k] * omega[k].conj()).re * r;
        }
        (std::f64::consts::PI * acc * dr).max(0.0)
    }
}

/// Fourth-order centered differences on a uniform grid, one-sided second
/// order at the two edge nodes (fields vanish there).
fn fd4(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = if i >= 2 && i + 2 < n {
            (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h)
        } else if i == 0 {
            (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        } else if i == n - 1 {
            (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
        } else if i == 1 {
            (v[2] - v[0]) / (2.0 * h)
        } else {
            (v[n - 1] - v[n - 3]) / (2.0 * h)
        };
    }
    out
}

fn fd4c(v: &[C64], h: f64) -> Vec<C64> {
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let im: Vec<f64> = v.iter().map(|z| z.im).collect();
    let dre = fd4(&re, h);
    let dim = fd4(&im, h);
    dre.into_iter().zip(dim).map(|(a, b)| C64::new(a, b)).collect()
}

