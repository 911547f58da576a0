//! Smooth compactly supported building blocks: the C-infinity step, bump
//! functions and plateau cutoffs shared by profiles, packets and kernels.

/// `exp(-1/x)` continued by zero for `x <= 0`, with first two derivatives.
fn q(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let v = (-1.0 / x).exp();
    let d1 = v / (x * x);
    let d2 = v * (1.0 - 2.0 * x) / (x * x * x * x);
    (v, d1, d2)
}

/// Symmetric C-infinity step: 0 for `x <= 0`, 1 for `x >= 1`.
///
/// Returns `(s, s', s'')`. All derivatives vanish at both endpoints, so
/// pieces glued with it stay smooth.
pub fn smoothstep(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let (a, a1, a2) = q(x);
    let (b, bm1, bm2) = q(1.0 - x);
    // d/dx q(1-x) = -q'(1-x)
    let b1 = -bm1;
    let b2 = bm2;
    let d = a + b;
    let s = a / d;
    let num1 = a1 * b - a * b1;
    let s1 = num1 / (d * d);
    let num2 = a2 * b - a * b2;
    let s2 = num2 / (d * d) - 2.0 * num1 * (a1 + b1) / (d * d * d);
    (s, s1, s2)
}

/// Plateau cutoff: 1 on `|x| <= 1`, 0 on `|x| >= 2`, smooth in between.
///
/// Returns `(chi, chi', chi'')`; scale with [`Cutoff`] for other widths.
pub fn plateau(x: f64) -> (f64, f64, f64) {
    let a = x.abs();
    if a <= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let (s, s1, s2) = smoothstep(a - 1.0);
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    (1.0 - s, -sign * s1, -s2)
}

/// Smooth cutoff `chi(z)` equal to 1 on `|z| <= scale` and 0 on `|z| >= 2*scale`.
#[derive(Debug, Clone, Copy)]
pub struct Cutoff {
    pub scale: f64,
}

impl Cutoff {
    pub fn new(scale: f64) -> Self {
        assert!(scale > 0.0, "cutoff scale must be positive");
        Cutoff { scale }
    }

    pub fn eval(&self, z: f64) -> f64 {
        plateau(z / self.scale).0
    }

    pub fn d1(&self, z: f64) -> f64 {
        plateau(z / self.scale).1 / self.scale
    }

    pub fn d2(&self, z: f64) -> f64 {
        plateau(z / self.scale).2 / (self.scale * self.scale)
    }

    /// `int chi(z) dz` by fine trapezoid over the support.
    pub fn mass_l1(&self) -> f64 {
        self.quad(|c| c)
    }

    /// `int chi(z)^2 dz`.
    pub fn mass_l2sq(&self) -> f64 {
        self.quad(|c| c * c)
    }

    /// `int chi'(z)^2 dz`.
    pub fn dmass_l2sq(&self) -> f64 {
        let n = 4000;
        let h = 4.0 * self.scale / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let z = -2.0 * self.scale + i as f64 * h;
            let v = self.d1(z) * self.d1(z);
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * v;
        }
        acc * h
    }

    /// `int chi(z)^p dz` for the duality bookkeeping.
    pub fn mass_lp(&self, p: f64) -> f64 {
        self.quad(|c| c.powf(p))
    }

    fn quad(&self, g: impl Fn(f64) -> f64) -> f64 {
        let n = 4000;
        let h = 4.0 * self.scale / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let z = -2.0 * self.scale + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * g(self.eval(z));
        }
        acc * h
    }
}

/// Normalized C-infinity bump on the unit ball of R^3, `int w = 1`.
///
/// `w(x) = c_w exp(-1/(1-|x|^2))` for `|x| < 1`. The normalization constant
/// is computed once by radial quadrature.
#[derive(Debug, Clone, Copy)]
pub struct UnitBump3 {
    norm: f64,
}

impl UnitBump3 {
    pub fn new() -> Self {
        // int_0^1 exp(-1/(1-s^2)) 4 pi s^2 ds
        let n = 20_000;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let s = (i as f64 + 0.5) * h;
            acc += (-1.0 / (1.0 - s * s)).exp() * s * s;
        }
        let integral = acc * h * 4.0 * std::f64::consts::PI;
        UnitBump3 { norm: 1.0 / integral }
    }

    pub fn eval_r2(&self, r2: f64) -> f64 {
        if r2 >= 1.0 {
            0.0
        } else {
            self.norm * (-1.0 / (1.0 - r2)).exp()
        }
    }
}

impl Default for UnitBump3 {
    fn default() -> Self {
        Self::new()
    }
}

/// The canonical envelope seed `exp(-1/(1-(2 eta + 1)^2))` on `(-1, 0)`,
/// L^2-normalized: the universal smooth initial envelope.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeSeed {
    norm: f64,
}

impl EnvelopeSeed {
    pub fn new() -> Self {
        let n = 40_000;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let eta = -1.0 + (i as f64 + 0.5) * h;
            let v = Self::raw(eta);
            acc += v * v;
        }
        EnvelopeSeed { norm: 1.0 / (acc * h).sqrt() }
    }

    fn raw(eta: f64) -> f64 {
        let u = 2.0 * eta + 1.0;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }

    pub fn eval(&self, eta: f64) -> f64 {
        self.norm * Self::raw(eta)
    }
}

impl Default for EnvelopeSeed {
    fn default() -> Self {
        Self::new()
    }
}
