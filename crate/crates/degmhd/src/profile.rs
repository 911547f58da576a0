//! Degenerate radial profiles `f(r)` for the background field `f(r) d_theta`.
//!
//! Admissibility: `f(r0) = 0`, support inside `[r0 - ell, r0 + 2 ell]`,
//! `1/2 <= f' <= 1` on `[r0, r1]` with `r1 = r0 + ell`, `2 ell <= r0 <= 20 ell`,
//! `||f||_inf <= 1` and `ell <= 1`. The canonical kind is exactly linear,
//! `f = r - r0`, on `[r0 - ell/2, r1]` and smoothly capped to zero outside.

use crate::bump::smoothstep;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("scale separation violated: need 2*ell <= r0 <= 20*ell (ell={ell}, r0={r0})")]
    ScaleSeparation { ell: f64, r0: f64 },
    #[error("length scale must satisfy 0 < ell <= 1 (got {0})")]
    BadLengthScale(f64),
    #[error("profile exceeds unit sup bound: ||f||_inf = {0} > 1")]
    SupBound(f64),
    #[error("slope bound violated on [r0, r1]: f' in [{min}, {max}], need [1/2, 1]")]
    SlopeBound { min: f64, max: f64 },
    #[error("profile does not vanish at r0: f(r0) = {0}")]
    NotDegenerate(f64),
    #[error("support leaks outside [r0 - ell, r0 + 2 ell]")]
    Support,
    #[error("custom profile needs at least 8 samples")]
    TooFewSamples,
}

/// Profile families supported by the constructor.
#[derive(Debug, Clone)]
pub enum ProfileKind {
    /// `f = r - r0` on `[r0 - ell/2, r1]`, capped smoothly to zero at the
    /// support edges.
    LinearCapped,
    /// Caller-supplied closed-form profile with two derivatives.
    Custom {
        f: fn(f64, f64, f64) -> f64,
        d1: fn(f64, f64, f64) -> f64,
        d2: fn(f64, f64, f64) -> f64,
    },
}

/// A degenerate profile with analytic first and second derivatives.
#[derive(Clone)]
pub struct RadialProfile {
    pub ell: f64,
    pub r0: f64,
    kind: ProfileKind,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("ell", &self.ell)
            .field("r0", &self.r0)
            .finish()
    }
}

impl RadialProfile {
    /// Construct and validate a profile. Each admissibility failure names the
    /// violated constraint.
    pub fn new(ell: f64, r0: f64, kind: ProfileKind) -> Result<Self, ProfileError> {
        if !(ell > 0.0 && ell <= 1.0) {
            return Err(ProfileError::BadLengthScale(ell));
        }
        if !(2.0 * ell <= r0 + 1e-14 && r0 <= 20.0 * ell + 1e-14) {
            return Err(ProfileError::ScaleSeparation { ell, r0 });
        }
        let p = RadialProfile { ell, r0, kind };
        p.validate()?;
        Ok(p)
    }

    pub fn linear_capped(ell: f64, r0: f64) -> Result<Self, ProfileError> {
        Self::new(ell, r0, ProfileKind::LinearCapped)
    }

    /// Build without the admissibility scan. Meant for deliberately
    /// non-degenerate sanity profiles in diagnostics; admissible experiment
    /// profiles should go through [`RadialProfile::new`].
    pub fn unchecked(ell: f64, r0: f64, kind: ProfileKind) -> Self {
        RadialProfile { ell, r0, kind }
    }

    #[inline]
    pub fn r1(&self) -> f64 {
        self.r0 + self.ell
    }

    pub fn support(&self) -> (f64, f64) {
        (self.r0 - self.ell, self.r0 + 2.0 * self.ell)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_d(r).0
    }

    pub fn d1(&self, r: f64) -> f64 {
        self.eval_d(r).1
    }

    pub fn d2(&self, r: f64) -> f64 {
        self.eval_d(r).2
    }

    /// `(f, f', f'')` at `r`.
    pub fn eval_d(&self, r: f64) -> (f64, f64, f64) {
        match &self.kind {
            ProfileKind::Custom { f, d1, d2 } => {
                (f(r, self.ell, self.r0), d1(r, self.ell, self.r0), d2(r, self.ell, self.r0))
            }
            ProfileKind::LinearCapped => self.linear_capped_eval(r),
        }
    }

    fn linear_capped_eval(&self, r: f64) -> (f64, f64, f64) {
        let (ell, r0) = (self.ell, self.r0);
        let r1 = self.r1();
        let (lo, hi) = self.support();
        if r <= lo || r >= hi {
            return (0.0, 0.0, 0.0);
        }
        if r < r0 - 0.5 * ell {
            // rise from zero at the left support edge over width ell/2
            let w = 0.5 * ell;
            let u = (r - lo) / w;
            let (s, s1, s2) = smoothstep(u);
            let x = r - r0;
            (x * s, s + x * s1 / w, 2.0 * s1 / w + x * s2 / (w * w))
        } else if r <= r1 {
            (r - r0, 1.0, 0.0)
        } else {
            // decay to zero at the right support edge over width ell
            let u = (r - r1) / ell;
            let (s, s1, s2) = smoothstep(u);
            let x = r - r0;
            (
                x * (1.0 - s),
                (1.0 - s) - x * s1 / ell,
                -2.0 * s1 / ell - x * s2 / (ell * ell),
            )
        }
    }

    /// Largest `|f|` over the support, by dense scan.
    pub fn sup_norm(&self) -> f64 {
        let (lo, hi) = self.support();
        let n = 4000;
        let h = (hi - lo) / n as f64;
        let mut m = 0.0f64;
        for i in 0..=n {
            m = m.max(self.eval(lo + i as f64 * h).abs());
        }
        m
    }

    fn validate(&self) -> Result<(), ProfileError> {
        let f_r0 = self.eval(self.r0);
        if f_r0.abs() > 1e-12 {
            return Err(ProfileError::NotDegenerate(f_r0));
        }
        let (lo, hi) = self.support();
        for &r in &[lo - 0.25 * self.ell, lo - 1e-9, hi + 1e-9, hi + 0.25 * self.ell] {
            if r > 0.0 && self.eval(r).abs() > 1e-12 {
                return Err(ProfileError::Support);
            }
        }
        // slope bound on [r0, r1] scanned on 1000 nodes
        let n = 1000;
        let mut dmin = f64::INFINITY;
        let mut dmax = f64::NEG_INFINITY;
        for i in 0..=n {
            let r = self.r0 + self.ell * i as f64 / n as f64;
            let d = self.d1(r);
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
        if dmin < 0.5 - 1e-9 || dmax > 1.0 + 1e-9 {
            return Err(ProfileError::SlopeBound { min: dmin, max: dmax });
        }
        let sup = self.sup_norm();
        if sup > 1.0 + 1e-12 {
            return Err(ProfileError::SupBound(sup));
        }
        Ok(())
    }

    /// Scale-normalized derivative constant `ell^-1 max_j ell^j ||f^(j)||_inf`
    /// over `[r0, r1]`, for `j <= 2`.
    pub fn derivative_constant(&self) -> f64 {
        let n = 1000;
        let mut m1 = 0.0f64;
        let mut m2 = 0.0f64;
        for i in 0..=n {
            let r = self.r0 + self.ell * i as f64 / n as f64;
            let (_, d1, d2) = self.eval_d(r);
            m1 = m1.max((self.ell * d1).abs());
            m2 = m2.max((self.ell * self.ell * d2).abs());
        }
        (m1.max(m2)) / self.ell
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_paper_profile() {
        // ell = 1/40, r0 = 1/20: f(r) = r - 1/20 on the exactly-linear zone.
        let p = RadialProfile::linear_capped(1.0 / 40.0, 1.0 / 20.0).unwrap();
        let r1 = p.r1();
        assert!((r1 - 3.0 / 40.0).abs() < 1e-15);
        for i in 0..=100 {
            let r = (p.r0 - 0.5 * p.ell) + (r1 - p.r0 + 0.5 * p.ell) * i as f64 / 100.0;
            assert!(
                (p.eval(r) - (r - 1.0 / 20.0)).abs() < 1e-14,
                "not linear at r = {r}"
            );
        }
        assert_eq!(p.eval(p.r0), 0.0);
    }

    #[test]
    fn scale_separation_enforced() {
        let err = RadialProfile::linear_capped(0.1, 0.1).unwrap_err();
        assert!(matches!(err, ProfileError::ScaleSeparation { .. }));
        assert!(RadialProfile::linear_capped(0.1, 2.5).is_err()); // r0 > 20 ell
    }

    #[test]
    fn slope_bounds_hold_on_linear_zone() {
        let p = RadialProfile::linear_capped(0.5, 1.0).unwrap();
        let n = 1000;
        for i in 0..=n {
            let r = p.r0 + p.ell * i as f64 / n as f64;
            let d = p.d1(r);
            assert!((0.5..=1.0 + 1e-12).contains(&d), "f'({r}) = {d}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = RadialProfile::linear_capped(0.5, 1.0).unwrap();
        let h = 1e-6;
        for &r in &[0.55, 0.72, 0.95, 1.2, 1.45, 1.6, 1.85, 1.95] {
            let (_, d1, d2) = p.eval_d(r);
            let fd1 = (p.eval(r + h) - p.eval(r - h)) / (2.0 * h);
            let fd2 = (p.eval(r + h) - 2.0 * p.eval(r) + p.eval(r - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()), "d1 at {r}");
            assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()), "d2 at {r}: {d2} vs {fd2}");
        }
    }

    #[test]
    fn support_is_compact() {
        let p = RadialProfile::linear_capped(0.25, 1.0).unwrap();
        let (lo, hi) = p.support();
        assert_eq!(p.eval(lo), 0.0);
        assert_eq!(p.eval(hi), 0.0);
        assert_eq!(p.eval(lo - 0.1), 0.0);
        assert_eq!(p.eval(hi + 0.1), 0.0);
        assert!(p.eval(0.5 * (p.r0 + p.r1())) > 0.0);
    }

    #[test]
    fn sup_norm_within_unit_bound() {
        let p = RadialProfile::linear_capped(0.5, 1.0).unwrap();
        assert!(p.sup_norm() <= 1.0);
    }
}
