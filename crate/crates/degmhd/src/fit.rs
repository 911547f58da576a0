//! Least-squares fits used by the rate-extraction experiments.

/// Result of a straight-line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares on `(x, y)` pairs. Panics on fewer than 2 points.
pub fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "line fit needs at least two samples");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    LineFit { slope, intercept, r_squared }
}

/// Slope of `log(y)` against `x` (semilog rate). All `y` must be positive.
pub fn log_slope(x: &[f64], y: &[f64]) -> LineFit {
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    line_fit(x, &ly)
}

/// Slope of `log(y)` against `log(x)` (power-law exponent).
pub fn loglog_slope(x: &[f64], y: &[f64]) -> LineFit {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    line_fit(&lx, &ly)
}

/// Fit `z = c * u * v` through the origin in both factors and report the R^2
/// of the bilinear model. Used for the "slope linear in lambda and in
/// (1/p - 1/2)" degeneration check.
pub fn bilinear_through_origin(u: &[f64], v: &[f64], z: &[f64]) -> (f64, f64) {
    assert_eq!(u.len(), z.len());
    assert_eq!(v.len(), z.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..z.len() {
        let x = u[i] * v[i];
        num += x * z[i];
        den += x * x;
    }
    let c = num / den;
    let mz = z.iter().sum::<f64>() / z.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..z.len() {
        let pred = c * u[i] * v[i];
        ss_res += (z[i] - pred) * (z[i] - pred);
        ss_tot += (z[i] - mz) * (z[i] - mz);
    }
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (c, r2)
}
