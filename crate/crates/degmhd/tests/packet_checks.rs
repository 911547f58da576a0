//! Wave-packet behavior: envelope lemma, initial-data sandwich, degeneration
//! scaling, error boundedness, Hall companions and rescaling.

use degmhd::chart::EtaChart;
use degmhd::packet::WavePacket;
use degmhd::profile::{ProfileKind, RadialProfile};

fn base_profile() -> RadialProfile {
    RadialProfile::linear_capped(0.5, 1.0).unwrap()
}

#[test]
fn envelope_support_and_l2_bound() {
    let wp = WavePacket::new(&base_profile(), 32).unwrap();
    let h0_l2 = wp.envelope_l2(0.0);
    for k in 0..=10 {
        let tau = k as f64;
        let (lo, hi) = wp.envelope_support(tau);
        assert!(lo > -1.0 - tau - 1e-9, "left edge {lo} vs {}", -1.0 - tau);
        assert!(hi < -tau / 2.0 + 1e-9, "right edge {hi} vs {}", -tau / 2.0);
        let l2 = wp.envelope_l2(tau);
        assert!(l2 / h0_l2 <= 1.5, "L2 growth {l2}");
        assert!((l2 / h0_l2 - 1.0).abs() < 1e-4, "L2 should be conserved: {l2}");
    }
}

#[test]
fn envelope_translates_where_fstar_vanishes() {
    // far below the chart truncation the transport is a pure unit-speed
    // left translation
    let wp = WavePacket::new(&base_profile(), 32).unwrap();
    let eta_min = wp.chart.eta_min;
    let tau0 = -eta_min + 4.0; // support fully inside the f_* = 0 region
    for i in 0..40 {
        let eta = eta_min - 3.0 - i as f64 * 0.02;
        let a = wp.envelope(tau0, eta);
        let b = wp.envelope(tau0 + 0.37, eta - 0.37);
        assert!((a - b).abs() < 1e-8, "translation broken at eta={eta}: {a} vs {b}");
    }
}

#[test]
fn phase_time_dependence_is_linear() {
    let wp = WavePacket::new(&base_profile(), 32).unwrap();
    let c = &wp.chart;
    for &eta in &[-0.3, -2.0, -6.0] {
        let d = c.phase(1.7, eta) - c.phase(0.4, eta);
        assert!((d - 1.3).abs() < 1e-14, "d_tau Phi must be exactly 1");
    }
}

#[test]
fn zero_seed_gives_zero_fields() {
    let mut wp = WavePacket::new(&base_profile(), 32).unwrap();
    wp.seed_scale = 0.0;
    let s = wp.snapshot(0.05);
    assert_eq!(s.b_l2(), 0.0);
    assert_eq!(s.psi_l2(), 0.0);
    assert_eq!(s.mixed_degeneration_norm(1.0), 0.0);
}

#[test]
fn initial_quantity_deviation_decays_like_inverse_lambda() {
    // M(lam) = |b^z(0)| + |grad psi(0)| approaches its lam -> inf limit at
    // rate 1/lam (Richardson extrapolation from the two largest lambdas).
    let p = base_profile();
    let m: Vec<f64> = [32u32, 64, 128]
        .iter()
        .map(|&l| {
            let s = WavePacket::new(&p, l).unwrap().snapshot(0.0);
            let (a, b) = s.l2_pair();
            a + b
        })
        .collect();
    let a_inf = 2.0 * m[2] - m[1];
    let d: Vec<f64> = m.iter().map(|v| (v - a_inf).abs()).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "deviation must decay: {d:?}");
    let r01 = d[0] / d[1];
    assert!((1.4..=4.0).contains(&r01), "1/lambda decay, got ratio {r01}");
    // two-sided sandwich with g0 norms: c ||g0|| - C1 (lam ell)^-1 ||g0||_H1
    let wp = WavePacket::new(&p, 64).unwrap();
    let g0_l2 = wp.g0_radial_sobolev(0);
    let g0_h1 = wp.g0_radial_sobolev(1);
    let lam_ell = 64.0 * p.ell;
    // generous bracket constants; the point is the structure of the bound
    assert!(m[1] >= 0.5 * g0_l2 - 10.0 * g0_h1 / lam_ell);
    assert!(m[1] <= 20.0 * g0_l2 + 10.0 * g0_h1 / lam_ell);
}

#[test]
fn psi_to_b_ratio_scales_like_inverse_lambda() {
    let p = base_profile();
    let ratio = |l: u32| {
        let s = WavePacket::new(&p, l).unwrap().snapshot(0.0);
        s.psi_l2() / s.b_l2()
    };
    let (r32, r64) = (ratio(32), ratio(64));
    let halving = r64 / r32;
    assert!((0.4..=0.6).contains(&halving), "ratio should halve: {halving}");
}

#[test]
fn degeneration_slopes_scale_in_lambda_and_p() {
    let p = base_profile();
    let taus: Vec<f64> = (1..=8).map(|k| k as f64).collect();
    let slope = |l: u32, pp: f64| {
        let wp = WavePacket::new(&p, l).unwrap();
        let ts: Vec<f64> = taus.iter().map(|&tau| tau / l as f64).collect();
        wp.degeneration_rate(pp, &ts).unwrap().fit.slope
    };
    let s32 = slope(32, 1.0);
    let s64 = slope(64, 1.0);
    assert!(s32 < 0.0 && s64 < 0.0, "degeneration slopes must be negative");
    let lam_ratio = s64 / s32;
    assert!((1.7..=2.3).contains(&lam_ratio), "lambda ratio {lam_ratio}");
    // proportional to (1/p - 1/2): p = 1 vs p = 4/3 gives factor 2
    let s43 = slope(32, 4.0 / 3.0);
    let p_ratio = s32 / s43;
    assert!((1.6..=2.4).contains(&p_ratio), "p ratio {p_ratio}");
    // p = 2: no degeneration
    let s2 = slope(32, 2.0);
    assert!(s2.abs() <= 0.05 * 32.0, "p=2 slope {s2}");
}

#[test]
fn degeneration_fit_anchored_at_initial_norm() {
    let p = base_profile();
    let wp = WavePacket::new(&p, 32).unwrap();
    let ts: Vec<f64> = (0..=8).map(|k| k as f64 / 32.0).collect();
    let d = wp.degeneration_rate(1.0, &ts).unwrap();
    let predicted_at_0 = d.fit.intercept.exp();
    let measured = d.values[0];
    assert!(
        (predicted_at_0 / measured).ln().abs() < 0.5,
        "fit at t=0: {predicted_at_0} vs measured {measured}"
    );
}

#[test]
fn error_bounded_while_h1_grows() {
    let p = base_profile();
    for &lam in &[32u32, 64] {
        let wp = WavePacket::new(&p, lam).unwrap();
        let t_end = 2.0 * (lam as f64).ln() / lam as f64;
        let g0_h2 = wp.g0_radial_sobolev(2);
        let e0 = wp.snapshot(0.0).err_l2() / g0_h2;
        let mut sup = e0;
        for k in 1..=6 {
            let t = t_end * k as f64 / 6.0;
            sup = sup.max(wp.snapshot(t).err_l2() / g0_h2);
        }
        assert!(sup <= 3.0 * e0, "error must stay bounded: sup {sup} vs initial {e0}");
        // at t = 2/lambda the error has not grown (it actually decays as the
        // weights collapse; the bound is one-sided)
        let e_tau2 = wp.snapshot(2.0 / lam as f64).err_l2() / g0_h2;
        assert!(e_tau2 <= 3.0 * e0, "tau=2 ratio {}", e_tau2 / e0);
        let h1_0 = wp.snapshot(0.0).b_h1();
        let h1_end = wp.snapshot(t_end).b_h1();
        assert!(h1_end / h1_0 >= std::f64::consts::E, "H1 growth {}", h1_end / h1_0);
    }
}

#[test]
fn error_uniform_under_lambda_refinement() {
    // at fixed t * lambda the error norm must not grow with lambda
    let p = base_profile();
    let e = |lam: u32| {
        let wp = WavePacket::new(&p, lam).unwrap();
        wp.snapshot(2.0 / lam as f64).err_l2() / wp.g0_radial_sobolev(2)
    };
    let ratio = e(64) / e(32);
    assert!(ratio <= 1.5, "lambda refinement ratio {ratio}");
}

#[test]
fn nondegenerate_sanity_profile_error_stays_order_one() {
    // constant f on the packet support with a smooth decay to zero well
    // inside (so the chart terminates before f_* can reach 1): no
    // degeneration, residual dominated by the dropped lower-order term,
    // still O(||g0||_{H^2})
    fn cf(r: f64, _ell: f64, _r0: f64) -> f64 {
        0.05 * degmhd::bump::smoothstep((r - 0.4) / 0.2).0
    }
    fn cd1(r: f64, _ell: f64, _r0: f64) -> f64 {
        0.05 * degmhd::bump::smoothstep((r - 0.4) / 0.2).1 / 0.2
    }
    fn cd2(r: f64, _ell: f64, _r0: f64) -> f64 {
        0.05 * degmhd::bump::smoothstep((r - 0.4) / 0.2).2 / 0.04
    }
    let p = RadialProfile::unchecked(0.5, 1.0, ProfileKind::Custom { f: cf, d1: cd1, d2: cd2 });
    let chart = EtaChart::with_resolution(&p, 1e-3).unwrap();
    let wp = WavePacket::from_chart(chart, 32);
    let g0_h2 = wp.g0_radial_sobolev(2);
    let e = wp.snapshot(0.02).err_l2();
    assert!(e > 0.0);
    assert!(e <= 1.0 * g0_h2, "sanity-profile residual {e} vs H2 {g0_h2}");
}

#[test]
fn g0_envelope_norm_identity() {
    // || g0 ||_{L^2(r dr dtheta)} = sqrt(2 pi) || f h0 ||_{L^2(d eta)}
    let wp = WavePacket::new(&base_profile(), 32).unwrap();
    let (lhs, rhs) = wp.g0_identity();
    assert!((lhs - rhs).abs() < 1e-4 * rhs, "identity violated: {lhs} vs {rhs}");
}

#[test]
fn hall_companion_identity_and_smoothing() {
    let p = base_profile();
    // u~^z = -psi~ is definitional; verify the psi-equation residual vanishes
    // to finite-difference tolerance: d_t psi~ + f d_theta b~^z ~ 0.
    let wp = WavePacket::new(&p, 32).unwrap();
    let lam = 32.0;
    let t = 0.03;
    let dt = 0.01 / (lam * lam);
    let (lo, hi) = wp.envelope_support(wp.tau_of_t(t));
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..100 {
        let eta = lo + (hi - lo) * (i as f64 + 0.5) / 100.0;
        let (ap, _) = wp.amplitudes_at(t + dt, eta);
        let (am, _) = wp.amplitudes_at(t - dt, eta);
        let (_, ab) = wp.amplitudes_at(t, eta);
        let dpsi_dt = (ap - am) / (2.0 * dt);
        let r = wp.chart.r_of_eta(eta);
        let f = p.eval(r);
        let i_lam_f = num_complex::Complex64::new(0.0, lam * f);
        let res = dpsi_dt + i_lam_f * ab;
        let term = (i_lam_f * ab).norm();
        worst = worst.max(res.norm());
        scale = scale.max(term);
    }
    assert!(worst <= 1e-3 * scale, "err_psi {worst} vs scale {scale}");

    // smoothing ratio at matched tau: (||u~^z|| + ||grad_perp inv_lap om~||)
    // relative to ||b~|| halves when lambda doubles
    let tau = 2.0;
    let low_over_b = |l: u32| {
        let w = WavePacket::new(&p, l).unwrap();
        let s = w.snapshot(tau / l as f64);
        let (low, _) = s.hall_smoothing_norms();
        low / s.b_l2()
    };
    let (q32, q64, q128) = (low_over_b(32), low_over_b(64), low_over_b(128));
    let h1 = q64 / q32;
    let h2 = q128 / q64;
    assert!((0.35..=0.65).contains(&h1), "smoothing halving {h1}");
    assert!((0.35..=0.65).contains(&h2), "smoothing halving {h2}");

    // gradient side stays uniformly bounded by ||g0||_H1
    let wp64 = WavePacket::new(&p, 64).unwrap();
    let g0_h1 = wp64.g0_radial_sobolev(1);
    for k in 0..=4 {
        let (_, high) = wp64.snapshot(k as f64 * 0.01).hall_smoothing_norms();
        assert!(high <= 2.0 * g0_h1, "gradient norm {high} vs {g0_h1}");
    }
}

#[test]
fn rescaling_reparametrizes_time() {
    let p = base_profile();
    let wp = WavePacket::new(&p, 32).unwrap();
    let w2 = wp.rescaled(2.0);
    // identity at mu = 1
    let w1 = wp.rescaled(1.0);
    let a = wp.snapshot(0.04).mixed_degeneration_norm(1.0);
    let b = w1.snapshot(0.04).mixed_degeneration_norm(1.0);
    assert!((a - b).abs() < 1e-12 * a);
    // matched times: packet for 2f at t equals packet for f at 2t
    let c = w2.snapshot(0.02).mixed_degeneration_norm(1.0);
    let d = wp.snapshot(0.04).mixed_degeneration_norm(1.0);
    assert!((c - d).abs() < 1e-8 * d, "matched-time norms differ: {c} vs {d}");
    // a fixed degeneration level is reached in half the time
    let level = d;
    let find_t = |w: &WavePacket, guess: f64| {
        let mut t = guess;
        for _ in 0..40 {
            let v = w.snapshot(t).mixed_degeneration_norm(1.0);
            t *= 1.0 + 0.1 * (v / level).ln().clamp(-1.0, 1.0);
        }
        t
    };
    let t1 = find_t(&wp, 0.05);
    let t2 = find_t(&w2, 0.025);
    assert!(((t1 / t2) - 2.0).abs() < 0.1, "rescaled timing ratio {}", t1 / t2);
}

#[test]
fn derivative_bound_brute_force() {
    let p = base_profile();
    // t = 0 value proportional to lambda
    let d0 = |l: u32| WavePacket::new(&p, l).unwrap().snapshot(0.0).b_dr_l2();
    let ratio0 = d0(64) / d0(32);
    assert!((1.7..=2.3).contains(&ratio0), "dr bound t=0 ratio {ratio0}");
    // growth rate of log ||d_r b~|| is positive and roughly proportional to lambda
    let rate = |l: u32| {
        let wp = WavePacket::new(&p, l).unwrap();
        let ts: Vec<f64> = (1..=6).map(|k| k as f64 / l as f64).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| wp.snapshot(t).b_dr_l2()).collect();
        degmhd::fit::log_slope(&ts, &vals).slope
    };
    let (r32, r64) = (rate(32), rate(64));
    assert!(r32 > 0.0 && r64 > 0.0);
    let rr = r64 / r32;
    assert!((1.6..=2.4).contains(&rr), "dr growth-rate lambda ratio {rr}");
    // zero seed gives zero
    let mut wp = WavePacket::new(&p, 32).unwrap();
    wp.seed_scale = 0.0;
    assert_eq!(wp.snapshot(0.01).b_dr_l2(), 0.0);
}

#[test]
fn bilinear_degeneration_model_fits() {
    // slope ~ -kappa * lambda * (1/p - 1/2), bilinear with R^2 >= 0.98
    let p = base_profile();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    let mut zs = Vec::new();
    for &l in &[32u32, 64, 128] {
        let wp = WavePacket::new(&p, l).unwrap();
        for &pp in &[1.0, 4.0 / 3.0, 2.0] {
            let ts: Vec<f64> = (1..=8).map(|k| k as f64 / l as f64).collect();
            let slope = wp.degeneration_rate(pp, &ts).unwrap().fit.slope;
            us.push(l as f64);
            vs.push(1.0 / pp - 0.5);
            zs.push(slope);
        }
    }
    let (kappa_neg, r2) = degmhd::fit::bilinear_through_origin(&us, &vs, &zs);
    assert!(kappa_neg < 0.0, "degeneration constant must be negative");
    assert!(r2 >= 0.98, "bilinear fit R^2 = {r2}");
}
