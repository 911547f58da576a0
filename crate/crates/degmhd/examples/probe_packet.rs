use degmhd::packet::WavePacket;
use degmhd::profile::RadialProfile;

fn main() {
    let p = RadialProfile::linear_capped(0.5, 1.0).unwrap();
    for &lam in &[32u32, 64, 128] {
        let wp = WavePacket::new(&p, lam).unwrap();
        // envelope support + L2 conservation
        for &tau in &[0.0, 2.0, 5.0, 10.0] {
            let (lo, hi) = wp.envelope_support(tau);
            let l2 = wp.envelope_l2(tau);
            println!("lam={lam} tau={tau}: supp=({lo:.4},{hi:.4}) inside(-1-tau,-tau/2)={} l2={l2:.6}",
                lo > -1.0 - tau - 1e-9 && hi < -tau / 2.0 + 1e-9);
        }
        // initial data
        let s0 = wp.snapshot(0.0);
        let (bz, gp) = s0.l2_pair();
        let g0_l2 = wp.g0_radial_sobolev(0);
        let g0_h1 = wp.g0_radial_sobolev(1);
        println!("lam={lam}: |bz(0)|={bz:.4} |grad psi(0)|={gp:.4} M={:.4} g0_l2={g0_l2:.4} g0_h1={g0_h1:.4}", bz+gp);
        println!("  psi/b ratio = {:.6} (x lambda = {:.4})", s0.psi_l2()/s0.b_l2(), s0.psi_l2()/s0.b_l2()*lam as f64);
        // degeneration norms at several tau for p=1, 4/3, 2
        for &pp in &[1.0, 4.0/3.0, 2.0] {
            let ts: Vec<f64> = (1..=8).map(|k| k as f64 / lam as f64).collect(); // tau = 1..8
            let fitres = wp.degeneration_rate(pp, &ts).unwrap();
            println!("  p={pp:.3}: slope={:.3} slope/lam={:.4} kappa={:.3} r2={:.4}",
                fitres.fit.slope, fitres.fit.slope / lam as f64, fitres.kappa, fitres.fit.r_squared);
        }
        // error boundedness over [0, 2 ln(lam)/lam]
        let t_end = 2.0 * (lam as f64).ln() / lam as f64;
        let e0 = wp.snapshot(0.0).err_l2();
        let e1 = wp.snapshot(0.5 * t_end).err_l2();
        let e2 = wp.snapshot(t_end).err_l2();
        let h1_0 = wp.snapshot(0.0).b_h1();
        let h1_2 = wp.snapshot(t_end).b_h1();
        let g0_h2 = wp.g0_radial_sobolev(2);
        println!("  err/g0_H2: t=0: {:.4}, mid: {:.4}, end: {:.4}; H1 growth factor {:.2}",
            e0/g0_h2, e1/g0_h2, e2/g0_h2, h1_2/h1_0);
        // hall smoothing
        let s_mid = wp.snapshot(0.5 * t_end);
        let (low, high) = s_mid.hall_smoothing_norms();
        println!("  smoothing low={:.5} (x lam/ell/g0H1 = {:.4}), high={:.4} (/g0H1 = {:.4})",
            low, low * lam as f64 / (0.5 * g0_h1), high, high / g0_h1);
    }
}
