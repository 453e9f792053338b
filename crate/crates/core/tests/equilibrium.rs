use std::f64::consts::PI;

use cuethin::equilibrium::*;
use proptest::prelude::*;

// Reference values from a 50-digit mpmath evaluation that solves for T
// through the gap-angle form of the x equation.
const HALF_PI_T: f64 = 0.989_013_003_577_577_360_3;
const HALF_PI_OMEGA: f64 = 0.175_901_671_107_340_822_7;
const HALF_PI_ELL: f64 = 0.400_203_503_867_492_744_9;
const HALF_PI_IM_TAU: f64 = 1.635_509_700_550_263_224;
const HALF_PI_INT_OMEGA: f64 = 0.277_619_295_347_050_819_3;

const TWO_THIRDS_T: f64 = 0.803_635_261_798_224_055_5;
const TWO_THIRDS_OMEGA: f64 = 0.172_568_794_013_199_564_7;
const TWO_THIRDS_ELL: f64 = 0.114_986_091_619_620_770_2;
const TWO_THIRDS_IM_TAU: f64 = 2.077_866_891_530_199_299;
const TWO_THIRDS_INT_OMEGA: f64 = 0.089_090_745_433_733_178_37;

#[test]
fn critical_rates() {
    assert!(critical_x(PI - 1e-15).abs() < 1e-14);
    assert!((critical_x(PI / 2.0) - 2.0 * (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15);
    assert!((critical_x(PI / 2.0) - 1.762_747_174_039_086).abs() < 1e-14);
    assert!((critical_x(2.0 * PI / 3.0) - 3f64.ln()).abs() < 1e-15);
}

#[test]
fn t_endpoints() {
    let l = PI / 2.0;
    assert_eq!(solve_t(critical_x(l), l).unwrap(), 0.0);
    assert_eq!(solve_t(0.0, l).unwrap(), PI - l);
    assert!(solve_t(-0.1, l).is_err());
    assert!(solve_t(2.0 * critical_x(l), l).is_err());
    assert!((x_of_t(0.0, l) - critical_x(l)).abs() < 1e-13);
    assert!(x_of_t(PI - l, l).abs() < 1e-13);
}

#[test]
fn frozen_half_pi() {
    let l = PI / 2.0;
    let eq = EquilibriumData::new(critical_x(l) / 2.0, l).unwrap();
    assert!((eq.t - HALF_PI_T).abs() < 1e-13, "{}", eq.t);
    assert!((eq.omega_mass - HALF_PI_OMEGA).abs() < 1e-13, "{}", eq.omega_mass);
    assert!((eq.ell - HALF_PI_ELL).abs() < 1e-13, "{}", eq.ell);
    let tau = eq.tau.unwrap();
    assert_eq!(tau.re, 0.0);
    assert!((tau.im - HALF_PI_IM_TAU).abs() < 1e-12, "{tau}");
    let i = omega_rate_integral(eq.x, l).unwrap();
    assert!((i - HALF_PI_INT_OMEGA).abs() < 1e-11, "{i}");
}

#[test]
fn frozen_two_thirds_pi() {
    let l = 2.0 * PI / 3.0;
    let eq = EquilibriumData::new(critical_x(l) / 3.0, l).unwrap();
    assert!((eq.t - TWO_THIRDS_T).abs() < 1e-13, "{}", eq.t);
    assert!((eq.omega_mass - TWO_THIRDS_OMEGA).abs() < 1e-13, "{}", eq.omega_mass);
    assert!((eq.ell - TWO_THIRDS_ELL).abs() < 1e-13, "{}", eq.ell);
    assert!((eq.tau.unwrap().im - TWO_THIRDS_IM_TAU).abs() < 1e-12);
    let i = omega_rate_integral(eq.x, l).unwrap();
    assert!((i - TWO_THIRDS_INT_OMEGA).abs() < 1e-11, "{i}");
}

#[test]
fn x_equation_matches_gap_form() {
    for &l in &[0.4, PI / 2.0, 2.0, 2.9] {
        for k in 1..10 {
            let t = (PI - l) * k as f64 / 10.0;
            let a = x_of_t(t, l);
            let b = x_of_gap(t, l);
            assert!((a - b).abs() < 1e-12, "L={l} T={t}: {a} vs {b}");
        }
    }
}

#[test]
fn mass_limits() {
    let l = 1.1;
    assert!((omega_mass(0.0, l).unwrap() - (PI - l) / PI).abs() < 1e-15);
    assert_eq!(omega_mass(critical_x(l), l).unwrap(), 0.0);
    assert_eq!(omega_mass(5.0 * critical_x(l), l).unwrap(), 0.0);
}

#[test]
fn ell_limits_and_literal_form() {
    assert_eq!(ell_constant(0.0, 1.3).unwrap(), 0.0);
    assert!((ell_constant(critical_x(PI / 2.0), PI / 2.0).unwrap() - 2f64.ln()).abs() < 1e-15);
    assert!((ell_constant(9.0, PI / 2.0).unwrap() - 0.693_147_180_559_945_3).abs() < 1e-15);
    for &l in &[0.5, PI / 2.0, 2.5] {
        for k in 0..=6 {
            let t = (PI - l) * k as f64 / 6.0;
            let x = x_of_t(t, l).max(0.0);
            let lit = ell_constant_literal(t, l);
            let main = if k == 6 {
                0.0
            } else if k == 0 { ell_constant(critical_x(l), l).unwrap() } else { ell_constant(x, l).unwrap() };
            assert!((lit - main).abs() < 1e-11, "L={l} T={t}: {lit} vs {main}");
        }
    }
}

#[test]
fn density_values() {
    let l = PI / 2.0;
    let uni = EquilibriumData::new(0.0, l).unwrap();
    for th in [-3.0, -1.0, 0.0, 0.5, 2.0, PI] {
        assert!((uni.density(th) - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }
    let eq = EquilibriumData::new(critical_x(l) / 2.0, l).unwrap();
    let want = ((1.0 - eq.t.cos()) / (1.0 + l.cos())).sqrt() / (2.0 * PI);
    assert!((eq.density(PI) - want).abs() < 1e-15);
    let mid = 0.5 * (l + PI - eq.t);
    assert_eq!(eq.density(mid), 0.0);
    assert_eq!(eq.side(mid), ArcSide::Gap);
    let one = EquilibriumData::new(3.0, l).unwrap();
    assert_eq!(one.density(2.0), 0.0);
    assert_eq!(one.density(PI), 0.0);
}

#[test]
fn normalization_grid() {
    let mut count = 0;
    for &l in &[0.3, 1.0, PI / 2.0, 2.2, 3.0] {
        for &frac in &[0.0, 0.1, 0.5, 0.9, 1.0] {
            let eq = EquilibriumData::new(frac * critical_x(l), l).unwrap();
            let m = eq.total_mass();
            assert!((m - 1.0).abs() < 1e-10, "L={l} x/x_c={frac}: {m}");
            let split = gamma_mass(eq.t, l) + eq.omega_mass;
            assert!((split - 1.0).abs() < 1e-10, "L={l} x/x_c={frac}: {split}");
            count += 1;
        }
    }
    assert!(count >= 20);
}

#[test]
fn appendix_relation() {
    let l = PI / 2.0;
    let xc = critical_x(l);
    let h = 1e-5;
    for k in 1..=10 {
        let x = xc * k as f64 / 11.0;
        let om = |x: f64| omega_mass(x, l).unwrap();
        let el = |x: f64| ell_constant(x, l).unwrap();
        let d_ell = (el(x + h) - el(x - h)) / (2.0 * h);
        let d_om = (om(x + h) - om(x - h)) / (2.0 * h);
        let r = om(x) - d_ell - x * d_om;
        assert!(r.abs() < 1e-6, "x={x}: {r:e}");
        // dΩ/dx = -Im τ / 2π.
        let tau = period_tau(x, l).unwrap();
        assert!((d_om + tau.im / (2.0 * PI)).abs() < 1e-6, "x={x}");
    }
}

#[test]
fn closed_form_rate_integral() {
    for &l in &[PI / 4.0, PI / 2.0, 2.0 * PI / 3.0] {
        for &frac in &[0.2, 0.6] {
            let x = frac * critical_x(l);
            let eq = EquilibriumData::new(x, l).unwrap();
            let closed = 0.5 * (eq.ell + x * eq.omega_mass);
            let quad = omega_rate_integral(x, l).unwrap();
            assert!((closed - quad).abs() < 1e-10, "L={l} x={x}: {closed} vs {quad}");
        }
    }
}

#[test]
fn rate_integral_identity() {
    for &l in &[PI / 4.0, PI / 2.0, 2.0 * PI / 3.0] {
        let v = omega_rate_integral(critical_x(l), l).unwrap();
        assert!((v + (0.5 * l).sin().ln()).abs() < 1e-8, "L={l}: {v}");
    }
    assert!((omega_rate_integral(critical_x(PI / 2.0), PI / 2.0).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-8);
    assert_eq!(omega_rate_integral(0.0, 1.0).unwrap(), 0.0);
}

#[test]
fn t_decreasing_in_x() {
    let l = 1.2;
    let xc = critical_x(l);
    let mut prev = PI - l;
    for k in 1..20 {
        let t = solve_t(xc * k as f64 / 20.0, l).unwrap();
        assert!(t < prev);
        prev = t;
    }
}

#[test]
fn small_gap_law() {
    for &l in &[PI / 2.0, 2.0] {
        for &(alpha, tol) in &[(1e-3, 0.02), (1e-4, 0.002)] {
            let x = x_of_t(PI - l - alpha, l);
            let ratio = x / alpha;
            assert!((ratio / (PI / 2.0) - 1.0).abs() < tol, "L={l} alpha={alpha}: {ratio}");
        }
        // Im τ + (2/π) log α stays bounded as α shrinks.
        let shifted: Vec<f64> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&a| {
                let x = x_of_t(PI - l - a, l);
                period_tau(x, l).unwrap().im + 2.0 / PI * a.ln()
            })
            .collect();
        assert!((shifted[0] - shifted[2]).abs() < 0.05, "{shifted:?}");
    }
}

#[test]
fn euler_lagrange_conditions() {
    let l = PI / 2.0;
    let eq = EquilibriumData::new(critical_x(l) / 2.0, l).unwrap();
    for eta in [0.0, 0.7, -1.2, PI, PI - 0.5 * eq.t] {
        let r = eq.euler_lagrange_check(eta);
        assert!(r.abs() < 1e-8, "eta={eta}: {r:e}");
    }
    let gap = l + 0.3 * (PI - eq.t - l);
    assert!(eq.euler_lagrange_check(gap) < -1e-3);
    let uni = EquilibriumData::new(0.0, l).unwrap();
    for eta in [0.1, 1.0, 2.0, 3.0] {
        assert!(uni.euler_lagrange_check(eta).abs() < 1e-10);
    }
    let single = EquilibriumData::new(critical_x(l), l).unwrap();
    assert!(single.euler_lagrange_check(0.4).abs() < 1e-8);
    assert!(single.euler_lagrange_check(2.5) < 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]
    #[test]
    fn tau_purely_imaginary(l in 0.3f64..2.8, frac in 0.05f64..0.95) {
        let tau = period_tau(frac * critical_x(l), l).unwrap();
        prop_assert_eq!(tau.re, 0.0);
        prop_assert!(tau.im > 0.0);
    }

    #[test]
    fn density_nonnegative(l in 0.3f64..2.8, frac in 0.0f64..1.0, th in -PI..PI) {
        let eq = EquilibriumData::new(frac * critical_x(l), l).unwrap();
        let d = eq.density(th);
        prop_assert!(d >= 0.0 && d.is_finite() || th.abs() == l);
    }
}
