use std::f64::consts::PI;

use cuethin::numerics::{gauss_legendre, BigComplex, PrecisionContext};
use cuethin::opuc::*;
use cuethin::symbol::{fourier_coeff, symbol_eval, Symbol};
use num_complex::Complex64;
use proptest::prelude::*;
use rug::Float;

mod common;

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

#[test]
fn lebesgue_weight_is_trivial() {
    let p = Symbol::new(1.0, 1.0).unwrap();
    let st = build_state(10, &p, &ctx()).unwrap();
    assert!(st.alpha().iter().all(|a| a.is_zero()));
    assert!(st.h().iter().all(|h| *h == 1));
    assert!(log_toeplitz_det(10, &p, &ctx()).unwrap().is_zero());
    let z = Complex64::new(0.3, -0.8);
    let (phi, star) = phi_eval_c64(&st, z);
    assert!((phi - z.powi(10)).norm() < 1e-15);
    assert!((star - 1.0).norm() < 1e-15);
    let (d, ds) = phi_derivative_eval(&st, &BigComplex::from_c64(256, z));
    assert!((d.to_c64() - 10.0 * z.powi(9)).norm() < 1e-14);
    assert!(ds.to_c64().norm() < 1e-15);
}

#[test]
fn two_by_two_values() {
    let p = Symbol::new(0.0, PI / 2.0).unwrap();
    let st = build_state(1, &p, &ctx()).unwrap();
    assert!((st.h()[0].to_f64() - 0.5).abs() < 1e-16);
    assert!((st.h()[1].to_f64() - (0.5 - 2.0 / (PI * PI))).abs() < 1e-15);
    let ld = log_toeplitz_det(2, &p, &ctx()).unwrap().to_f64();
    assert!((ld - (0.25 - 1.0 / (PI * PI)).ln()).abs() < 1e-14);
    assert!((ld + 1.9059).abs() < 1e-4);
    let l1 = log_toeplitz_det(1, &p, &ctx()).unwrap().to_f64();
    assert!((l1 - 0.5f64.ln()).abs() < 1e-15);
}

#[test]
fn phi_two_solves_normal_equations() {
    let p = Symbol::new(0.0, PI / 2.0).unwrap();
    let (f0, f1, f2) = (fourier_coeff(0, &p), fourier_coeff(1, &p), fourier_coeff(2, &p));
    // φ_2 = z² + a z + b with b f0 + a f1 = -f2 and b f1 + a f0 = -f1.
    let det = f0 * f0 - f1 * f1;
    let b = (-f2 * f0 + f1 * f1) / det;
    let a = (-f1 * f0 + f2 * f1) / det;
    let st = build_state(2, &p, &ctx()).unwrap();
    let c: Vec<f64> = st.coeffs().iter().map(Float::to_f64).collect();
    assert!((c[0] - b).abs() < 1e-15 && (c[1] - a).abs() < 1e-15 && c[2] == 1.0);
    let z = Complex64::new(0.4, 0.7);
    let (phi, star) = phi_eval_c64(&st, z);
    assert!((phi - (z * z + a * z + b)).norm() < 1e-14);
    assert!((star - (1.0 + a * z + b * z * z)).norm() < 1e-14);
    let (_, star0) = phi_eval_c64(&st, Complex64::new(0.0, 0.0));
    assert!((star0 - 1.0).norm() < 1e-15);
}

#[test]
fn determinant_oracle_grid() {
    for n in 1..=8 {
        for &s in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            for &l in &[PI / 4.0, PI / 2.0, 2.0 * PI / 3.0, 0.9 * PI, 0.99 * PI] {
                let p = Symbol::new(s, l).unwrap();
                let lev = log_toeplitz_det(n, &p, &ctx()).unwrap();
                let direct = common::direct_log_det(n, l, s, 256);
                let r = common::rel_diff(&lev, &direct);
                assert!(r < 1e-20, "n={n} s={s} L={l}: rel {r:e}");
            }
        }
    }
}

#[test]
fn monotone_in_s() {
    for &l in &[0.7, PI / 2.0, 2.5] {
        for n in [3usize, 12, 40] {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..=20 {
                let s = i as f64 / 20.0;
                let v = log_toeplitz_det(n, &Symbol::new(s, l).unwrap(), &ctx()).unwrap().to_f64();
                assert!(v >= prev, "n={n} L={l} s={s}");
                prev = v;
            }
        }
    }
}

#[test]
fn orthogonality_by_quadrature() {
    let (s, l) = (0.3, 1.2);
    let p = Symbol::new(s, l).unwrap();
    let states: Vec<_> = (0..=6).map(|k| build_state(k, &p, &ctx()).unwrap()).collect();
    let rule = gauss_legendre(40);
    // The weight is constant on each piece, so split at ±L.
    let pieces = [(-l, l), (l, 2.0 * PI - l)];
    for j in 0..=6 {
        for k in 0..=6 {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(a, b) in &pieces {
                acc += rule.integrate(a, b, |t| {
                    let z = Complex64::from_polar(1.0, t);
                    let (pj, _) = phi_eval_c64(&states[j], z);
                    let (pk, _) = phi_eval_c64(&states[k], z);
                    pj * pk.conj() * symbol_eval(t, &p)
                });
            }
            acc /= 2.0 * PI;
            let want = if j == k { states[j].h_n().to_f64() } else { 0.0 };
            assert!((acc - want).norm() < 1e-13, "j={j} k={k}: {acc}");
        }
    }
}

#[test]
fn derivative_matches_finite_difference() {
    let p = Symbol::new(0.37, 2.1).unwrap();
    let st = build_state(3, &p, &ctx()).unwrap();
    let z = Complex64::new(0.6, 0.5);
    let h = 1e-6;
    let (a, sa) = phi_eval_c64(&st, z + h);
    let (b, sb) = phi_eval_c64(&st, z - h);
    let (d, ds) = phi_derivative_eval(&st, &BigComplex::from_c64(256, z));
    assert!((d.to_c64() - (a - b) / (2.0 * h)).norm() < 1e-3 * d.to_c64().norm());
    assert!((ds.to_c64() - (sa - sb) / (2.0 * h)).norm() < 1e-3 * ds.to_c64().norm().max(1.0));
    let big = build_state(9, &p, &ctx()).unwrap();
    let zz = Complex64::new(1e4, 0.0);
    let (dd, _) = phi_derivative_eval(&big, &BigComplex::from_c64(256, zz));
    // Leading coefficient of φ′ is n.
    assert!((dd.to_c64() / zz.powi(8) - 9.0).norm() < 1e-2);
}

#[test]
fn zeros_trivial_weight_at_origin() {
    let st = build_state(7, &Symbol::new(1.0, 1.0).unwrap(), &ctx()).unwrap();
    let z = phi_zeros(&st, &ctx()).unwrap();
    assert_eq!(z.len(), 7);
    assert!(z.iter().all(|w| w.norm() < 1e-12));
}

#[test]
fn zeros_inside_and_conjugate_closed() {
    let p = Symbol::new(0.5, 2.0 * PI / 3.0).unwrap();
    let st = build_state(14, &p, &ctx()).unwrap();
    let zs = phi_zeros(&st, &ctx()).unwrap();
    assert_eq!(zs.len(), 14);
    for z in &zs {
        assert!(z.norm() < 1.0);
        assert!(zs.iter().any(|w| (w - z.conj()).norm() < 1e-10));
        let (v, _) = phi_eval_c64(&st, *z);
        assert!(v.norm() < 1e-12);
    }
    // At n = 14 the zeros still sit near radius 0.7 with no isolated one.
    let deep: Vec<_> = zs.iter().filter(|z| z.norm() <= 0.5).collect();
    assert!(deep.is_empty(), "{deep:?}");
}

#[test]
fn isolated_interior_zero_case_one() {
    let p = Symbol::new(0.5, 2.0 * PI / 3.0).unwrap();
    let st = build_state(22, &p, &ctx()).unwrap();
    let zs = phi_zeros(&st, &ctx()).unwrap();
    let deep: Vec<_> = zs.iter().filter(|z| z.norm() <= 0.5).collect();
    assert_eq!(deep.len(), 1);
    assert!((deep[0] - Complex64::new(-0.12336047552294306, 0.0)).norm() < 1e-12, "{:?}", deep[0]);
}

#[test]
fn zero_degree_cap() {
    let st = build_state(65, &Symbol::new(0.5, 1.0).unwrap(), &ctx()).unwrap();
    assert!(phi_zeros(&st, &ctx()).is_err());
}

#[test]
fn tiny_s_stays_positive() {
    // s = 0 at n = 300 needs far more than 53 bits; positivity must hold.
    let p = Symbol::new(0.0, PI / 2.0).unwrap();
    let st = build_state(300, &p, &ctx()).unwrap();
    assert!(st.h().iter().all(|h| *h > 0));
    assert!(st.alpha().iter().all(|a| a.clone().abs() < 1));
    assert_eq!(st.prec(), 2400);
}

#[test]
fn escalation_reports_exhaustion() {
    // 64 bits with no retries cannot resolve D_200 at s = 0.
    let p = Symbol::new(0.0, PI / 4.0).unwrap();
    let s = Float::with_val(64, 0);
    let r = build_state_at(200, p.l, &s, 64);
    assert!(matches!(r, Err(cuethin::Error::PrecisionExhausted { .. })), "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn levinson_matches_direct(n in 1usize..=8, s in 0.0f64..=1.0, l in 0.05f64..3.1) {
        let lev = log_toeplitz_det(n, &Symbol::new(s, l).unwrap(), &ctx()).unwrap();
        let direct = common::direct_log_det(n, l, s, 256);
        prop_assert!(common::rel_diff(&lev, &direct) < 1e-20 || Float::with_val(256, &lev - &direct).abs() < 1e-60);
    }

    #[test]
    fn norms_follow_verblunsky(n in 1usize..30, s in 0.0f64..1.0, l in 0.1f64..3.0) {
        let st = build_state(n, &Symbol::new(s, l).unwrap(), &ctx()).unwrap();
        for k in 0..n {
            let a = &st.alpha()[k];
            prop_assert!(a.clone().abs() < 1);
            let want = Float::with_val(256, &st.h()[k] * Float::with_val(256, 1 - Float::with_val(256, a.square_ref())));
            prop_assert!(common::rel_diff(&st.h()[k + 1], &want) < 1e-70);
        }
    }
}

#[test]
fn zero_counting_measure_tracks_omega() {
    use cuethin::equilibrium::{critical_x, EquilibriumData};
    use cuethin::symbol::SymbolParams;
    let l = PI / 2.0;
    let x = critical_x(l) / 2.0;
    let eq = EquilibriumData::new(x, l).unwrap();
    let mut errs = Vec::new();
    for n in [16usize, 32, 64] {
        let st = build_state(n, &SymbolParams::with_rate(x, l).unwrap().at(n).unwrap(), &ctx()).unwrap();
        let zs = phi_zeros(&st, &ctx()).unwrap();
        let near = zs.iter().filter(|z| z.arg().abs() >= PI - eq.t - 0.2).count();
        errs.push((near as f64 / n as f64 - eq.omega_mass).abs());
    }
    assert!(errs[2] <= 0.1, "{errs:?}");
}
