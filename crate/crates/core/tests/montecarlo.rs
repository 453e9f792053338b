use std::f64::consts::PI;

use cuethin::conditional::count_mean;
use cuethin::montecarlo::*;
use cuethin::numerics::{gauss_legendre, PrecisionContext};
use cuethin::opuc::log_toeplitz_det;
use cuethin::symbol::{Symbol, SymbolParams};

fn params(s: f64, l: f64) -> SymbolParams {
    SymbolParams::new(s, l).unwrap()
}

#[test]
fn single_angle_is_uniform() {
    let trials = 10_000;
    let mut a: Vec<f64> = (0..trials as u64)
        .map(|t| {
            let th = sample_cue_eigenvalues(1, &mut trial_rng(3, t)).unwrap()[0];
            (th + PI) / (2.0 * PI)
        })
        .collect();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let d = a
        .iter()
        .enumerate()
        .map(|(i, &u)| ((i + 1) as f64 / trials as f64 - u).max(u - i as f64 / trials as f64))
        .fold(0.0, f64::max);
    // Kolmogorov quantile for p = 0.01.
    assert!(d * (trials as f64).sqrt() < 1.628, "KS statistic {d}");
}

#[test]
fn eigenvalues_lie_on_the_circle_and_are_distinct() {
    let mut rng = trial_rng(5, 0);
    let a = sample_cue_eigenvalues(12, &mut rng).unwrap();
    assert_eq!(a.len(), 12);
    assert!(a.iter().all(|x| x.abs() <= PI));
}

#[test]
fn arc_count_mean_is_rotation_invariant() {
    let (n, a) = (8, 1.3);
    let est = arc_count_estimate(n, 10_000, 17, 0.4, a).unwrap();
    assert!((est.value - cue_arc_mean(n, a)).abs() < 4.0 * est.std_error);
    let rotated = arc_count_estimate(n, 10_000, 18, 2.9, a).unwrap();
    let pooled = (est.std_error.powi(2) + rotated.std_error.powi(2)).sqrt();
    assert!((est.value - rotated.value).abs() < 4.0 * pooled);
}

/// Var N_A = |A| n/(2π) - ∫∫_{A×A} |K(x,y)|² with the CUE kernel.
fn exact_arc_variance(n: usize, a: f64) -> f64 {
    let rule = gauss_legendre(80);
    let k2 = |d: f64| {
        if d.abs() < 1e-12 {
            (n as f64 / (2.0 * PI)).powi(2)
        } else {
            let v = (0.5 * n as f64 * d).sin() / (2.0 * PI * (0.5 * d).sin());
            v * v
        }
    };
    let h = 0.5 * a;
    let double = rule.integrate(-h, h, |x| {
        rule.integrate(-h, x, |y| k2(x - y)) + rule.integrate(x, h, |y| k2(x - y))
    });
    cue_arc_mean(n, a) - double
}

#[test]
fn arc_count_variance_matches_kernel() {
    let (n, a, trials) = (8, 1.3, 100_000);
    let counts: Vec<f64> = (0..trials as u64)
        .map(|t| {
            let ang = sample_cue_eigenvalues(n, &mut trial_rng(23, t)).unwrap();
            ang.iter().filter(|x| x.abs() < 0.5 * a).count() as f64
        })
        .collect();
    let m = counts.iter().sum::<f64>() / trials as f64;
    let var = counts.iter().map(|c| (c - m).powi(2)).sum::<f64>() / (trials - 1) as f64;
    let exact = exact_arc_variance(n, a);
    assert!((var / exact - 1.0).abs() < 0.1, "{var} vs {exact}");
}

#[test]
fn thinning_extremes_and_mean() {
    let ang: Vec<f64> = (0..20).map(|k| -3.0 + 0.3 * k as f64).collect();
    let mut rng = trial_rng(1, 1);
    assert_eq!(thin(&ang, 0.0, &mut rng), ang);
    assert!(thin(&ang, 1.0, &mut rng).is_empty());
    let trials = 100_000;
    let kept: Vec<f64> = (0..trials as u64).map(|t| thin(&ang, 0.3, &mut trial_rng(2, t)).len() as f64).collect();
    let m = kept.iter().sum::<f64>() / trials as f64;
    let se = (20.0 * 0.7 * 0.3 / trials as f64).sqrt();
    assert!((m - 14.0).abs() < 4.0 * se);
}

#[test]
fn no_removal_gives_probability_one() {
    let est = estimate_gap_probability(&McConfig::new(5, 200, 9, params(1.0, 1.0)).unwrap()).unwrap();
    assert_eq!((est.value, est.std_error), (1.0, 0.0));
}

#[test]
fn gap_probability_matches_determinant() {
    let l = PI / 2.0;
    for (n, trials) in [(2, 50_000), (6, 100_000)] {
        let est = estimate_gap_probability(&McConfig::new(n, trials, 1, params(0.5, l)).unwrap()).unwrap();
        let exact =
            log_toeplitz_det(n, &Symbol::new(0.5, l).unwrap(), &PrecisionContext::default()).unwrap().to_f64().exp();
        assert!((est.value - exact).abs() < 4.0 * est.std_error, "n = {n}: {} ± {} vs {exact}", est.value, est.std_error);
        if n == 2 {
            // f0 = 3/4, f1 = 1/(2π) for s = 1/2, L = π/2.
            let f1 = 0.5 / PI;
            assert!((exact - (0.5625 - f1 * f1)).abs() < 1e-14);
        }
    }
}

#[test]
fn conditional_count_matches_determinant_derivative() {
    let p = params(0.5, PI / 2.0);
    let est = estimate_conditional_count(&McConfig::new(6, 100_000, 4, p).unwrap()).unwrap();
    let exact = count_mean(6, &p, &PrecisionContext::default()).unwrap();
    assert!((est.value - exact).abs() < 4.0 * est.std_error, "{} ± {} vs {exact}", est.value, est.std_error);
}

#[test]
fn conditional_count_extremes() {
    let l = 1.1;
    let est = estimate_conditional_count(&McConfig::new(6, 20_000, 8, params(1.0, l)).unwrap()).unwrap();
    assert!((est.value - 6.0 * (1.0 - l / PI)).abs() < 4.0 * est.std_error);
    // A wide γ keeps N = 0 trials frequent; the exact mean here is 7.3e-4.
    let tiny = estimate_conditional_count(&McConfig::new(6, 20_000, 8, params(1e-4, 2.5)).unwrap()).unwrap();
    assert!(tiny.value < 0.01, "{}", tiny.value);
    assert!(estimate_conditional_count(&McConfig::new(6, 10, 8, params(0.0, 1.0)).unwrap()).is_err());
}

#[test]
fn seed_determines_output() {
    let cfg = McConfig::new(6, 3000, 42, params(0.5, PI / 2.0)).unwrap();
    let a = estimate_gap_probability(&cfg).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| estimate_gap_probability(&cfg).unwrap());
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
}

#[test]
fn disjoint_seeds_agree() {
    let p = params(0.5, PI / 2.0);
    let e: Vec<McEstimate> =
        [11, 12, 13].iter().map(|&s| estimate_gap_probability(&McConfig::new(6, 20_000, s, p).unwrap()).unwrap()).collect();
    let pooled = (e.iter().map(|x| x.std_error.powi(2)).sum::<f64>() / 3.0).sqrt();
    let hi = e.iter().map(|x| x.value).fold(f64::MIN, f64::max);
    let lo = e.iter().map(|x| x.value).fold(f64::MAX, f64::min);
    assert!(hi - lo < 5.0 * pooled);
}

#[test]
fn config_validation() {
    assert!(McConfig::new(0, 10, 1, params(0.5, 1.0)).is_err());
    assert!(McConfig::new(3, 0, 1, params(0.5, 1.0)).is_err());
}
