//! Haar-unitary sampling with independent thinning, and weight estimators
//! for the gap probability and the conditional count.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::equilibrium::wrap;
use crate::error::{Error, Result};
use crate::symbol::SymbolParams;

const SCHUR_EPS: f64 = 1e-14;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub p: SymbolParams,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Trials that entered the estimate.
    pub trials: usize,
    /// Trials dropped because the eigensolve failed.
    pub discarded: usize,
}

impl McConfig {
    pub fn new(n: usize, trials: usize, seed: u64, p: SymbolParams) -> Result<Self> {
        if n == 0 || trials == 0 {
            return Err(Error::InvalidParameter(format!("need n >= 1 and trials >= 1 (n = {n}, trials = {trials})")));
        }
        Ok(Self { n, trials, seed, p })
    }
}

/// The generator for one trial: the seed picks the key, the trial index the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Eigenvalue angles in (-π, π] of a Haar-distributed unitary matrix.
///
/// QR of a complex Ginibre matrix, with the columns of Q rescaled by the
/// phases of diag(R) so that the result is Haar.
pub fn sample_cue_eigenvalues<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let z = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let (mut q, r) = z.qr().unpack();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        col *= ph;
    }
    let schur = q
        .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::NoConvergence(format!("Schur iteration failed for n = {n}")))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|k| t[(k, k)].arg()).collect())
}

/// Removes each angle independently with probability s.
pub fn thin<R: Rng + ?Sized>(angles: &[f64], s: f64, rng: &mut R) -> Vec<f64> {
    angles.iter().copied().filter(|_| rng.random::<f64>() >= s).collect()
}

/// Number of angles outside the closed arc [-L, L].
pub fn count_outside(angles: &[f64], l: f64) -> usize {
    angles.iter().filter(|&&a| wrap(a).abs() > l).count()
}

/// Count N of eigenvalues in γ^c for every successful trial, in trial order.
fn outside_counts(cfg: &McConfig, l: f64) -> (Vec<usize>, usize) {
    let res: Vec<Option<usize>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            sample_cue_eigenvalues(cfg.n, &mut rng).ok().map(|a| count_outside(&a, l))
        })
        .collect();
    let discarded = res.iter().filter(|r| r.is_none()).count();
    (res.into_iter().flatten().collect(), discarded)
}

/// Pairwise sum, so the rounding does not depend on the thread count.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let m = pairwise_sum(v) / v.len() as f64;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let dev: Vec<f64> = v.iter().map(|x| (x - m) * (x - m)).collect();
    let var = pairwise_sum(&dev) / (v.len() - 1) as f64;
    (m, (var / v.len() as f64).sqrt())
}

fn no_trials(discarded: usize) -> Error {
    Error::UnreliableSample(format!("all {discarded} trials failed"))
}

/// P(Φ ⊂ γ) = E[s^N] with N = #(Θ ∩ γ^c).
pub fn estimate_gap_probability(cfg: &McConfig) -> Result<McEstimate> {
    let sym = cfg.p.at(cfg.n)?;
    let s = sym.s();
    let (counts, discarded) = outside_counts(cfg, sym.l);
    if counts.is_empty() {
        return Err(no_trials(discarded));
    }
    let w: Vec<f64> = counts.iter().map(|&k| s.powi(k as i32)).collect();
    let (value, std_error) = mean_and_se(&w);
    Ok(McEstimate { value, std_error, trials: w.len(), discarded })
}

/// E(N | Φ ⊂ γ) = E[N s^N]/E[s^N], with a delta-method standard error.
pub fn estimate_conditional_count(cfg: &McConfig) -> Result<McEstimate> {
    let sym = cfg.p.at(cfg.n)?;
    let s = sym.s();
    if !(s > 0.0) {
        return Err(Error::InvalidParameter("the count estimator needs s > 0".into()));
    }
    let (counts, discarded) = outside_counts(cfg, sym.l);
    if counts.is_empty() {
        return Err(no_trials(discarded));
    }
    let w: Vec<f64> = counts.iter().map(|&k| s.powi(k as i32)).collect();
    let y: Vec<f64> = counts.iter().zip(&w).map(|(&k, &wk)| k as f64 * wk).collect();
    let t = w.len() as f64;
    let wbar = pairwise_sum(&w) / t;
    if !(wbar > 0.0) {
        return Err(Error::UnreliableSample(format!("weight mean {wbar} is not positive")));
    }
    let ratio = pairwise_sum(&y) / t / wbar;
    let resid: Vec<f64> = y.iter().zip(&w).map(|(a, b)| a - ratio * b).collect();
    let (_, se) = mean_and_se(&resid);
    Ok(McEstimate { value: ratio, std_error: se / wbar, trials: w.len(), discarded })
}

/// Mean and standard error of the number of eigenvalues in the arc
/// (offset - a/2, offset + a/2); used for rotation checks.
pub fn arc_count_estimate(n: usize, trials: usize, seed: u64, offset: f64, a: f64) -> Result<McEstimate> {
    let res: Vec<Option<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            sample_cue_eigenvalues(n, &mut rng)
                .ok()
                .map(|ang| ang.iter().filter(|&&x| wrap(x - offset).abs() < 0.5 * a).count() as f64)
        })
        .collect();
    let discarded = res.iter().filter(|r| r.is_none()).count();
    let v: Vec<f64> = res.into_iter().flatten().collect();
    if v.is_empty() {
        return Err(no_trials(discarded));
    }
    let (value, std_error) = mean_and_se(&v);
    Ok(McEstimate { value, std_error, trials: v.len(), discarded })
}

/// Expected number of CUE eigenvalues in an arc of length a.
pub fn cue_arc_mean(n: usize, a: f64) -> f64 {
    n as f64 * a / (2.0 * PI)
}
