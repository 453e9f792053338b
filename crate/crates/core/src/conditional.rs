//! Finite-n observables of the conditional CUE: Christoffel–Darboux kernel,
//! one-point density and the conditional count of unobserved eigenvalues.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, PrecisionContext};
use crate::opuc::{build_state, log_toeplitz_det_with_s, phi_with_derivative, OpucState};
use crate::symbol::{Symbol, SymbolParams};

/// Below this angular separation the kernel uses the diagonal formula.
pub const DIAGONAL_SWITCH: f64 = 1e-10;
/// Precision of the per-point normalized values; ample for the cancellation
/// in the CD numerator at separations above the diagonal switch.
const POINT_BITS: u32 = 256;

/// Kernel values on a set of angles.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelGrid {
    pub thetas: Vec<f64>,
    /// values[j][k] = K_n(e^{iθ_j}, e^{iθ_k}).
    pub values: Vec<Vec<Complex64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountStats {
    pub mean: f64,
    pub variance: f64,
    /// Step in log s used by the central differences; 0 when not needed.
    pub fd_step: f64,
}

/// φ_n and φ_n* at one point, scaled by √(f/h_n).
#[derive(Clone, Debug)]
struct PointValues {
    phi: BigComplex,
    star: BigComplex,
}

/// The degree-n OPUC data for one symbol, ready for kernel evaluation.
#[derive(Clone, Debug)]
pub struct ConditionalCue {
    n: usize,
    symbol: Symbol,
    state: OpucState,
}

impl ConditionalCue {
    pub fn new(n: usize, p: &SymbolParams, ctx: &PrecisionContext) -> Result<Self> {
        Self::from_symbol(n, p.at(n)?, ctx)
    }

    pub fn from_symbol(n: usize, symbol: Symbol, ctx: &PrecisionContext) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let state = build_state(n, &symbol, ctx)?;
        Ok(Self { n, symbol, state })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn state(&self) -> &OpucState {
        &self.state
    }

    /// f(e^{iθ}) at the state's precision.
    fn weight(&self, theta: f64) -> Float {
        let prec = self.state.prec();
        let t = crate::equilibrium::wrap(theta);
        if t.abs() <= self.symbol.l {
            Float::with_val(prec, 1)
        } else {
            self.symbol.s_big(prec)
        }
    }

    fn point(&self, theta: f64) -> PointValues {
        let prec = self.state.prec();
        let z = BigComplex::cis(&Float::with_val(prec, theta));
        let [phi, star, _, _] = phi_with_derivative(&self.state, &z);
        let mut scale = Float::with_val(prec, self.weight(theta) / self.state.h_n());
        scale.sqrt_mut();
        let round = |v: BigComplex| {
            let v = v.scale(&scale);
            BigComplex::new(Float::with_val(POINT_BITS, &v.re), Float::with_val(POINT_BITS, &v.im))
        };
        PointValues { phi: round(phi), star: round(star) }
    }

    fn pair(&self, a: &PointValues, b: &PointValues, theta: f64, mu: f64) -> Complex64 {
        if (theta - mu).abs() < DIAGONAL_SWITCH {
            return Complex64::new(self.n as f64 * self.density(theta), 0.0);
        }
        let num = &(&a.star * &b.star.conj()) - &(&a.phi * &b.phi.conj());
        // 1 - e^{i(θ-μ)} = -2i sin((θ-μ)/2) e^{i(θ-μ)/2}
        let d = theta - mu;
        let den = Complex64::from_polar(2.0 * (0.5 * d).sin(), 0.5 * d - 0.5 * PI);
        num.to_c64() / (den * (2.0 * PI))
    }

    /// K_n(e^{iθ}, e^{iμ}) by the Christoffel–Darboux formula.
    pub fn kernel(&self, theta: f64, mu: f64) -> Complex64 {
        if (theta - mu).abs() < DIAGONAL_SWITCH {
            return Complex64::new(self.n as f64 * self.density(theta), 0.0);
        }
        self.pair(&self.point(theta), &self.point(mu), theta, mu)
    }

    /// ψ_{n,s,L}(e^{iθ}) = K_n(e^{iθ}, e^{iθ})/n.
    pub fn density(&self, theta: f64) -> f64 {
        let prec = self.state.prec();
        let z = BigComplex::cis(&Float::with_val(prec, theta));
        let [phi, star, dphi, dstar] = phi_with_derivative(&self.state, &z);
        let inner = &(&dphi * &phi.conj()) - &(&dstar * &star.conj());
        let v = &z * &inner;
        let mut r = Float::with_val(prec, &v.re * self.weight(theta));
        r /= self.state.h_n();
        r /= self.n as u64;
        r.to_f64() / (2.0 * PI)
    }

    /// Kernel on all pairs of the given angles; point values are computed
    /// once per angle and the pairs in parallel.
    pub fn kernel_grid(&self, thetas: &[f64]) -> KernelGrid {
        let points: Vec<PointValues> = thetas.par_iter().map(|&t| self.point(t)).collect();
        let diag: Vec<f64> = thetas.par_iter().map(|&t| self.n as f64 * self.density(t)).collect();
        let m = thetas.len();
        let values: Vec<Vec<Complex64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                (0..m)
                    .map(|k| {
                        if (thetas[j] - thetas[k]).abs() < DIAGONAL_SWITCH {
                            Complex64::new(diag[j], 0.0)
                        } else {
                            self.pair(&points[j], &points[k], thetas[j], thetas[k])
                        }
                    })
                    .collect()
            })
            .collect();
        KernelGrid { thetas: thetas.to_vec(), values }
    }
}

/// K_n(e^{iθ}, e^{iμ}) for the symbol of the family at size n.
pub fn cd_kernel(n: usize, p: &SymbolParams, theta: f64, mu: f64) -> Result<Complex64> {
    Ok(ConditionalCue::new(n, p, &PrecisionContext::for_determinant(n))?.kernel(theta, mu))
}

pub fn one_point_density(n: usize, p: &SymbolParams, theta: f64) -> Result<f64> {
    Ok(ConditionalCue::new(n, p, &PrecisionContext::for_determinant(n))?.density(theta))
}

/// Mean and variance of #(Θ ∩ γ^c) given Φ ⊂ γ, as the first two
/// derivatives of log D_n in log s by central differences.
pub fn count_stats(n: usize, p: &SymbolParams, ctx: &PrecisionContext) -> Result<CountStats> {
    let sym = p.at(n)?;
    let bits = ctx.bits().max(PrecisionContext::for_determinant(n).bits());
    if sym.s() == 0.0 && sym.log_s() == f64::NEG_INFINITY {
        return Ok(CountStats { mean: 0.0, variance: 0.0, fd_step: 0.0 });
    }
    let wp = 2 * bits;
    let s = sym.s_big(wp);
    let dctx = PrecisionContext::new(bits)?;
    let f_at = |shift: &Float| -> Result<Float> {
        let sv = Float::with_val(wp, &s * Float::with_val(wp, shift.exp_ref()));
        log_toeplitz_det_with_s(n, sym.l, &sv, &dctx)
    };
    let f0 = f_at(&Float::with_val(wp, 0))?;
    let estimate = |h: &Float| -> Result<(Float, Float)> {
        let fp = f_at(h)?;
        let fm = f_at(&Float::with_val(wp, -h))?;
        let mean = Float::with_val(wp, &fp - &fm) / Float::with_val(wp, h * 2u32);
        let mut second = Float::with_val(wp, &fp + &fm);
        second -= Float::with_val(wp, &f0 * 2u32);
        second /= Float::with_val(wp, h.square_ref());
        Ok((mean, second))
    };

    // h = 2^(-bits/4); the estimate at 2h must agree to the expected O(h²).
    let mut h = Float::with_val(wp, Float::u_exp(1, -((bits / 4) as i32)));
    let tol = Float::with_val(wp, Float::u_exp(1, -((bits / 8) as i32)));
    for _ in 0..4 {
        let (m1, v1) = estimate(&h)?;
        let (m2, v2) = estimate(&Float::with_val(wp, &h * 2u32))?;
        let dm = Float::with_val(wp, &m1 - &m2).abs();
        let dv = Float::with_val(wp, &v1 - &v2).abs();
        let scale = Float::with_val(wp, m1.clone().abs() + v1.clone().abs()) + 1u32;
        let t = Float::with_val(wp, &tol * &scale);
        if dm <= t && dv <= t {
            return Ok(CountStats { mean: m1.to_f64(), variance: v1.to_f64(), fd_step: h.to_f64() });
        }
        h /= 2u32;
    }
    Err(Error::NoConvergence(format!("count differences unstable down to step {}", h.to_f64())))
}

pub fn count_mean(n: usize, p: &SymbolParams, ctx: &PrecisionContext) -> Result<f64> {
    Ok(count_stats(n, p, ctx)?.mean)
}

pub fn count_variance(n: usize, p: &SymbolParams, ctx: &PrecisionContext) -> Result<f64> {
    Ok(count_stats(n, p, ctx)?.variance)
}
