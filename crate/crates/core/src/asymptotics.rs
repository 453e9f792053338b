//! Closed-form large-n predictions for log D_n, the sine-kernel Fredholm
//! determinant, and the local limits of the conditional kernel.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::conditional::ConditionalCue;
use crate::equilibrium::{omega_rate_integral, ArcSide, EquilibriumData};
use crate::error::{Error, Result};
use crate::numerics::{airy_ai_f64, bessel_j0_f64, gauss_legendre, log_barnes_g, BigComplex, PrecisionContext};
use crate::symbol::{Regime, SymbolParams};

pub const FREDHOLM_DEFAULT_NODES: usize = 60;
pub const FREDHOLM_TOL: f64 = 1e-10;
const FREDHOLM_MAX_NODES: usize = 1920;
/// Separations below which the kernels use their diagonal values at the midpoint.
const NEAR_DIAGONAL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticPrediction {
    pub regime: Regime,
    pub log_value: f64,
    /// (label, value) pairs; they sum to `log_value`.
    pub terms: Vec<(&'static str, f64)>,
}

impl AsymptoticPrediction {
    fn from_terms(regime: Regime, terms: Vec<(&'static str, f64)>) -> Self {
        let log_value = terms.iter().map(|t| t.1).sum();
        Self { regime, log_value, terms }
    }

    pub fn term(&self, label: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.0 == label).map(|t| t.1)
    }
}

fn check_arc(l: f64) -> Result<()> {
    if l > 0.0 && l < PI {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("half-arclength L = {l} outside (0, pi)")))
    }
}

/// Fixed s ∈ (0, 1]: Fisher–Hartwig asymptotics with two Barnes G factors.
pub fn predict_case1(n: usize, s: f64, l: f64) -> Result<AsymptoticPrediction> {
    check_arc(l)?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter(format!("Case I needs 0 < s <= 1, got {s}")));
    }
    let ls = s.ln();
    let q = ls * ls / (2.0 * PI * PI);
    let ctx = PrecisionContext::new(128)?;
    // β = log s/(2πi) = -i log s/(2π)
    let b = -ls / (2.0 * PI);
    let gp = log_barnes_g(&BigComplex::from_f64(128, 1.0, b), &ctx)?.to_c64();
    let gm = log_barnes_g(&BigComplex::from_f64(128, 1.0, -b), &ctx)?.to_c64();
    let barnes = 2.0 * (gp + gm).re;
    Ok(AsymptoticPrediction::from_terms(
        Regime::CaseI,
        vec![
            ("leading", n as f64 * (1.0 - l / PI) * ls),
            ("log-n", q * (n as f64).ln()),
            ("constant", q * (2.0 * l.sin()).ln() + barnes),
        ],
    ))
}

/// s = 0 or s decaying faster than e^{-x_c n}.
pub fn predict_case3(n: usize, l: f64) -> Result<AsymptoticPrediction> {
    check_arc(l)?;
    let nf = n as f64;
    let zp = crate::numerics::zeta_prime_minus_one(&PrecisionContext::new(128)?).to_f64();
    Ok(AsymptoticPrediction::from_terms(
        Regime::CaseIII,
        vec![
            ("leading", nf * nf * (0.5 * l).sin().ln()),
            ("log-n", -0.25 * nf.ln()),
            ("constant", -0.25 * (0.5 * l).cos().ln() + 2f64.ln() / 12.0 + 3.0 * zp),
        ],
    ))
}

/// s = e^{-xn} with 0 <= x <= x_c: the leading n² rate only.
pub fn predict_case4(n: usize, x: f64, l: f64) -> Result<AsymptoticPrediction> {
    check_arc(l)?;
    let xc = crate::equilibrium::critical_x(l);
    if x > xc * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("rate x = {x} exceeds x_c = {xc}")));
    }
    let nf = n as f64;
    Ok(AsymptoticPrediction::from_terms(Regime::CaseIV, vec![("leading", -nf * nf * omega_rate_integral(x, l)?)]))
}

/// Nyström approximation of det(I - p K^sin) on [-y, y] with m Gauss–Legendre nodes.
pub fn sine_fredholm_det(p_retain: f64, y: f64, m: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_retain) {
        return Err(Error::InvalidParameter(format!("retention p = {p_retain} outside [0, 1]")));
    }
    if !(y > 0.0 && y.is_finite()) || m == 0 {
        return Err(Error::InvalidParameter(format!("need y > 0 and m >= 1 (y = {y}, m = {m})")));
    }
    let rule = gauss_legendre(m);
    let t: Vec<f64> = rule.nodes.iter().map(|x| y * x).collect();
    let w: Vec<f64> = rule.weights.iter().map(|v| y * v).collect();
    let a = DMatrix::from_fn(m, m, |j, k| {
        let d = if j == k { 1.0 } else { 0.0 };
        d - p_retain * (w[j] * w[k]).sqrt() * sine_kernel(t[j], t[k])
    });
    Ok(a.determinant())
}

/// Fredholm determinant with node doubling from m = 60 until successive
/// values agree to 1e-10; returns the value and the final node count.
pub fn sine_fredholm_det_converged(p_retain: f64, y: f64) -> Result<(f64, usize)> {
    let mut m = FREDHOLM_DEFAULT_NODES;
    let mut prev = sine_fredholm_det(p_retain, y, m)?;
    while m < FREDHOLM_MAX_NODES {
        m *= 2;
        let next = sine_fredholm_det(p_retain, y, m)?;
        if (next - prev).abs() <= FREDHOLM_TOL {
            return Ok((next, m));
        }
        prev = next;
    }
    Err(Error::NoConvergence(format!("Nyström determinant unsettled at {m} nodes (y = {y})")))
}

pub fn sine_kernel(u: f64, v: f64) -> f64 {
    let d = PI * (u - v);
    if d.abs() < 1e-8 {
        1.0 - d * d / 6.0
    } else {
        d.sin() / d
    }
}

fn bessel_diagonal(u: f64) -> f64 {
    let (j0, dj0) = bessel_j0_f64(u.sqrt());
    (j0 * j0 + dj0 * dj0) / 4.0
}

/// Hard-edge kernel (J0(√u)√v J0'(√v) - J0(√v)√u J0'(√u)) / (2(u - v)).
pub fn bessel_kernel(u: f64, v: f64) -> Result<f64> {
    if !(u > 0.0 && v > 0.0) {
        return Err(Error::Domain(format!("Bessel kernel needs u, v > 0 (u = {u}, v = {v})")));
    }
    if (u - v).abs() < NEAR_DIAGONAL * u.max(v).max(1.0) {
        return Ok(bessel_diagonal(0.5 * (u + v)));
    }
    let (ru, rv) = (u.sqrt(), v.sqrt());
    let (ju, dju) = bessel_j0_f64(ru);
    let (jv, djv) = bessel_j0_f64(rv);
    Ok((ju * rv * djv - jv * ru * dju) / (2.0 * (u - v)))
}

fn airy_diagonal(u: f64) -> f64 {
    let (a, da) = airy_ai_f64(u);
    da * da - u * a * a
}

/// Soft-edge kernel (Ai(u)Ai'(v) - Ai'(u)Ai(v)) / (u - v).
pub fn airy_kernel(u: f64, v: f64) -> f64 {
    if (u - v).abs() < NEAR_DIAGONAL * u.abs().max(v.abs()).max(1.0) {
        return airy_diagonal(0.5 * (u + v));
    }
    let (au, dau) = airy_ai_f64(u);
    let (av, dav) = airy_ai_f64(v);
    (au * dav - dau * av) / (u - v)
}

/// Where the local limit is taken.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointKind {
    /// Interior point e^{iθ} of the support.
    Bulk(f64),
    /// e^{iL}, the edge of γ.
    HardEdge,
    /// e^{-i(π - T)}, the inner edge of the arc around -1.
    SoftEdge,
}

pub fn scaling_constant(kind: PointKind, eq: &EquilibriumData) -> Result<f64> {
    let z0 = eq.z0();
    let z1 = eq.z1();
    match kind {
        PointKind::Bulk(theta) => {
            let c = eq.density(theta);
            if eq.side(theta) == ArcSide::Gap || !(c > 0.0 && c.is_finite()) {
                return Err(Error::Domain(format!("θ = {theta} is not inside the support")));
            }
            Ok(c)
        }
        _ if !eq.is_two_arc() => Err(Error::Domain("edge constants need two separated arcs".into())),
        PointKind::HardEdge => Ok(((z0 - z1).norm() * (z0 - z1.conj()).norm() / (z0 - z0.conj()).norm()).sqrt()),
        PointKind::SoftEdge => {
            let b = z1.conj();
            Ok(((b - z1).norm() / (4.0 * (b - z0).norm() * (b - z0.conj()).norm())).sqrt())
        }
    }
}

/// Angle and kernel scale at local coordinate u.
fn local_map(kind: PointKind, eq: &EquilibriumData, c: f64, n: usize) -> (impl Fn(f64) -> f64, f64) {
    let cn = c * n as f64;
    let (base, step, sign) = match kind {
        PointKind::Bulk(theta) => (theta, cn, 1.0),
        PointKind::HardEdge => (eq.l, cn * cn, -1.0),
        PointKind::SoftEdge => (-PI + eq.t, cn.powf(2.0 / 3.0), 1.0),
    };
    (move |u: f64| base + sign * u / step, step)
}

fn limit_kernel(kind: PointKind, u: f64, v: f64) -> Result<f64> {
    match kind {
        PointKind::Bulk(_) => Ok(sine_kernel(u, v)),
        PointKind::HardEdge => bessel_kernel(u, v),
        PointKind::SoftEdge => Ok(airy_kernel(u, v)),
    }
}

/// Finite-n kernel in local coordinates, with the unimodular factor
/// e^{i(n-1)(θ-μ)/2} removed. What remains is real for every positive symbol.
#[derive(Clone, Debug)]
pub struct LocalKernel {
    cue: ConditionalCue,
    eq: EquilibriumData,
    kind: PointKind,
    c: f64,
}

impl LocalKernel {
    pub fn new(n: usize, p: &SymbolParams, kind: PointKind) -> Result<Self> {
        let sym = p.at(n)?;
        let x = -sym.log_s() / n as f64;
        let eq = EquilibriumData::new(x.max(0.0), sym.l)?;
        let c = scaling_constant(kind, &eq)?;
        let cue = ConditionalCue::from_symbol(n, sym, &PrecisionContext::for_determinant(n))?;
        Ok(Self { cue, eq, kind, c })
    }

    pub fn scaling_constant(&self) -> f64 {
        self.c
    }

    /// Rescaled kernel before any phase is removed.
    pub fn raw(&self, u: f64, v: f64) -> Complex64 {
        let (angle, step) = local_map(self.kind, &self.eq, self.c, self.cue.n());
        self.cue.kernel(angle(u), angle(v)) / step
    }

    pub fn stripped(&self, u: f64, v: f64) -> Complex64 {
        let (angle, _) = local_map(self.kind, &self.eq, self.c, self.cue.n());
        let gauge = Complex64::from_polar(1.0, -0.5 * (self.cue.n() as f64 - 1.0) * (angle(u) - angle(v)));
        self.raw(u, v) * gauge
    }

    /// Phase of the raw rescaled kernel at (u, v) next to the phase the limit
    /// theorem attaches to it, both in (-π, π].
    pub fn phase_check(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        let lim = limit_kernel(self.kind, u, v)?;
        let observed = (self.raw(u, v) * lim.signum()).arg();
        let n = self.cue.n() as f64;
        let paper = match self.kind {
            PointKind::Bulk(_) => (u - v) / (2.0 * self.c),
            PointKind::HardEdge => 0.0,
            PointKind::SoftEdge => n.cbrt() * (u - v) / (2.0 * self.c.powf(2.0 / 3.0)),
        };
        Ok((observed, crate::equilibrium::wrap(paper)))
    }

    /// sup over the grid of |stripped finite-n kernel - limit kernel|.
    pub fn sup_error(&self, grid: &[(f64, f64)]) -> Result<f64> {
        let errs: Result<Vec<f64>> = grid
            .par_iter()
            .map(|&(u, v)| Ok((self.stripped(u, v) - limit_kernel(self.kind, u, v)?).norm()))
            .collect();
        Ok(errs?.into_iter().fold(0.0, f64::max))
    }
}

pub fn kernel_limit_error(n: usize, p: &SymbolParams, kind: PointKind, grid: &[(f64, f64)]) -> Result<f64> {
    LocalKernel::new(n, p, kind)?.sup_error(grid)
}

/// The k×k product grid on [a, b]².
pub fn square_grid(a: f64, b: f64, k: usize) -> Vec<(f64, f64)> {
    let pts: Vec<f64> = (0..k).map(|j| a + (b - a) * j as f64 / (k - 1).max(1) as f64).collect();
    pts.iter().flat_map(|&u| pts.iter().map(move |&v| (u, v))).collect()
}
