//! Theta-function global parametrix for the two-arc case.
//!
//! The genus-one surface is w² = R(z) with branch points z₀ = e^{iL}, z̄₀,
//! z₁ = e^{i(π-T)} and z̄₁, cut along γ = {|θ| ≤ L} and γ̃ = {|θ - π| ≤ T}.
//! On the unit circle the + side is |z| < 1 and the - side is |z| > 1.
//!
//! Square roots with cuts on a circular arc are built from the Möbius ratio
//! (z - b)/(z - a), which maps the arc from b to a onto a ray from 0. Its
//! logarithm is taken with the branch cut rotated onto that ray, so the cuts
//! sit exactly on γ and γ̃ and never need to be tracked along a path.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::equilibrium::{wrap, ArcSide, EquilibriumData};
use crate::error::{Error, Result};
use crate::numerics::{adaptive_legendre, log_theta3};

const PATH_TOL: f64 = 1e-13;
const MEASURE_TOL: f64 = 1e-14;
/// Radii of the inner and outer detour circles used by the contour paths.
const R_IN: f64 = 0.6;
const R_OUT: f64 = 1.5;
/// Beyond this radius u is evaluated through the chart w = 1/z at infinity.
const R_FAR: f64 = 2.0;
const ON_CIRCLE: f64 = 1e-12;

type C = Complex64;
const I: C = C::new(0.0, 1.0);

// Branch point indices: z0, z̄0, z1, z̄1.
const Z0: usize = 0;
const Z0_BAR: usize = 1;
const Z1: usize = 2;
const Z1_BAR: usize = 3;

/// Boundary side on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Limit from |z| < 1.
    Plus,
    /// Limit from |z| > 1.
    Minus,
}

pub type Matrix2 = [[C; 2]; 2];

/// log((z - b)/(z - a)) with its cut on the circular arc from b to a.
#[derive(Clone, Copy, Debug)]
struct ArcLog {
    /// Direction of the image ray; the argument is kept in (psi - 2π, psi].
    psi: f64,
    /// Whether points just inside the circle map to arguments just below psi.
    inside_below: bool,
}

impl ArcLog {
    fn new(a: C, b: C, mid: C) -> Self {
        let ratio = |z: C| (z - b) / (z - a);
        let psi = ratio(mid).arg().rem_euclid(2.0 * PI);
        let mut me = Self { psi, inside_below: true };
        let t = me.reduce(ratio(mid * 0.999).arg());
        me.inside_below = t > psi - PI;
        me
    }

    fn reduce(&self, t: f64) -> f64 {
        let mut t = t;
        while t > self.psi {
            t -= 2.0 * PI;
        }
        while t <= self.psi - 2.0 * PI {
            t += 2.0 * PI;
        }
        t
    }

    /// Log of the ratio w = (z - b)/(z - a). With `side` set, z is taken to
    /// lie on the arc and the boundary value from that side is returned.
    fn eval(&self, w: C, side: Option<Side>) -> C {
        let t = match side {
            Some(s) => {
                if (s == Side::Plus) == self.inside_below {
                    self.psi
                } else {
                    self.psi - 2.0 * PI
                }
            }
            None => self.reduce(w.arg()),
        };
        C::new(w.norm().ln(), t)
    }
}

/// A point with its offsets to the branch points z0, z̄0, z1, z̄1. Offsets
/// near a branch point are filled in exactly by the path parameterization.
#[derive(Clone, Copy, Debug)]
struct Pt {
    z: C,
    diff: [C; 4],
}

/// Log(1 - e^{iψ}) for real ψ ≠ 0 (mod 2π).
fn log_one_minus_cis(psi: f64) -> C {
    let p = if psi.abs() > PI { wrap(psi) } else { psi };
    let re = (2.0 * (0.5 * p).sin().abs()).ln();
    let im = if p > 0.0 { -0.5 * PI + 0.5 * p } else { 0.5 * PI + 0.5 * p };
    C::new(re, im)
}

/// e^{i(s + off)} - e^{is} without cancellation.
fn chord(s: f64, off: f64) -> C {
    C::from_polar(2.0 * (0.5 * off).sin(), s + 0.5 * off + 0.5 * PI)
}

/// Riemann-surface constants and evaluators for one (x, L) in the two-arc
/// regime. Immutable after construction.
#[derive(Clone, Debug)]
pub struct ParametrixContext {
    pub eq: EquilibriumData,
    pub z0: C,
    pub z1: C,
    /// ω = c0 dz/√R.
    pub c0: f64,
    pub tau: C,
    pub d: C,
    /// None when sin T = sin L and z⋆ sits at infinity.
    pub z_star: Option<f64>,
    pub u_inf: C,
    log_gamma: ArcLog,
    log_tilde: ArcLog,
}

impl ParametrixContext {
    pub fn new(eq: EquilibriumData) -> Result<Self> {
        if !eq.is_two_arc() {
            return Err(Error::InvalidParameter(format!(
                "parametrix needs two arcs: T = {} with L = {} is degenerate",
                eq.t, eq.l
            )));
        }
        let z0 = eq.z0();
        let z1 = eq.z1();
        // (z - z̄0)/(z - z0) cut on γ, (z - z1)/(z - z̄1) cut on γ̃.
        let log_gamma = ArcLog::new(z0, z0.conj(), C::new(1.0, 0.0));
        let log_tilde = ArcLog::new(z1.conj(), z1, C::new(-1.0, 0.0));
        let mut ctx = Self {
            eq,
            z0,
            z1,
            c0: 1.0,
            tau: C::new(0.0, 0.0),
            d: C::new(0.0, 0.0),
            z_star: None,
            u_inf: C::new(0.0, 0.0),
            log_gamma,
            log_tilde,
        };

        // u₊ + u₋ = -1 on γ fixes c0 through the Σ₂ integral.
        let sigma2 = ctx.unit_arc(Z1_BAR, Z0_BAR, &|p| ctx.inv_sqrt_r(&p));
        let c0 = -1.0 / (2.0 * sigma2);
        if !(c0.re > 0.0 && c0.im.abs() <= 1e-8 * c0.re) {
            return Err(Error::NoConvergence(format!("one-form normalization not real positive: {c0}")));
        }
        ctx.c0 = c0.re;

        // u₊ - u₋ = -τ across Σ₁.
        let (l, t) = (ctx.eq.l, ctx.eq.t);
        let mid = 0.5 * (l + PI - t);
        ctx.tau = ctx.u_boundary(mid, Side::Minus) - ctx.u_boundary(mid, Side::Plus);
        if !(ctx.tau.im > 0.0) {
            return Err(Error::NoConvergence(format!("period has no positive imaginary part: {}", ctx.tau)));
        }

        ctx.u_inf = ctx.u_infinity();
        let (sl, st) = (l.sin(), t.sin());
        let u_star = if (sl - st).abs() < 1e-12 {
            ctx.z_star = None;
            ctx.u_inf
        } else {
            let zs = -(l + t).sin() / (sl - st);
            ctx.z_star = Some(zs);
            ctx.u_abel(C::new(zs, 0.0))?
        };
        let k = 0.5 + 0.5 * ctx.tau;
        ctx.d = u_star - k;
        Ok(ctx)
    }

    pub fn for_params(x: f64, l: f64) -> Result<Self> {
        Self::new(EquilibriumData::new(x, l)?)
    }

    // ---- branch points and roots ----

    /// Angles of z0, z̄0, z1, z̄1.
    fn angles(&self) -> [f64; 4] {
        let (l, t) = (self.eq.l, self.eq.t);
        [l, -l, PI - t, -(PI - t)]
    }

    fn branch_point(&self, k: usize) -> C {
        C::from_polar(1.0, self.angles()[k])
    }

    fn pt(&self, z: C) -> Pt {
        let mut diff = [C::new(0.0, 0.0); 4];
        for (k, d) in diff.iter_mut().enumerate() {
            *d = z - self.branch_point(k);
        }
        Pt { z, diff }
    }

    /// e^{it} with offsets from chords; `near` gives the exact offset t - angle_k.
    fn pt_circle(&self, t: f64, near: Option<(usize, f64)>) -> Pt {
        let ang = self.angles();
        let mut diff = [C::new(0.0, 0.0); 4];
        for (k, d) in diff.iter_mut().enumerate() {
            *d = match near {
                Some((j, off)) if j == k => chord(ang[k], off),
                _ => chord(ang[k], t - ang[k]),
            };
        }
        Pt { z: C::from_polar(1.0, t), diff }
    }

    /// e_k (1 + eps) on the ray through the branch point e_k.
    fn pt_radial(&self, k: usize, eps: f64) -> Pt {
        let e = self.branch_point(k);
        let mut p = self.pt(e * (1.0 + eps));
        p.diff[k] = e * eps;
        p
    }

    /// Which cut factors contain the boundary point e^{iθ}.
    fn cut_sides(&self, theta: f64, side: Side) -> (Option<Side>, Option<Side>) {
        match self.eq.side(theta) {
            ArcSide::Gamma => (Some(side), None),
            ArcSide::Complement => (None, Some(side)),
            ArcSide::Gap => (None, None),
        }
    }

    fn logs(&self, p: &Pt, sides: (Option<Side>, Option<Side>)) -> (C, C) {
        (
            self.log_gamma.eval(p.diff[Z0_BAR] / p.diff[Z0], sides.0),
            self.log_tilde.eval(p.diff[Z1] / p.diff[Z1_BAR], sides.1),
        )
    }

    fn sqrt_r_with(&self, p: &Pt, sides: (Option<Side>, Option<Side>)) -> C {
        let (lg, lt) = self.logs(p, sides);
        p.diff[Z0] * (0.5 * lg).exp() * p.diff[Z1_BAR] * (0.5 * lt).exp()
    }

    fn inv_sqrt_r(&self, p: &Pt) -> C {
        1.0 / self.sqrt_r_with(p, (None, None))
    }

    /// √((z - z1)(z - z̄1)/((z - z0)(z - z̄0))) → 1 at infinity.
    fn s_root(&self, p: &Pt) -> C {
        let (lg, lt) = self.logs(p, (None, None));
        p.diff[Z1_BAR] * (0.5 * lt).exp() / (p.diff[Z0] * (0.5 * lg).exp())
    }

    /// √R on the first sheet, ~ z² at infinity.
    pub fn sqrt_r(&self, z: C) -> C {
        self.sqrt_r_with(&self.pt(z), (None, None))
    }

    fn check_off_circle(&self, z: C, what: &str) -> Result<()> {
        if (z.norm() - 1.0).abs() < ON_CIRCLE {
            return Err(Error::Domain(format!(
                "{what} queried on the unit circle at {z}; pass a boundary side instead"
            )));
        }
        Ok(())
    }

    // ---- path pieces ----

    /// ∫ f dξ radially from the branch point e_k to radius r, with
    /// ξ = e_k(1 + (r - 1)t²) absorbing the inverse square root.
    fn radial(&self, k: usize, r: f64, f: &impl Fn(Pt) -> C) -> C {
        let e = self.branch_point(k);
        let h = r - 1.0;
        adaptive_legendre(0.0, 1.0, PATH_TOL, &|t: f64| f(self.pt_radial(k, h * t * t)) * (e * (2.0 * h * t)))
    }

    /// ∫ f dξ along the circle of radius r ≠ 1 from angle t0 to t1.
    fn arc(&self, r: f64, t0: f64, t1: f64, f: &impl Fn(Pt) -> C) -> C {
        if t0 == t1 {
            return C::new(0.0, 0.0);
        }
        adaptive_legendre(t0, t1, PATH_TOL, &|t: f64| {
            let z = C::from_polar(r, t);
            f(self.pt(z)) * (I * z)
        })
    }

    /// ∫ f dξ along the straight segment a → b, both off the branch points.
    fn line(&self, a: C, b: C, f: &impl Fn(Pt) -> C) -> C {
        let d = b - a;
        if d == C::new(0.0, 0.0) {
            return d;
        }
        adaptive_legendre(0.0, 1.0, PATH_TOL, &|t: f64| f(self.pt(a + d * t)) * d)
    }

    /// ∫ f dξ along the unit circle between two branch points, split at the
    /// midpoint and desingularized from each end.
    fn unit_arc(&self, k0: usize, k1: usize, f: &impl Fn(Pt) -> C) -> C {
        let ang = self.angles();
        let (t0, t1) = (ang[k0], ang[k1]);
        let h = 0.5 * (t1 - t0);
        let half = |k: usize, start: f64, dir: f64| {
            adaptive_legendre(0.0, 1.0, PATH_TOL, &|v: f64| {
                let off = dir * h * v * v;
                let p = self.pt_circle(start + off, Some((k, off)));
                let z = p.z;
                f(p) * (I * z) * (dir * 2.0 * h * v)
            })
        };
        half(k0, t0, 1.0) - half(k1, t1, -1.0)
    }

    // ---- β ----

    /// β(z) = ((z - z̄0)(z - z1)/((z - z0)(z - z̄1)))^{1/4}, β(∞) = 1.
    pub fn beta(&self, z: C) -> Result<C> {
        if (z.norm() - 1.0).abs() < ON_CIRCLE && self.eq.side(z.arg()) != ArcSide::Gap {
            return Err(Error::Domain(format!("beta queried on a cut at {z}; a side is required")));
        }
        let (lg, lt) = self.logs(&self.pt(z), (None, None));
        Ok((0.25 * (lg + lt)).exp())
    }

    pub fn beta_boundary(&self, theta: f64, side: Side) -> C {
        let p = self.pt_circle(theta, None);
        let (lg, lt) = self.logs(&p, self.cut_sides(theta, side));
        (0.25 * (lg + lt)).exp()
    }

    // ---- g ----

    /// g(z) = ∫ log(z - e^{iθ}) dμ(θ), analytic off (-∞, -1] and the circle.
    pub fn g(&self, z: C) -> Result<C> {
        self.check_off_circle(z, "g")?;
        if z.im == 0.0 && z.re < -1.0 {
            return Err(Error::Domain(format!("g queried on its cut (-inf, -1] at {z}")));
        }
        let eta = Some(z.arg());
        if z.norm() > 1.0 {
            let v = self.eq.integrate(eta, MEASURE_TOL, |th, _| (1.0 - C::from_polar(1.0, th) / z).ln());
            Ok(z.ln() + v)
        } else {
            let v = self.eq.integrate(eta, MEASURE_TOL, |th, _| (1.0 - z * C::from_polar(1.0, -th)).ln());
            Ok(I * PI + v)
        }
    }

    /// Boundary value of g at e^{iθ}; on the - side θ = π is the log z cut.
    pub fn g_boundary(&self, theta: f64, side: Side) -> C {
        let eta = wrap(theta);
        match side {
            Side::Minus => I * eta + self.eq.integrate(Some(eta), MEASURE_TOL, |_, off| log_one_minus_cis(off)),
            Side::Plus => I * PI + self.eq.integrate(Some(eta), MEASURE_TOL, |_, off| log_one_minus_cis(-off)),
        }
    }

    // ---- φ and φ̃ ----

    /// Integral of s(ξ)dξ/ξ from the branch point k to z. The path leaves
    /// the circle radially to the detour radius, follows that circle without
    /// crossing the negative real axis, and runs straight to z.
    fn phi_from(&self, k: usize, z: C, detour: f64) -> C {
        let f = |p: Pt| self.s_root(&p) / p.z;
        let start = self.angles()[k];
        let alpha = z.arg();
        let q = C::from_polar(detour, alpha);
        self.radial(k, detour, &f) + self.arc(detour, start, alpha, &f) + self.line(q, z, &f)
    }

    fn detour_for(z: C) -> f64 {
        if z.norm() < 1.0 {
            R_IN
        } else {
            R_OUT
        }
    }

    /// φ(z) = ∫_{z0}^{z} s(ξ) dξ/ξ.
    pub fn phi_map(&self, z: C) -> Result<C> {
        self.check_off_circle(z, "phi")?;
        Ok(self.phi_from(Z0, z, Self::detour_for(z)))
    }

    pub fn phi_boundary(&self, theta: f64, side: Side) -> C {
        let detour = if side == Side::Plus { R_IN } else { R_OUT };
        self.phi_from(Z0, C::from_polar(1.0, wrap(theta)), detour)
    }

    /// φ̃(z) = ∫_{z̄1}^{z} s(ξ) dξ/ξ.
    pub fn tilde_phi_map(&self, z: C) -> Result<C> {
        self.check_off_circle(z, "tilde phi")?;
        Ok(self.phi_from(Z1_BAR, z, Self::detour_for(z)))
    }

    // ---- u ----

    /// ∫ ω from z̄1 to z via the detour circle of the given radius.
    fn u_path(&self, z: C, detour: f64) -> C {
        let f = |p: Pt| self.c0 * self.inv_sqrt_r(&p);
        let start = self.angles()[Z1_BAR];
        let alpha = if z.norm() == 0.0 { start } else { z.arg() };
        // u is single valued off γ ∪ γ̃ ∪ Σ₁, so take the shorter way round.
        let mut target = alpha;
        if target - start > PI {
            target -= 2.0 * PI;
        }
        let q = C::from_polar(detour, target);
        self.radial(Z1_BAR, detour, &f) + self.arc(detour, start, target, &f) + self.line(q, z, &f)
    }

    /// c0 ∫_0^{w} dv/√Q(v) in the chart v = 1/z, where dz/√R(z) = -dv/√Q(v)
    /// and Q(v) = ∏(1 - e_k v).
    fn tail(&self, w: C) -> C {
        let e: [C; 4] = std::array::from_fn(|k| self.branch_point(k));
        let f = |v: C| {
            let mut q = C::new(1.0, 0.0);
            for ek in e {
                q *= (1.0 - ek * v).sqrt();
            }
            self.c0 / q
        };
        adaptive_legendre(0.0, 1.0, PATH_TOL, &|t: f64| f(w * t) * w)
    }

    fn u_infinity(&self) -> C {
        let p = C::from_polar(R_FAR, self.angles()[Z1_BAR]);
        self.u_path(p, R_FAR) + self.tail(1.0 / p)
    }

    /// u(z) = ∫_{z̄1}^{z} ω on the first sheet, single valued off γ ∪ γ̃ ∪ Σ₁.
    pub fn u_abel(&self, z: C) -> Result<C> {
        if (z.norm() - 1.0).abs() < ON_CIRCLE {
            let th = z.arg();
            let on_sigma2 = self.eq.side(th) == ArcSide::Gap && th < 0.0;
            if !on_sigma2 {
                return Err(Error::Domain(format!("u queried on a cut at {z}; a side is required")));
            }
            return Ok(self.u_path(z, R_IN));
        }
        if z.norm() >= R_FAR {
            return Ok(self.u_inf - self.tail(1.0 / z));
        }
        Ok(self.u_path(z, Self::detour_for(z)))
    }

    /// u along a path through an explicit detour radius, for path-independence checks.
    pub fn u_abel_via(&self, z: C, detour: f64) -> C {
        self.u_path(z, detour)
    }

    pub fn u_boundary(&self, theta: f64, side: Side) -> C {
        let detour = if side == Side::Plus { R_IN } else { R_OUT };
        self.u_path(C::from_polar(1.0, wrap(theta)), detour)
    }

    /// ∮_A ω = 2 c0 ∫ dz/√R along Σ₁ from z0 to z1.
    pub fn a_period(&self) -> C {
        2.0 * self.c0 * self.unit_arc(Z0, Z1, &|p| self.inv_sqrt_r(&p))
    }

    // ---- θ ratios and P^(∞) ----

    fn log_theta(&self, z: C) -> C {
        log_theta3(z, self.tau)
    }

    /// |θ(z)| relative to its maximum over Re z, for pole detection.
    fn theta_rel(&self, z: C) -> f64 {
        (self.log_theta(z).re - self.log_theta(C::new(0.0, z.im)).re).exp()
    }

    /// Θ_{11}, Θ_{12}, Θ_{21}, Θ_{22} at a given value of u.
    pub fn theta_ratios(&self, u: C, n: usize) -> Result<[C; 4]> {
        let nw = C::new(n as f64 * self.eq.omega_mass, 0.0);
        for den in [u + self.d, u - self.d] {
            if self.theta_rel(den) < 1e3 * f64::EPSILON {
                return Err(Error::Singular(format!("theta denominator vanishes at u = {u} (near z_star)")));
            }
        }
        let pre = self.log_theta(C::new(0.0, 0.0)) - self.log_theta(nw);
        let ratio = |num: C, den: C| (pre + self.log_theta(num) - self.log_theta(den)).exp();
        let d = self.d;
        Ok([
            ratio(u + d - nw, u + d),
            ratio(u - d + nw, u - d),
            ratio(u - d - nw, u - d),
            ratio(u + d + nw, u + d),
        ])
    }

    fn assemble(&self, beta: C, th: [C; 4], n: usize, inside: bool) -> Matrix2 {
        let e = (I * (PI * n as f64 * self.eq.omega_mass / 2.0)).exp();
        let bp = 0.5 * (beta + 1.0 / beta);
        let bm = beta - 1.0 / beta;
        let m = [[bp * th[0], bm / (-2.0 * I) * th[1]], [bm / (2.0 * I) * th[2], bp * th[3]]];
        let left = [e, 1.0 / e];
        let right = if inside { [e, 1.0 / e] } else { [1.0 / e, e] };
        let mut out = [[C::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = left[i] * m[i][j] * right[j];
            }
        }
        out
    }

    /// P^(∞)(z) for z off the unit circle.
    pub fn p_infinity(&self, z: C, n: usize) -> Result<Matrix2> {
        self.check_off_circle(z, "P_infinity")?;
        let u = self.u_abel(z)?;
        let beta = self.beta(z)?;
        Ok(self.assemble(beta, self.theta_ratios(u, n)?, n, z.norm() < 1.0))
    }

    pub fn p_infinity_boundary(&self, theta: f64, side: Side, n: usize) -> Result<Matrix2> {
        let u = self.u_boundary(theta, side);
        let beta = self.beta_boundary(theta, side);
        Ok(self.assemble(beta, self.theta_ratios(u, n)?, n, side == Side::Plus))
    }

    /// Θ_{12}(0), real for the exact constants.
    pub fn theta12_at_zero(&self, n: usize) -> Result<f64> {
        let u0 = self.u_abel(C::new(0.0, 0.0))?;
        Ok(self.theta_ratios(u0, n)?[1].re)
    }

    /// Bounds θ(1/2)/θ(0) ≤ Θ_{12}(0) ≤ θ(0)²/θ(1/2)².
    pub fn theta12_bounds(&self) -> (f64, f64) {
        let t0 = self.log_theta(C::new(0.0, 0.0)).re;
        let th = self.log_theta(C::new(0.5, 0.0)).re;
        ((th - t0).exp(), (2.0 * (t0 - th)).exp())
    }

    /// e^{n g(z)} P^(∞)_{11}(z), the leading behaviour of the monic φ_n away from the circle.
    pub fn opuc_asymptotic_prediction(&self, z: C, n: usize) -> Result<C> {
        let g = self.g(z)?;
        let p = self.p_infinity(z, n)?;
        Ok((n as f64 * g + p[0][0].ln()).exp())
    }

    /// e^{-nℓ} sin((L + T)/2) Θ_{12}(0), the leading behaviour of h_n.
    pub fn norm_asymptotic(&self, n: usize) -> Result<f64> {
        Ok(self.log_norm_asymptotic(n)?.exp())
    }

    /// log of [`norm_asymptotic`](Self::norm_asymptotic), safe for large n.
    pub fn log_norm_asymptotic(&self, n: usize) -> Result<f64> {
        let s = (0.5 * (self.eq.l + self.eq.t)).sin();
        Ok(-(n as f64) * self.eq.ell + s.ln() + self.theta12_at_zero(n)?.ln())
    }

    /// |P_{11,-}|² - |P_{12,-}|² - P_{12}(0) at e^{iθ}; zero on γ ∪ γ̃.
    pub fn boundary_relation_residual(&self, theta: f64, n: usize) -> Result<f64> {
        let pm = self.p_infinity_boundary(theta, Side::Minus, n)?;
        let p0 = self.p_infinity(C::new(0.0, 0.0), n)?;
        Ok(pm[0][0].norm_sqr() - pm[0][1].norm_sqr() - p0[0][1].re)
    }
}
