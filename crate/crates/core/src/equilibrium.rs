//! The constrained two-arc equilibrium problem: support parameter T, density,
//! masses, the Euler–Lagrange constant ℓ and the period τ.
//!
//! The measure lives on [-L, L] ∪ [π-T, π+T]. All differences of cosines are
//! formed as products of sines so that quantities stay accurate near the arc
//! endpoints and in the degenerate limits T → 0 and T → π - L.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{brent_root, chebyshev_integral_adaptive, tanh_sinh, QuadValue};

const QUAD_TOL: f64 = 1e-15;
const T_TOL: f64 = 1e-15;

/// x_c(L) = -2 log tan(L/4).
pub fn critical_x(l: f64) -> f64 {
    -2.0 * (l / 4.0).tan().ln()
}

fn check_l(l: f64) -> Result<()> {
    if l > 0.0 && l < PI {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("half-arclength L = {l} outside (0, pi)")))
    }
}

/// cos T + cos L without cancellation as T → π - L; exactly zero there.
fn cos_sum(t: f64, l: f64) -> f64 {
    let gap = (PI - l) - t;
    2.0 * (0.5 * gap).sin() * (0.5 * (l - t)).cos()
}

/// Left side of the T equation: the rate x that produces a given T.
pub fn x_of_t(t: f64, l: f64) -> f64 {
    let delta = cos_sum(t, l);
    // [0, L]: log cot(θ/2) against the density; singular at both ends.
    let first = tanh_sinh(0.0, l, QUAD_TOL, |th, dl, dr| {
        let den = 2.0 * (0.5 * (l + th)).sin() * (0.5 * dr).sin();
        -(0.5 * dl).tan().ln() * arc1_ratio(den, delta).sqrt()
    });
    // [π-T, π]: θ = π - φ, log tan(φ/2) against the density in φ.
    let second = if t > 0.0 {
        tanh_sinh(0.0, t, QUAD_TOL, |ph, dl, dr| {
            let num = 2.0 * (0.5 * (t + ph)).sin() * (0.5 * dr).sin();
            (0.5 * dl).tan().ln() * arc2_ratio(num, delta).sqrt()
        })
    } else {
        0.0
    };
    2.0 / PI * (first + second)
}

/// Density ratio on [-L, L] from c = cos θ - cos L and δ = cos T + cos L:
/// (cos θ + cos T)/(cos θ - cos L) = 1 + δ/c.
fn arc1_ratio(c: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        1.0
    } else {
        1.0 + delta / c
    }
}

/// Density ratio on [π-T, π+T] in φ = θ - π from c = cos φ - cos T:
/// (cos φ - cos T)/(cos φ + cos L) = c/(c + δ).
fn arc2_ratio(c: f64, delta: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c / (c + delta)
    }
}

/// Support parameter T(x, L) in [0, π - L].
pub fn solve_t(x: f64, l: f64) -> Result<f64> {
    check_l(l)?;
    let xc = critical_x(l);
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("rate x = {x} must be nonnegative")));
    }
    if x > xc * (1.0 + 1e-15) {
        return Err(Error::Domain(format!("rate x = {x} exceeds x_c = {xc}")));
    }
    if x == 0.0 {
        return Ok(PI - l);
    }
    if x >= xc {
        return Ok(0.0);
    }
    // x_of_t decreases from x_c at T = 0 to 0 at T = π - L.
    let top = PI - l;
    let r = brent_root(
        |t| {
            if t <= 0.0 {
                xc - x
            } else if t >= top {
                -x
            } else {
                x_of_t(t, l) - x
            }
        },
        0.0,
        top,
        T_TOL,
    )?;
    Ok(r.root)
}

/// Which support arc, if any, contains an angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcSide {
    /// [-L, L], carrying the zero potential.
    Gamma,
    /// [π-T, π+T], inside the complementary arc.
    Complement,
    Gap,
}

/// Solved equilibrium data for one (x, L).
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumData {
    pub l: f64,
    pub x: f64,
    pub t: f64,
    pub x_c: f64,
    pub omega_mass: f64,
    pub ell: f64,
    /// Defined only in the genuine two-arc case 0 < T < π - L.
    pub tau: Option<Complex64>,
}

impl EquilibriumData {
    pub fn new(x: f64, l: f64) -> Result<Self> {
        check_l(l)?;
        let x_c = critical_x(l);
        let x_eff = x.min(x_c);
        let t = solve_t(x_eff, l)?;
        let omega_mass = omega_from_t(t, l);
        let ell = if x >= x_c { -2.0 * (0.5 * l).sin().ln() } else { ell_from_t(t, l) };
        let tau = if t > 0.0 && t < PI - l { Some(tau_from_t(t, l)) } else { None };
        Ok(Self { l, x, t, x_c, omega_mass, ell, tau })
    }

    pub fn is_two_arc(&self) -> bool {
        self.t > 0.0 && self.t < PI - self.l
    }

    /// Edge points e^{iL} and e^{i(π-T)}.
    pub fn z0(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.l)
    }

    pub fn z1(&self) -> Complex64 {
        Complex64::from_polar(1.0, PI - self.t)
    }

    pub fn side(&self, theta: f64) -> ArcSide {
        let th = wrap(theta);
        if th.abs() <= self.l {
            ArcSide::Gamma
        } else if PI - th.abs() <= self.t {
            ArcSide::Complement
        } else {
            ArcSide::Gap
        }
    }

    /// ψ_{x,L}(e^{iθ}).
    pub fn density(&self, theta: f64) -> f64 {
        density_at(theta, self.t, self.l)
    }

    /// V(e^{iθ}): 0 on γ (endpoints included), x elsewhere.
    pub fn potential(&self, theta: f64) -> f64 {
        if wrap(theta).abs() <= self.l {
            0.0
        } else {
            self.x
        }
    }

    /// ∫ F(θ, θ - η) dμ(θ), splitting each arc at η when it lies inside so
    /// that logarithmic singularities at θ = η sit at panel ends. F receives
    /// the angle and its offset from η computed without cancellation.
    pub fn integrate<T: QuadValue>(&self, eta: Option<f64>, tol: f64, f: impl Fn(f64, f64) -> T) -> T {
        let mut acc = T::zero();
        let eta_w = eta.map(wrap);
        // Arc 1 in θ.
        let (t, l) = (self.t, self.l);
        let delta = cos_sum(t, l);
        let w1 = |_th: f64, dl: f64, dr: f64| -> f64 {
            let den = 2.0 * (0.5 * dl).sin() * (0.5 * dr).sin();
            arc1_ratio(den, delta).sqrt() / (2.0 * PI)
        };
        acc = acc + panels(-l, l, eta_w, tol, &|th, dl, dr, off| f(th, off) * w1(th, dl, dr));
        if t > 0.0 {
            // Arc 2 in φ = θ - π (wrapped), so θ = π + φ.
            let w2 = |_ph: f64, dl: f64, dr: f64| -> f64 {
                let num = 2.0 * (0.5 * dl).sin() * (0.5 * dr).sin();
                arc2_ratio(num, delta).sqrt() / (2.0 * PI)
            };
            let eta_phi = eta_w.map(|e| wrap(e - PI));
            acc = acc + panels(-t, t, eta_phi, tol, &|ph, dl, dr, off| f(PI + ph, off) * w2(ph, dl, dr));
        }
        acc
    }

    /// Total mass over both arcs by direct quadrature of the density.
    pub fn total_mass(&self) -> f64 {
        self.integrate(None, 1e-14, |_, _| 1.0)
    }

    /// 2∫log|z - e^{iθ}|dμ - V(z) + ℓ at z = e^{iη}: zero on the support and
    /// negative in the gaps.
    pub fn euler_lagrange_check(&self, eta: f64) -> f64 {
        let u = self.integrate(Some(eta), 1e-14, |_, off| (2.0 * (0.5 * off).sin().abs()).ln());
        2.0 * u - self.potential(eta) + self.ell
    }
}

/// Integrates over [a, b] with an optional breakpoint. The callback gets
/// (point, distance to a, distance to b, offset from the breakpoint).
fn panels<T: QuadValue>(
    a: f64,
    b: f64,
    brk: Option<f64>,
    tol: f64,
    f: &impl Fn(f64, f64, f64, f64) -> T,
) -> T {
    match brk {
        Some(e) if e > a && e < b => {
            let left = tanh_sinh(a, e, tol, |x, dl, dr| f(x, dl, (b - e) + dr, -dr));
            let right = tanh_sinh(e, b, tol, |x, dl, dr| f(x, (e - a) + dl, dr, dl));
            left + right
        }
        Some(e) => tanh_sinh(a, b, tol, |x, dl, dr| f(x, dl, dr, x - e)),
        None => tanh_sinh(a, b, tol, |x, dl, dr| f(x, dl, dr, f64::NAN)),
    }
}

/// Angle reduced to (-π, π].
pub fn wrap(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

fn density_at(theta: f64, t: f64, l: f64) -> f64 {
    let th = wrap(theta);
    let delta = cos_sum(t, l);
    if th.abs() <= l {
        let den = 2.0 * (0.5 * (l + th)).sin() * (0.5 * (l - th)).sin();
        return arc1_ratio(den, delta).sqrt() / (2.0 * PI);
    }
    let ph = wrap(th - PI);
    if ph.abs() <= t {
        let num = 2.0 * (0.5 * (t + ph)).sin() * (0.5 * (t - ph)).sin();
        return arc2_ratio(num, delta).sqrt() / (2.0 * PI);
    }
    0.0
}

/// ψ_{x,L}(e^{iθ}) for a freshly solved T.
pub fn density(theta: f64, x: f64, l: f64) -> Result<f64> {
    let t = solve_t(x.min(critical_x(l)), l)?;
    Ok(density_at(theta, t, l))
}

/// Ω as a Gauss–Chebyshev integral in y = cos φ on [cos T, 1].
fn omega_from_t(t: f64, l: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= PI - l {
        return (PI - l) / PI;
    }
    let ct = t.cos();
    let delta = cos_sum(t, l);
    // With dy/√(1-y²): (1/π) ∫ (y - cT)/(√(y+cL)√(1+y)) · dy/√((y-cT)(1-y)).
    chebyshev_integral_adaptive(ct, 1.0, 1e-15, |y, dl, _| dl / ((dl + delta).sqrt() * (1.0 + y).sqrt())) / PI
}

/// Mass of μ on [π-T, π+T].
pub fn omega_mass(x: f64, l: f64) -> Result<f64> {
    check_l(l)?;
    if x >= critical_x(l) {
        return Ok(0.0);
    }
    Ok(omega_from_t(solve_t(x, l)?, l))
}

/// Mass of μ on [-L, L], integrated in y = cos θ on [cos L, 1].
pub fn gamma_mass(t: f64, l: f64) -> f64 {
    let delta = cos_sum(t, l);
    tanh_sinh(l.cos(), 1.0, QUAD_TOL, |y, dl, dr| {
        ((dl + delta) / dl).sqrt() / (dr * (1.0 + y)).sqrt()
    }) / PI
}

/// ℓ = ∫_0^1 2(cT + cL) / ((1 - 2u cL + u²)(1 + √r)) du, an exact rewrite of
/// the defining integral that is free of cancellation at u → 0.
fn ell_from_t(t: f64, l: f64) -> f64 {
    let cl = l.cos();
    let ct = t.cos();
    let s = cos_sum(t, l);
    if t >= PI - l {
        return 0.0;
    }
    tanh_sinh(0.0, 1.0, QUAD_TOL, |u, _, _| {
        let d = 1.0 - 2.0 * u * cl + u * u;
        let r = (u * u + 2.0 * u * ct + 1.0) / d;
        2.0 * s / (d * (1.0 + r.sqrt()))
    })
}

/// Euler–Lagrange constant ℓ_{x,L}.
pub fn ell_constant(x: f64, l: f64) -> Result<f64> {
    check_l(l)?;
    if x >= critical_x(l) {
        return Ok(-2.0 * (0.5 * l).sin().ln());
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(ell_from_t(solve_t(x, l)?, l))
}

/// The defining ℓ integral evaluated literally, with a four-term Taylor
/// expansion for u < 1e-4. Kept to cross-check the rewritten form.
pub fn ell_constant_literal(t: f64, l: f64) -> f64 {
    let cl = l.cos();
    let ct = t.cos();
    let legendre = |c: f64| {
        let c2 = c * c;
        [1.0, c, 0.5 * (3.0 * c2 - 1.0), 0.5 * (5.0 * c2 - 3.0) * c, (35.0 * c2 * c2 - 30.0 * c2 + 3.0) / 8.0]
    };
    // √r = (1 + 2u cT + u²) · (1 + 2u cT + u²)^{-1/2} · (1 - 2u cL + u²)^{-1/2},
    // and both inverse roots are Legendre generating functions.
    let a = legendre(-ct);
    let b = legendre(cl);
    let mut q = [0.0; 5];
    for i in 0..5 {
        for j in 0..5 - i {
            q[i + j] += a[i] * b[j];
        }
    }
    let mut r = [0.0; 5];
    for k in 0..5 {
        r[k] = q[k] + if k >= 1 { 2.0 * ct * q[k - 1] } else { 0.0 } + if k >= 2 { q[k - 2] } else { 0.0 };
    }
    let series = |u: f64| -(r[1] + u * (r[2] + u * (r[3] + u * r[4])));
    let body = |u: f64| {
        let ratio = (u * u + 2.0 * u * ct + 1.0) / (u * u - 2.0 * u * cl + 1.0);
        (1.0 - ratio.sqrt()) / u
    };
    let small = 1e-4;
    let head = crate::numerics::adaptive_legendre(0.0, small, 1e-15, &series);
    let tail = crate::numerics::adaptive_legendre(small, 1.0, 1e-15, &body);
    -(head + tail)
}

/// ∫_0^x Ω_{ξ,L} dξ by double-exponential quadrature in ξ, solving for T at
/// every node.
pub fn omega_rate_integral(x: f64, l: f64) -> Result<f64> {
    check_l(l)?;
    let xc = critical_x(l);
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("rate x = {x} must be nonnegative")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let upper = x.min(xc);
    let failure = RefCell::new(None);
    let v = tanh_sinh(0.0, upper, 1e-13, |xi, _, _| {
        omega_mass(xi, l).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            0.0
        })
    });
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// τ = i N/D with both periods as Gauss–Chebyshev integrals in y = cos θ.
fn tau_from_t(t: f64, l: f64) -> Complex64 {
    let cl = l.cos();
    // cos(L + α) = cos(π - T) = -cos T
    let cla = -t.cos();
    // cL - cos(L+α) = cos L + cos T
    let gap = cos_sum(t, l);
    // D = ∫_{cLα}^{cL} dy / (√(cL-y)√(y-cLα)√(1-y²))
    let d = chebyshev_integral_adaptive(cla, cl, 1e-15, |y, _, _| 1.0 / ((1.0 - y) * (1.0 + y)).sqrt());
    // N = 2∫_{-1}^{cLα} dy / (√(cL-y)√(cLα-y)√(1-y)√(1+y))
    let n = chebyshev_integral_adaptive(-1.0, cla, 1e-15, |y, _, dr| 2.0 / ((gap + dr).sqrt() * (1.0 - y).sqrt()));
    Complex64::new(0.0, n / d)
}

/// Period τ of the genus-one surface; purely imaginary with positive part.
pub fn period_tau(x: f64, l: f64) -> Result<Complex64> {
    check_l(l)?;
    let t = solve_t(x, l)?;
    if t <= 0.0 || t >= PI - l {
        return Err(Error::Domain(format!("period undefined for degenerate arcs (T = {t})")));
    }
    Ok(tau_from_t(t, l))
}

/// The Euler–Lagrange residual at e^{iη}.
pub fn euler_lagrange_check(eq: &EquilibriumData, eta: f64) -> f64 {
    eq.euler_lagrange_check(eta)
}

/// Alternative expression for x(T) through the gap angle α = π - T - L,
/// used as an independent check of the T equation.
pub fn x_of_gap(t: f64, l: f64) -> f64 {
    let alpha = PI - t - l;
    if alpha <= 0.0 {
        return 0.0;
    }
    let la = l + alpha;
    // y = cos θ on [cos(L+α), cos L]: √((y - cLα)/(cL - y)) dy/√(1-y²)
    let cl = l.cos();
    let cla = la.cos();
    chebyshev_integral_adaptive(cla, cl, 1e-15, |y, dl, _| dl / ((1.0 - y) * (1.0 + y)).sqrt())
}
