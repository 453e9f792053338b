//! Fixed and adaptive quadrature in double precision.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureKind {
    GaussLegendre,
    GaussChebyshev,
}

/// Nodes and weights on the canonical interval [-1, 1].
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Values that quadrature routines can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

fn legendre_table() -> &'static Mutex<HashMap<usize, Arc<QuadratureRule>>> {
    static TABLE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// m-point Gauss-Legendre rule, cached per m.
pub fn gauss_legendre(m: usize) -> Arc<QuadratureRule> {
    assert!(m >= 1, "Gauss-Legendre rule needs at least one node");
    if let Some(r) = legendre_table().lock().unwrap().get(&m) {
        return Arc::clone(r);
    }
    let rule = Arc::new(build_legendre(m));
    legendre_table().lock().unwrap().insert(m, Arc::clone(&rule));
    rule
}

fn build_legendre(m: usize) -> QuadratureRule {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-300) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    QuadratureRule { kind: QuadratureKind::GaussLegendre, nodes, weights }
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// m-point Gauss-Chebyshev rule of the first kind (weight 1/sqrt(1-t^2)).
pub fn gauss_chebyshev(m: usize) -> QuadratureRule {
    assert!(m >= 1, "Gauss-Chebyshev rule needs at least one node");
    let mf = m as f64;
    let nodes: Vec<f64> = (1..=m).rev().map(|k| (PI * (2.0 * k as f64 - 1.0) / (2.0 * mf)).cos()).collect();
    QuadratureRule { kind: QuadratureKind::GaussChebyshev, nodes, weights: vec![PI / mf; m] }
}

impl QuadratureRule {
    /// Integrates over [a, b]. For a Chebyshev rule this is the integral of
    /// g(y)/sqrt((y-a)(b-y)).
    pub fn integrate<T: QuadValue>(&self, a: f64, b: f64, f: impl Fn(f64) -> T) -> T {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let scale = match self.kind {
            QuadratureKind::GaussLegendre => h,
            QuadratureKind::GaussChebyshev => 1.0,
        };
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(c + h * x) * *w;
        }
        acc * scale
    }
}

/// Integral of g(y)/sqrt((y-a)(b-y)) over [a, b]; the endpoint distances
/// y-a and b-y are passed alongside y so callers avoid cancellation.
pub fn chebyshev_integral<T: QuadValue>(m: usize, a: f64, b: f64, g: impl Fn(f64, f64, f64) -> T) -> T {
    let h = 0.5 * (b - a);
    let mf = m as f64;
    let mut acc = T::zero();
    for k in 1..=m {
        let phi = PI * (2.0 * k as f64 - 1.0) / (2.0 * mf);
        let t = phi.cos();
        // 1 + cos(phi) and 1 - cos(phi) without cancellation
        let dl = h * 2.0 * (0.5 * phi).cos().powi(2);
        let dr = h * 2.0 * (0.5 * phi).sin().powi(2);
        let y = a + h * (1.0 + t);
        acc = acc + g(y, dl, dr);
    }
    acc * (PI / mf)
}

/// Gauss-Chebyshev integral refined by doubling the node count until two
/// successive values agree to `tol` (absolute or relative).
pub fn chebyshev_integral_adaptive<T: QuadValue>(
    a: f64,
    b: f64,
    tol: f64,
    g: impl Fn(f64, f64, f64) -> T,
) -> T {
    let mut m = 32;
    let mut prev = chebyshev_integral(m, a, b, &g);
    while m < 1 << 16 {
        m *= 2;
        let cur = chebyshev_integral(m, a, b, &g);
        if (cur - prev).magnitude() <= tol * cur.magnitude().max(1.0) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Double-exponential (tanh-sinh) quadrature on [a, b]. The integrand
/// receives (x, x - a, b - x), the distances computed without cancellation.
pub fn tanh_sinh<T: QuadValue>(a: f64, b: f64, tol: f64, f: impl Fn(f64, f64, f64) -> T) -> T {
    let h2 = 0.5 * (b - a);
    let t_max = 4.5;
    let eval = |t: f64| -> T {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        // distance from x = tanh(u) to the nearer endpoint of [-1, 1]
        let near = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        let (x, dl, dr) = if u >= 0.0 {
            (b - h2 * near, 2.0 * h2 - h2 * near, h2 * near)
        } else {
            (a + h2 * near, h2 * near, 2.0 * h2 - h2 * near)
        };
        let v = f(x.clamp(a, b), dl, dr);
        v * (w * h2)
    };
    let mut step = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * step <= t_max {
        let t = k as f64 * step;
        sum = sum + eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * step;
    for _level in 0..12 {
        step *= 0.5;
        let mut k = 1;
        let mut add = T::zero();
        while (k as f64) * step <= t_max {
            let t = k as f64 * step;
            add = add + eval(t) + eval(-t);
            k += 2;
        }
        sum = sum + add;
        let next = sum * step;
        let diff = (next - estimate).magnitude();
        estimate = next;
        if diff <= tol * estimate.magnitude().max(1.0) && step < 0.1 {
            break;
        }
    }
    estimate
}

/// Adaptive Gauss-Legendre on [a, b] by bisection until two levels agree.
pub fn adaptive_legendre<T: QuadValue>(a: f64, b: f64, tol: f64, f: &impl Fn(f64) -> T) -> T {
    let rule = gauss_legendre(24);
    let whole = rule.integrate(a, b, f);
    adaptive_step(&rule, a, b, whole, tol, f, 0)
}

fn adaptive_step<T: QuadValue>(
    rule: &QuadratureRule,
    a: f64,
    b: f64,
    whole: T,
    tol: f64,
    f: &impl Fn(f64) -> T,
    depth: usize,
) -> T {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, f);
    let right = rule.integrate(m, b, f);
    let both = left + right;
    let err = (both - whole).magnitude();
    // A non-finite estimate cannot improve under bisection.
    if err <= tol * both.magnitude().max(1.0) || depth >= 30 || !err.is_finite() {
        return both;
    }
    adaptive_step(rule, a, m, left, tol, f, depth + 1) + adaptive_step(rule, m, b, right, tol, f, depth + 1)
}
