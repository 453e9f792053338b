//! Orthogonal polynomials on the unit circle for the two-jump weight, built
//! by the Levinson/Szegő recursion in big-float arithmetic.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, PrecisionContext};
use crate::symbol::{fourier_coeffs_big, Symbol};

/// Number of precision doublings tried after an initial failure.
pub const MAX_RETRIES: u32 = 3;

/// Largest degree accepted by [`phi_zeros`].
pub const ZERO_DEGREE_CAP: usize = 64;

/// Recursion state at degree n.
///
/// Holds α_0..α_{n-1}, the norms h_0..h_n (h_n comes for free from α_{n-1})
/// and the coefficients of the monic φ_n in increasing degree.
#[derive(Clone, Debug)]
pub struct OpucState {
    prec: u32,
    alpha: Vec<Float>,
    h: Vec<Float>,
    coeffs: Vec<Float>,
    // Running product of h_0..h_{n-1} as mantissa * 2^exp.
    det_mant: Float,
    det_exp: i64,
}

impl OpucState {
    /// Degree-0 state for moment f_0.
    pub fn new(f0: &Float) -> Result<Self> {
        let prec = f0.prec();
        if *f0 <= 0 {
            return Err(Error::PrecisionExhausted { bits: prec, degree: 0, h: f0.to_f64() });
        }
        Ok(Self {
            prec,
            alpha: Vec::new(),
            h: vec![f0.clone()],
            coeffs: vec![Float::with_val(prec, 1)],
            det_mant: Float::with_val(prec, 1),
            det_exp: 0,
        })
    }

    pub fn degree(&self) -> usize {
        self.alpha.len()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn alpha(&self) -> &[Float] {
        &self.alpha
    }

    /// h_0..h_n.
    pub fn h(&self) -> &[Float] {
        &self.h
    }

    pub fn h_n(&self) -> &Float {
        self.h.last().expect("h_0 always present")
    }

    /// Monic φ_n coefficients, constant term first.
    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(Float::to_f64).collect()
    }

    pub fn h_f64(&self) -> Vec<f64> {
        self.h.iter().map(Float::to_f64).collect()
    }

    /// log D_n = Σ_{k<n} log h_k.
    pub fn logdet(&self) -> Float {
        let mut l = Float::with_val(self.prec, self.det_mant.ln_ref());
        let ln2 = Float::with_val(self.prec, rug::float::Constant::Log2);
        l += ln2 * self.det_exp;
        l
    }

    /// log h_n, which does not overflow even when h_n is tiny.
    pub fn log_h_n(&self) -> Float {
        Float::with_val(self.prec, self.h_n().ln_ref())
    }
}

/// Advances the recursion one degree using moments f_0..f_{n+1}.
///
/// Fails with `PrecisionExhausted` when rounding drives the new norm to a
/// nonpositive value or |α| to 1.
pub fn levinson_extend(state: &mut OpucState, moments: &[Float]) -> Result<()> {
    let k = state.degree();
    if moments.len() < k + 2 {
        return Err(Error::InvalidParameter(format!("need moments f_0..f_{}, got {}", k + 1, moments.len())));
    }
    let p = state.prec;

    // α_k = <z φ_k, 1> / h_k = Σ_j c_j f_{j+1} / h_k.
    let mut acc = Float::new(p);
    let mut t = Float::new(p);
    for (c, f) in state.coeffs.iter().zip(&moments[1..]) {
        t.assign(c * f);
        acc += &t;
    }
    let hk = &state.h[k];
    let alpha = Float::with_val(p, &acc / hk);
    let one_minus = Float::with_val(p, 1 - Float::with_val(p, alpha.square_ref()));
    let hnext = Float::with_val(p, hk * &one_minus);
    if !(one_minus > 0) || !(hnext > 0) {
        return Err(Error::PrecisionExhausted { bits: p, degree: k + 1, h: hnext.to_f64() });
    }

    // φ_{k+1} = z φ_k - α φ_k*: with d = z φ_k (d_0 = 0), the new coefficients
    // are d_j - α d_{k+1-j}, updated in mirrored pairs.
    let mut d = std::mem::take(&mut state.coeffs);
    d.insert(0, Float::new(p));
    let m = k + 1;
    let (mut i, mut j) = (0usize, m);
    while i < j {
        let (lo, hi) = d.split_at_mut(j);
        let a = &mut lo[i];
        let b = &mut hi[0];
        let na = Float::with_val(p, &alpha * &*b);
        let nb = Float::with_val(p, &alpha * &*a);
        *a -= na;
        *b -= nb;
        i += 1;
        j -= 1;
    }
    if i == j {
        let mid = Float::with_val(p, &alpha * &d[i]);
        d[i] -= mid;
    }
    state.coeffs = d;

    state.det_mant *= hk;
    if let Some(e) = state.det_mant.get_exp() {
        state.det_mant >>= e;
        state.det_exp += e as i64;
    }
    state.alpha.push(alpha);
    state.h.push(hnext);
    Ok(())
}

/// Runs the recursion to degree n at fixed precision.
pub fn build_state_at(n: usize, l: f64, s: &Float, prec: u32) -> Result<OpucState> {
    let f = fourier_coeffs_big(n + 1, l, s, prec);
    let mut st = OpucState::new(&f[0])?;
    for _ in 0..n {
        levinson_extend(&mut st, &f)?;
    }
    Ok(st)
}

/// Runs the recursion to degree n, starting at max(ctx, 8n) bits and
/// doubling on loss of positivity.
pub fn build_state_with_s(n: usize, l: f64, s: &Float, ctx: &PrecisionContext) -> Result<OpucState> {
    let mut bits = ctx.bits().max(PrecisionContext::for_determinant(n).bits());
    let mut last = None;
    for _ in 0..=MAX_RETRIES {
        match build_state_at(n, l, s, bits) {
            Ok(st) => return Ok(st),
            Err(e @ Error::PrecisionExhausted { .. }) => {
                last = Some(e);
                bits = bits.saturating_mul(2);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

pub fn build_state(n: usize, p: &Symbol, ctx: &PrecisionContext) -> Result<OpucState> {
    let bits = ctx.bits().max(PrecisionContext::for_determinant(n).bits());
    let s = p.s_big(bits * (1 << MAX_RETRIES));
    build_state_with_s(n, p.l, &s, ctx)
}

/// log D_n(s, L) for the n×n Toeplitz matrix (f_{k-j}).
pub fn log_toeplitz_det(n: usize, p: &Symbol, ctx: &PrecisionContext) -> Result<Float> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    // The degree n-1 state already holds h_0..h_{n-1}.
    let st = build_state(n - 1, p, ctx)?;
    Ok(logdet_including_last(&st))
}

/// Σ_{k≤n} log h_k for a degree-n state, i.e. log D_{n+1}.
pub fn logdet_including_last(st: &OpucState) -> Float {
    let mut l = st.logdet();
    l += st.log_h_n();
    l
}

/// log D_n with an explicit big-float s (used for s-derivatives).
pub fn log_toeplitz_det_with_s(n: usize, l: f64, s: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let st = build_state_with_s(n - 1, l, s, ctx)?;
    Ok(logdet_including_last(&st))
}

/// (φ_n(z), φ_n*(z)) by the Szegő recurrence at the state's precision.
pub fn phi_eval(state: &OpucState, z: &BigComplex) -> (BigComplex, BigComplex) {
    let p = state.prec.max(z.prec());
    let mut phi = BigComplex::one(p);
    let mut star = BigComplex::one(p);
    for a in &state.alpha {
        let zphi = z * &phi;
        let next = &zphi - &star.scale(a);
        star = &star - &zphi.scale(a);
        phi = next;
    }
    (phi, star)
}

/// φ_n, φ_n*, φ_n′, (φ_n*)′ by the differentiated recurrence.
pub fn phi_with_derivative(state: &OpucState, z: &BigComplex) -> [BigComplex; 4] {
    let p = state.prec.max(z.prec());
    let mut phi = BigComplex::one(p);
    let mut star = BigComplex::one(p);
    let mut dphi = BigComplex::zero(p);
    let mut dstar = BigComplex::zero(p);
    for a in &state.alpha {
        let zphi = z * &phi;
        // d/dz (z φ) = φ + z φ′
        let dzphi = &phi + &(z * &dphi);
        let nphi = &zphi - &star.scale(a);
        let ndphi = &dzphi - &dstar.scale(a);
        star = &star - &zphi.scale(a);
        dstar = &dstar - &dzphi.scale(a);
        phi = nphi;
        dphi = ndphi;
    }
    [phi, star, dphi, dstar]
}

/// (φ_n′(z), (φ_n*)′(z)).
pub fn phi_derivative_eval(state: &OpucState, z: &BigComplex) -> (BigComplex, BigComplex) {
    let [_, _, d, ds] = phi_with_derivative(state, z);
    (d, ds)
}

/// Double-precision convenience wrapper for [`phi_eval`].
pub fn phi_eval_c64(state: &OpucState, z: Complex64) -> (Complex64, Complex64) {
    let (a, b) = phi_eval(state, &BigComplex::from_c64(state.prec, z));
    (a.to_c64(), b.to_c64())
}

/// Zeros of φ_n: companion-matrix eigenvalues in f64, then Newton polish
/// in big-float arithmetic.
pub fn phi_zeros(state: &OpucState, ctx: &PrecisionContext) -> Result<Vec<Complex64>> {
    let n = state.degree();
    if n > ZERO_DEGREE_CAP {
        return Err(Error::InvalidParameter(format!("zero finding is capped at degree {ZERO_DEGREE_CAP}, got {n}")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // Exact zero roots (e.g. φ_n = z^n for s = 1) are split off first; the
    // QR iteration stalls on a nilpotent companion matrix.
    let nz = state.coeffs.iter().take_while(|c| c.is_zero()).count().min(n);
    let c: Vec<f64> = state.coeffs[nz..].iter().map(Float::to_f64).collect();
    let m = n - nz;
    let mut rough = vec![Complex64::new(0.0, 0.0); nz];
    if m > 0 {
        let mut comp = DMatrix::<f64>::zeros(m, m);
        for i in 1..m {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..m {
            comp[(i, m - 1)] = -c[i];
        }
        let schur = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, 10_000).ok_or_else(|| {
            Error::NoConvergence(format!("companion-matrix Schur iteration failed at degree {n}"))
        })?;
        rough.extend(schur.complex_eigenvalues().iter());
    }

    let prec = ctx.bits().max(state.prec);
    let coeffs: Vec<Float> = state.coeffs.iter().map(|v| Float::with_val(prec, v)).collect();
    let tol = ctx.eps_f64().max(1e-300);
    let mut out = Vec::with_capacity(n);
    for z0 in rough.iter() {
        out.push(newton_polish(&coeffs, *z0, prec, tol)?);
    }
    out.sort_by(|a, b| a.arg().total_cmp(&b.arg()).then(a.norm().total_cmp(&b.norm())));
    Ok(out)
}

fn horner(coeffs: &[Float], z: &BigComplex) -> (BigComplex, BigComplex) {
    let p = z.prec();
    let mut v = BigComplex::zero(p);
    let mut dv = BigComplex::zero(p);
    for c in coeffs.iter().rev() {
        dv = &(&dv * z) + &v;
        v = &v * z;
        v.re += c;
    }
    (v, dv)
}

fn newton_polish(coeffs: &[Float], z0: Complex64, prec: u32, tol: f64) -> Result<Complex64> {
    let mut z = BigComplex::from_c64(prec, z0);
    let mut last_step = f64::INFINITY;
    for _ in 0..100 {
        let (v, dv) = horner(coeffs, &z);
        if dv.norm_sqr() == 0 {
            break;
        }
        let step = v.div(&dv);
        let sz = step.abs().to_f64();
        z = &z - &step;
        if sz <= tol * (1.0 + z.abs().to_f64()) {
            return Ok(z.to_c64());
        }
        // Clustered roots converge linearly; stop once steps stop shrinking.
        if sz > 0.9 * last_step && sz < 1e-12 {
            return Ok(z.to_c64());
        }
        last_step = sz;
    }
    let (v, _) = horner(coeffs, &z);
    let res = v.abs().to_f64();
    let zf = z.to_c64();
    if (zf - z0).norm() < 1e-6 * (1.0 + z0.norm()) {
        return Ok(zf);
    }
    Err(Error::NoConvergence(format!("Newton polish of zero near {z0} left residual {res:e}")))
}
