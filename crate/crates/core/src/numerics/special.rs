//! Special functions at arbitrary precision, with double-precision wrappers
//! where callers only need f64.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::bigcomplex::BigComplex;
use super::precision::PrecisionContext;
use crate::error::{Error, Result};

const GUARD: u32 = 32;

fn below(x: &Float, bits: u32) -> bool {
    x.is_zero() || x.get_exp().map_or(true, |e| e < -(bits as i32))
}

/// J0(t) and J0'(t) by the power series, with guard bits covering the
/// cancellation between terms of size up to e^|t|.
pub fn bessel_j0(t: f64, ctx: &PrecisionContext) -> (Float, Float) {
    let bits = ctx.bits();
    let wp = bits + GUARD + (t.abs() / LN_2).ceil() as u32;
    let tt = Float::with_val(wp, t);
    let q = Float::with_val(wp, -(Float::with_val(wp, tt.square_ref()) / 4u32));
    let peak = t * t / 4.0;
    let mut term0 = Float::with_val(wp, 1);
    let mut term1 = Float::with_val(wp, 1);
    let mut s0 = Float::with_val(wp, 1);
    let mut s1 = Float::with_val(wp, 1);
    let mut k: u64 = 1;
    loop {
        term0 *= &q;
        term0 /= k * k;
        term1 *= &q;
        term1 /= k * (k + 1);
        s0 += &term0;
        s1 += &term1;
        if k as f64 > peak && below(&term0, bits + 8) && below(&term1, bits + 8) {
            break;
        }
        k += 1;
    }
    let j1 = s1 * tt / 2u32;
    (Float::with_val(bits, s0), Float::with_val(bits, -j1))
}

/// Ai(t) and Ai'(t) from the Maclaurin series. Guard bits cover the
/// cancellation for positive t, where terms grow like exp((2/3)t^(3/2)).
pub fn airy_ai(t: f64, ctx: &PrecisionContext) -> (Float, Float) {
    let bits = ctx.bits();
    let growth = 2.0 / 3.0 * t.abs().powf(1.5);
    let wp = bits + GUARD + (2.0 * growth / LN_2).ceil() as u32;
    let tt = Float::with_val(wp, t);
    let t3 = Float::with_val(wp, tt.clone().square() * &tt);
    let third = Float::with_val(wp, 1) / 3u32;
    let c1 = {
        let g = Float::with_val(wp, 2u32) / 3u32;
        let three = Float::with_val(wp, 3u32);
        let p = Float::with_val(wp, three.pow(Float::with_val(wp, 2u32) / 3u32));
        Float::with_val(wp, 1) / (p * g.gamma())
    };
    let c2 = {
        let three = Float::with_val(wp, 3u32);
        let p = Float::with_val(wp, three.pow(&third));
        Float::with_val(wp, 1) / (p * third.clone().gamma())
    };
    // f = sum a_k, g = sum b_k and their derivative series d_k, e_k
    let mut a = Float::with_val(wp, 1);
    let mut b = tt.clone();
    let mut d = Float::with_val(wp, tt.square_ref()) / 2u32;
    let mut e = Float::with_val(wp, 1);
    let mut f = a.clone();
    let mut g = b.clone();
    let mut fp = d.clone();
    let mut gp = e.clone();
    let peak = (t.abs().powi(3) / 9.0).sqrt();
    let mut k: u64 = 1;
    loop {
        a *= &t3;
        a /= (3 * k - 1) * (3 * k);
        b *= &t3;
        b /= (3 * k) * (3 * k + 1);
        e *= &t3;
        e /= (3 * k) * (3 * k - 2);
        f += &a;
        g += &b;
        gp += &e;
        if k >= 2 {
            d *= &t3;
            d /= (3 * k - 3) * (3 * k - 1);
            fp += &d;
        }
        if k as f64 > peak + 1.0
            && below(&a, bits + 8)
            && below(&b, bits + 8)
            && below(&d, bits + 8)
            && below(&e, bits + 8)
        {
            break;
        }
        k += 1;
    }
    let ai = Float::with_val(wp, &c1 * &f) - Float::with_val(wp, &c2 * &g);
    let aip = Float::with_val(wp, &c1 * &fp) - Float::with_val(wp, &c2 * &gp);
    (Float::with_val(bits, ai), Float::with_val(bits, aip))
}

/// (J0(t), J0'(t)) in double precision.
pub fn bessel_j0_f64(t: f64) -> (f64, f64) {
    let (j, dj) = bessel_j0(t, &PrecisionContext::new(64).expect("valid precision"));
    (j.to_f64(), dj.to_f64())
}

/// (Ai(t), Ai'(t)) in double precision.
pub fn airy_ai_f64(t: f64) -> (f64, f64) {
    let (a, da) = airy_ai(t, &PrecisionContext::new(64).expect("valid precision"));
    (a.to_f64(), da.to_f64())
}

fn zeta_values(wp: u32, kmax: u32) -> Vec<Float> {
    (0..=kmax).map(|k| if k < 2 { Float::new(wp) } else { Float::with_val(wp, Float::zeta_u(k)) }).collect()
}

fn series_terms(w_abs: f64, wp: u32) -> u32 {
    let r = w_abs.max(1e-3);
    ((wp as f64 * LN_2) / -r.ln()).ceil() as u32 + 8
}

fn is_nonpositive_integer(z: &BigComplex) -> bool {
    z.im.is_zero() && z.re <= 0 && z.re.is_integer()
}

/// log Gamma(1+w) for |w| < 1 by its Taylor series in zeta values.
fn log_gamma_1p_series(w: &BigComplex, wp: u32) -> BigComplex {
    let kmax = series_terms(w.abs().to_f64(), wp);
    let zetas = zeta_values(wp, kmax);
    let euler = Float::with_val(wp, Constant::Euler);
    let mut acc = w.scale(&euler);
    acc = -&acc;
    let neg_w = -w;
    let mut pw = neg_w.clone();
    for k in 2..=kmax {
        pw = &pw * &neg_w;
        let c = Float::with_val(wp, &zetas[k as usize] / k);
        acc = &acc + &pw.scale(&c);
    }
    acc
}

/// log G(1+w) for |w| < 1 by its Taylor series in zeta values.
fn log_barnes_g_1p_series(w: &BigComplex, wp: u32) -> BigComplex {
    let kmax = series_terms(w.abs().to_f64(), wp);
    let zetas = zeta_values(wp, kmax);
    let euler = Float::with_val(wp, Constant::Euler);
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let half_log_2pi = Float::with_val(wp, two_pi.ln()) / 2u32;
    let w2 = w * w;
    let c2 = (Float::with_val(wp, 1) + &euler) / 2u32;
    let mut acc = &w.scale(&half_log_2pi) - &w.scale(&Float::with_val(wp, 0.5));
    acc = &acc - &w2.scale(&c2);
    let mut pw = w2;
    for k in 2..=kmax {
        pw = &pw * w;
        let mut c = Float::with_val(wp, &zetas[k as usize] / (k + 1));
        if k % 2 == 1 {
            c = -c;
        }
        acc = &acc + &pw.scale(&c);
    }
    acc
}

fn reduce(z: &BigComplex, wp: u32) -> Result<(BigComplex, i64)> {
    let mut w = z.clone();
    w.re.set_prec(wp);
    w.im.set_prec(wp);
    w.re -= 1u32;
    let m = w.re.to_f64().round();
    if !m.is_finite() || m.abs() > 1e6 {
        return Err(Error::Domain(format!("argument {} too large for series reduction", z.re.to_f64())));
    }
    let m = m as i64;
    w.re -= m;
    let r = w.abs().to_f64();
    if r >= 0.9 {
        return Err(Error::Domain(format!(
            "imaginary part {} outside the reach of the series (|w| = {r:.3} after reduction)",
            z.im.to_f64()
        )));
    }
    Ok((w, m))
}

/// Complex log Gamma(z), analytic continuation of the real logarithm with
/// the sum-of-principal-logs convention for the recurrence.
pub fn log_gamma(z: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    if is_nonpositive_integer(z) {
        return Err(Error::Singular(format!("Gamma has a pole at {}", z.re.to_f64())));
    }
    let bits = ctx.bits();
    let wp = bits + GUARD;
    let (w, m) = reduce(z, wp)?;
    let mut acc = log_gamma_1p_series(&w, wp);
    if m > 0 {
        for j in 1..=m {
            let mut t = w.clone();
            t.re += j;
            acc = &acc + &t.ln();
        }
    } else {
        for j in 0..(-m) {
            let mut t = w.clone();
            t.re -= j;
            acc = &acc - &t.ln();
        }
    }
    Ok(round(acc, bits))
}

/// log G(z) for Barnes' G-function, reduced into |z - 1| < 0.9 by the
/// recurrence G(1+z) = Gamma(z) G(z). Defined modulo 2*pi*i.
pub fn log_barnes_g(z: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    if is_nonpositive_integer(z) {
        return Err(Error::Singular(format!("Barnes G vanishes at {}", z.re.to_f64())));
    }
    let bits = ctx.bits();
    let wp = bits + GUARD;
    let inner = ctx.with_guard(GUARD);
    let (w, m) = reduce(z, wp)?;
    let mut acc = log_barnes_g_1p_series(&w, wp);
    if m > 0 {
        for j in 0..m {
            let mut t = w.clone();
            t.re += 1 + j;
            acc = &acc + &log_gamma(&t, &inner)?;
        }
    } else {
        for j in 1..=(-m) {
            let mut t = w.clone();
            t.re += 1 - j;
            acc = &acc - &log_gamma(&t, &inner)?;
        }
    }
    Ok(round(acc, bits))
}

fn round(mut z: BigComplex, bits: u32) -> BigComplex {
    z.re.set_prec(bits);
    z.im.set_prec(bits);
    z
}

/// zeta'(-1) = 1/12 - log A, with log A obtained from G(1/2) =
/// 2^(1/24) e^(1/8) pi^(-1/4) A^(-3/2).
pub fn zeta_prime_minus_one(ctx: &PrecisionContext) -> Float {
    let bits = ctx.bits();
    let wp = bits + GUARD;
    let half = BigComplex::from_f64(wp, 0.5, 0.0);
    let lg = log_barnes_g(&half, &ctx.with_guard(GUARD)).expect("G(1/2) is regular").re;
    let ln2 = Float::with_val(wp, Constant::Log2);
    let lnpi = Float::with_val(wp, Constant::Pi).ln();
    let inner = ln2 / 24u32 + Float::with_val(wp, 0.125) - lnpi / 4u32 - lg;
    let log_a = inner * 2u32 / 3u32;
    Float::with_val(bits, Float::with_val(wp, 1) / 12u32 - log_a)
}

/// Jacobi theta function theta(z | tau) = sum_m exp(2 pi i m z + pi i m^2 tau).
pub fn jacobi_theta3(z: &BigComplex, tau: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    if tau.im <= 0 {
        return Err(Error::Domain("invalid nome: Im(tau) must be positive".into()));
    }
    let bits = ctx.bits();
    let wp = bits + GUARD;
    let mut z = z.clone();
    z.re.set_prec(wp);
    z.im.set_prec(wp);
    let mut tau = tau.clone();
    tau.re.set_prec(wp);
    tau.im.set_prec(wp);
    let k = Float::with_val(wp, &z.im / &tau.im).to_f64().round();
    if !k.is_finite() || k.abs() > 1e12 {
        return Err(Error::Domain("theta argument too far from the real axis".into()));
    }
    let k = k as i64;
    let kf = Float::with_val(wp, k);
    let zr = &z - &tau.scale(&kf);
    let pi = Float::with_val(wp, Constant::Pi);
    let eps = PrecisionContext::new(wp)?.eps();
    let mut sum = BigComplex::one(wp);
    let two_z = zr.scale(&Float::with_val(wp, 2));
    let mut m: u64 = 1;
    loop {
        let mf = Float::with_val(wp, m);
        let mt = tau.scale(&mf);
        let e_plus = (&two_z + &mt).scale(&Float::with_val(wp, &pi * &mf)).mul_i().exp();
        let e_minus = (&mt - &two_z).scale(&Float::with_val(wp, &pi * &mf)).mul_i().exp();
        sum = &(&sum + &e_plus) + &e_minus;
        let bound = Float::with_val(wp, sum.abs() * &eps);
        if m >= 2 && e_plus.abs() < bound && e_minus.abs() < bound {
            break;
        }
        m += 1;
        if m > 1_000_000 {
            return Err(Error::NoConvergence("theta series".into()));
        }
    }
    if k != 0 {
        // theta(z' + k tau) = exp(-2 pi i k z' - pi i k^2 tau) theta(z')
        let a = zr.scale(&(Float::with_val(wp, &pi * &kf) * 2u32));
        let b = tau.scale(&Float::with_val(wp, &pi * Float::with_val(wp, &kf * &kf)));
        let expo = -&(&a + &b).mul_i();
        sum = &sum * &expo.exp();
    }
    Ok(round(sum, bits))
}

/// Double-precision theta(z | tau) with the same reduction as
/// [`jacobi_theta3`].
pub fn theta3(z: Complex64, tau: Complex64) -> Complex64 {
    let (zr, pref) = theta_reduce(z, tau);
    theta3_series(zr, tau) * pref.exp()
}

/// log theta(z | tau) up to a multiple of 2*pi*i; avoids overflow of the
/// quasi-periodicity factor for large imaginary parts of z.
pub fn log_theta3(z: Complex64, tau: Complex64) -> Complex64 {
    let (zr, pref) = theta_reduce(z, tau);
    theta3_series(zr, tau).ln() + pref
}

fn theta_reduce(z: Complex64, tau: Complex64) -> (Complex64, Complex64) {
    assert!(tau.im > 0.0, "invalid nome");
    let k = (z.im / tau.im).round();
    let zr = z - tau * k;
    let i = Complex64::i();
    let pref = -i * (2.0 * PI * k * zr + PI * k * k * tau);
    (zr, pref)
}

fn theta3_series(z: Complex64, tau: Complex64) -> Complex64 {
    let i = Complex64::i();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut m = 1.0;
    loop {
        let p = (i * PI * m * (2.0 * z + m * tau)).exp();
        let q = (i * PI * m * (m * tau - 2.0 * z)).exp();
        sum += p + q;
        let bound = 1e-17 * sum.norm();
        if m >= 2.0 && p.norm() < bound && q.norm() < bound {
            break;
        }
        m += 1.0;
    }
    sum
}
