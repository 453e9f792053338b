//! Minimal complex arithmetic over MPFR floats.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;

#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_f64(prec, 0.0, 0.0)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_c64(prec: u32, z: Complex64) -> Self {
        Self::from_f64(prec, z.re, z.im)
    }

    pub fn from_real(x: Float) -> Self {
        let im = Float::new(x.prec());
        Self { re: x, im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: Float::with_val(self.im.prec(), -&self.im) }
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        Self { re: Float::with_val(p, &self.re * k), im: Float::with_val(p, &self.im * k) }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let mut r = Float::with_val(p, self.re.square_ref());
        r += Float::with_val(p, self.im.square_ref());
        r
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn div(&self, o: &Self) -> Self {
        let p = self.prec();
        let d = o.norm_sqr();
        let re = Float::with_val(p, &self.re * &o.re) + Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.im * &o.re) - Float::with_val(p, &self.re * &o.im);
        Self { re: re / &d, im: im / &d }
    }

    pub fn recip(&self) -> Self {
        Self::one(self.prec()).div(self)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Self { re: Float::with_val(p, &m * &c), im: m * s }
    }

    /// Principal logarithm, imaginary part in (-pi, pi].
    pub fn ln(&self) -> Self {
        let p = self.prec();
        let r = Float::with_val(p, self.norm_sqr().ln()) / 2u32;
        Self { re: r, im: self.arg() }
    }

    /// Multiplies by i*theta and exponentiates: exp(i*theta) for real theta.
    pub fn cis(theta: &Float) -> Self {
        let p = theta.prec();
        let (s, c) = theta.clone().sin_cos(Float::new(p));
        Self { re: c, im: s }
    }

    pub fn mul_i(&self) -> Self {
        Self { re: Float::with_val(self.im.prec(), -&self.im), im: self.re.clone() }
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }
}

impl Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, o: &BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }
}

impl Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }
}

impl Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &BigComplex) -> BigComplex {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        BigComplex { re, im }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        let p = self.prec();
        BigComplex { re: Float::with_val(p, -&self.re), im: Float::with_val(p, -&self.im) }
    }
}
