#![allow(dead_code)]

use rug::float::Constant;
use rug::Float;

/// f_k computed straight from sin(kL), without the recurrence used by the library.
pub fn direct_moment(k: i64, l: f64, s: &Float, prec: u32) -> Float {
    let pi = Float::with_val(prec, Constant::Pi);
    let lf = Float::with_val(prec, l);
    let one_minus_s = Float::with_val(prec, 1 - Float::with_val(prec, s));
    if k == 0 {
        let arc = Float::with_val(prec, &pi - &lf) * s;
        (arc + &lf) / &pi
    } else {
        let k = k.unsigned_abs();
        let kl = Float::with_val(prec, &lf * k);
        let sin = kl.sin();
        sin * one_minus_s / (pi * k)
    }
}

/// log det(f_{k-j}) by Gaussian elimination with partial pivoting.
pub fn direct_log_det(n: usize, l: f64, s: f64, prec: u32) -> Float {
    let sf = Float::with_val(prec, s);
    let mut a: Vec<Vec<Float>> = (0..n)
        .map(|j| (0..n).map(|k| direct_moment(k as i64 - j as i64, l, &sf, prec)).collect())
        .collect();
    let mut logdet = Float::new(prec);
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].clone().abs().partial_cmp(&a[j][c].clone().abs()).unwrap()).unwrap();
        a.swap(c, piv);
        let p = a[c][c].clone();
        logdet += Float::with_val(prec, p.abs_ref()).ln();
        for r in c + 1..n {
            let m = Float::with_val(prec, &a[r][c] / &p);
            for k in c..n {
                let t = Float::with_val(prec, &m * &a[c][k]);
                a[r][k] -= t;
            }
        }
    }
    logdet
}

pub fn rel_diff(a: &Float, b: &Float) -> f64 {
    let d = Float::with_val(a.prec(), a - b).abs();
    let m = Float::with_val(a.prec(), b.abs_ref());
    if m.is_zero() {
        d.to_f64()
    } else {
        (d / m).to_f64()
    }
}
