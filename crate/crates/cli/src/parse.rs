//! Argument value parsers: angles with a `pi` literal and rates relative to x_c.

use std::f64::consts::PI;

fn number(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))
}

/// Radians, optionally written with `pi`: `pi`, `pi/2`, `2pi/3`, `0.9*pi`, `-pi/4`.
pub fn angle(raw: &str) -> Result<f64, String> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(at) = s.find("pi") else {
        return number(&s);
    };
    let (head, tail) = (&s[..at], &s[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => number(h)?,
    };
    let value = if tail.is_empty() {
        coef * PI
    } else if let Some(d) = tail.strip_prefix('/') {
        coef * PI / number(d)?
    } else if let Some(m) = tail.strip_prefix('*') {
        coef * PI * number(m)?
    } else {
        return Err(format!("cannot parse angle {raw:?}"));
    };
    Ok(value)
}

/// A decay rate: a number, `xc`, `auto-half` (x_c/2), or a multiple such as `2xc` or `0.5*xc`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rate {
    Value(f64),
    OfCritical(f64),
}

impl Rate {
    pub fn resolve(self, x_c: f64) -> f64 {
        match self {
            Rate::Value(x) => x,
            Rate::OfCritical(k) => k * x_c,
        }
    }
}

pub fn rate(raw: &str) -> Result<Rate, String> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "auto-half" {
        return Ok(Rate::OfCritical(0.5));
    }
    if let Some(head) = s.strip_suffix("xc") {
        let head = head.strip_suffix('*').unwrap_or(head);
        return Ok(Rate::OfCritical(if head.is_empty() { 1.0 } else { number(head)? }));
    }
    number(&s).map(Rate::Value)
}
