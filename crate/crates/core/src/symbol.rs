//! The two-jump symbol: f = 1 on the arc |θ| ≤ L and f = s on its complement.

use std::f64::consts::PI;
use std::fmt;

use rug::float::Constant;
use rug::Float;

use crate::equilibrium::critical_x;
use crate::error::{Error, Result};

/// How the removal probability is specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Removal {
    /// s held fixed as n varies.
    Fixed(f64),
    /// s = e^(-x n): the decay rate x is held fixed as n varies.
    Rate(f64),
}

/// How the half-arclength is specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HalfArc {
    Fixed(f64),
    /// L = π(1 - 4y/n), the microscopic-gap scaling.
    Shrinking(f64),
}

/// A family of symbols indexed by n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolParams {
    pub removal: Removal,
    pub arc: HalfArc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    CaseI,
    CaseII,
    CaseIII,
    CaseIV,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::CaseI => "I",
            Regime::CaseII => "II",
            Regime::CaseIII => "III",
            Regime::CaseIV => "IV",
        };
        write!(f, "Case{s}")
    }
}

fn check_l(l: f64) -> Result<()> {
    if l > 0.0 && l < PI {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("half-arclength L = {l} outside (0, pi)")))
    }
}

impl SymbolParams {
    pub fn new(s: f64, l: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!("removal probability s = {s} outside [0, 1]")));
        }
        check_l(l)?;
        Ok(Self { removal: Removal::Fixed(s), arc: HalfArc::Fixed(l) })
    }

    pub fn with_rate(x: f64, l: f64) -> Result<Self> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::InvalidParameter(format!("decay rate x = {x} must be finite and nonnegative")));
        }
        check_l(l)?;
        Ok(Self { removal: Removal::Rate(x), arc: HalfArc::Fixed(l) })
    }

    pub fn shrinking(s: f64, y: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!("removal probability s = {s} outside [0, 1]")));
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::InvalidParameter(format!("gap scale y = {y} must be positive")));
        }
        Ok(Self { removal: Removal::Fixed(s), arc: HalfArc::Shrinking(y) })
    }

    /// Concrete (s, L) for matrix size n.
    pub fn at(&self, n: usize) -> Result<Symbol> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let l = match self.arc {
            HalfArc::Fixed(l) => l,
            HalfArc::Shrinking(y) => PI * (1.0 - 4.0 * y / n as f64),
        };
        check_l(l)?;
        let source = match self.removal {
            Removal::Fixed(s) => SSource::Value(s),
            Removal::Rate(x) => SSource::Exp { x, n },
        };
        Ok(Symbol { l, source })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum SSource {
    Value(f64),
    Exp { x: f64, n: usize },
}

/// A single symbol with concrete L and s.
///
/// s may be far below the f64 range when it comes from s = e^(-xn), so the
/// exact value is only materialized in big-float form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Symbol {
    pub l: f64,
    source: SSource,
}

impl Symbol {
    pub fn new(s: f64, l: f64) -> Result<Self> {
        SymbolParams::new(s, l)?.at(1)
    }

    /// s as f64; may underflow to zero.
    pub fn s(&self) -> f64 {
        match self.source {
            SSource::Value(s) => s,
            SSource::Exp { x, n } => (-x * n as f64).exp(),
        }
    }

    /// log s as f64; -inf for s = 0.
    pub fn log_s(&self) -> f64 {
        match self.source {
            SSource::Value(s) => s.ln(),
            SSource::Exp { x, n } => -x * n as f64,
        }
    }

    pub fn s_big(&self, prec: u32) -> Float {
        match self.source {
            SSource::Value(s) => Float::with_val(prec, s),
            SSource::Exp { x, n } => {
                let mut e = Float::with_val(prec, x);
                e *= n as u64;
                e = -e;
                e.exp()
            }
        }
    }
}

/// f_k in double precision.
pub fn fourier_coeff(k: i64, p: &Symbol) -> f64 {
    let s = p.s();
    if k == 0 {
        p.l / PI + s * (PI - p.l) / PI
    } else {
        let k = k.unsigned_abs() as f64;
        (1.0 - s) * (k * p.l).sin() / (PI * k)
    }
}

/// f_0..f_m at the given precision, for an explicit big-float s.
///
/// sin(kL) comes from the three-term recurrence run with guard bits.
pub fn fourier_coeffs_big(m: usize, l: f64, s: &Float, prec: u32) -> Vec<Float> {
    let wp = prec + 32 + (usize::BITS - m.leading_zeros());
    let pi = Float::with_val(wp, Constant::Pi);
    let lf = Float::with_val(wp, l);
    let one_minus_s = Float::with_val(wp, 1 - Float::with_val(wp, s));

    let mut out = Vec::with_capacity(m + 1);
    let mut f0 = Float::with_val(wp, &pi - &lf);
    f0 *= s;
    f0 += &lf;
    f0 /= &pi;
    out.push(Float::with_val(prec, &f0));
    if m == 0 {
        return out;
    }

    let (sin_l, cos_l) = lf.clone().sin_cos(Float::new(wp));
    let two_cos = Float::with_val(wp, &cos_l * 2u32);
    let scale = Float::with_val(wp, &one_minus_s / &pi);
    let mut prev = Float::new(wp);
    let mut cur = sin_l;
    for k in 1..=m {
        let mut fk = Float::with_val(wp, &cur * &scale);
        fk /= k as u64;
        out.push(Float::with_val(prec, &fk));
        let next = Float::with_val(wp, &two_cos * &cur) - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    out
}

/// Value of f at angle θ; the endpoints ±L count as inside the arc.
pub fn symbol_eval(theta: f64, p: &Symbol) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t.abs() <= p.l {
        1.0
    } else {
        p.s()
    }
}

/// Four-case taxonomy for the family at matrix size n.
pub fn classify_regime(n: usize, p: &SymbolParams) -> Result<Regime> {
    let sym = p.at(n)?;
    if sym.s() == 0.0 && matches!(p.removal, Removal::Fixed(_)) {
        return Ok(Regime::CaseIII);
    }
    if matches!(p.arc, HalfArc::Shrinking(_)) {
        return Ok(Regime::CaseII);
    }
    let rate = -sym.log_s() / n as f64;
    if rate >= critical_x(sym.l) {
        return Ok(Regime::CaseIII);
    }
    match p.removal {
        Removal::Rate(x) if x > 0.0 => Ok(Regime::CaseIV),
        _ => Ok(Regime::CaseI),
    }
}
