use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("singular input: {0}")]
    Singular(String),

    #[error("root not bracketed on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    Bracketing { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("precision exhausted at {bits} bits (degree {degree}, h = {h:e})")]
    PrecisionExhausted { bits: u32, degree: usize, h: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("unreliable sample: {0}")]
    UnreliableSample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
