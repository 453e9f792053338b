use rug::Float;

use crate::error::{Error, Result};

/// Binary precision shared by all big-float arithmetic in one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: u32,
}

impl PrecisionContext {
    pub const DEFAULT_BITS: u32 = 256;
    pub const MIN_BITS: u32 = 64;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::InvalidParameter(format!(
                "precision must be at least {} bits, got {bits}",
                Self::MIN_BITS
            )));
        }
        Ok(Self { bits })
    }

    /// Starting precision for an order-n Toeplitz determinant.
    pub fn for_determinant(n: usize) -> Self {
        let bits = (8 * n).clamp(Self::DEFAULT_BITS as usize, u32::MAX as usize / 4) as u32;
        Self { bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn doubled(&self) -> Self {
        Self { bits: self.bits.saturating_mul(2) }
    }

    pub fn with_guard(&self, extra: u32) -> Self {
        Self { bits: self.bits + extra }
    }

    /// Unit roundoff 2^(1-bits), exact.
    pub fn eps(&self) -> Float {
        Float::with_val(self.bits, Float::u_exp(1, 1 - self.bits as i32))
    }

    /// Unit roundoff as f64; zero once it underflows.
    pub fn eps_f64(&self) -> f64 {
        2f64.powi(1 - self.bits as i32)
    }

    pub fn float(&self, v: f64) -> Float {
        Float::with_val(self.bits, v)
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { bits: Self::DEFAULT_BITS }
    }
}
