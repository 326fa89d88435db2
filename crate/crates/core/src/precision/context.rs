use rug::Float;
use serde::{Deserialize, Serialize};

use super::ArithError;

/// Smallest mantissa width accepted for inexact arithmetic.
pub const MIN_BITS: u32 = 64;

/// Default mantissa width for inexact reals.
pub const DEFAULT_BITS: u32 = 256;

/// Working precision for inexact arithmetic.
///
/// `epsilon` is always `2^(1 - bits)`; it is derived on demand so the two can
/// never disagree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrecisionContext {
    bits: u32,
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Result<Self, ArithError> {
        if bits < MIN_BITS {
            return Err(ArithError::PrecisionTooLow { bits, min: MIN_BITS });
        }
        Ok(PrecisionContext { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `2^(1 - bits)`, exactly representable.
    pub fn epsilon(&self) -> Float {
        let one = Float::with_val(self.bits, 1);
        one >> (self.bits - 1)
    }

    /// A context with `extra` additional guard bits.
    pub fn with_guard(&self, extra: u32) -> Self {
        PrecisionContext { bits: self.bits + extra }
    }

    /// Twice the mantissa width (used where conditioning degrades quickly).
    pub fn doubled(&self) -> Self {
        PrecisionContext { bits: self.bits * 2 }
    }

    pub fn float<T>(&self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, value)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, rug::float::Constant::Pi)
    }

    /// Parses a decimal or `num/den` literal into a float at this precision.
    pub fn parse_float(&self, text: &str) -> Result<Float, ArithError> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let r = super::scalar::parse_rational(&format!("{}/{}", n.trim(), d.trim()))?;
            return Ok(Float::with_val(self.bits, &r));
        }
        Float::parse(text)
            .map(|p| Float::with_val(self.bits, p))
            .map_err(|_| ArithError::Parse(text.to_string()))
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { bits: DEFAULT_BITS }
    }
}

impl TryFrom<u32> for PrecisionContext {
    type Error = ArithError;
    fn try_from(bits: u32) -> Result<Self, Self::Error> {
        PrecisionContext::new(bits)
    }
}

impl From<PrecisionContext> for u32 {
    fn from(ctx: PrecisionContext) -> u32 {
        ctx.bits
    }
}
