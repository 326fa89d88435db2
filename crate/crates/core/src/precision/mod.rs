//! Exact rationals, configurable-precision floats, and polynomial algebra over Q.

mod context;
mod field;
mod poly;
mod scalar;
mod series;
mod upoly;

pub use context::{PrecisionContext, DEFAULT_BITS, MIN_BITS};
pub use field::Field;
pub use poly::BivarPoly;
pub use scalar::{float_to_string, rational_to_string, ArithOp, Scalar, ScalarKind};
pub(crate) use scalar::parse_rational;
pub use series::EpsSeries;
pub use upoly::UPoly;

pub use rug::{Complex, Float, Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision {bits} bits is below the minimum of {min}")]
    PrecisionTooLow { bits: u32, min: u32 },
    #[error("cannot parse number `{0}`")]
    Parse(String),
    #[error("term {term} is not divisible by x^{dx} y^{dy}")]
    NotDivisible { term: String, dx: u32, dy: u32 },
}

/// Parses `"num/den"` or an integer literal into an exact rational.
pub fn rational(text: &str) -> Result<Rational, ArithError> {
    parse_rational(text)
}

/// Shorthand for `num/den` as a rational; panics on a zero denominator.
pub fn q(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::from((num, den))
}
