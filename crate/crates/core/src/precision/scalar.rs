use std::fmt;
use std::str::FromStr;

use rug::{Complex, Float, Integer, Rational};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ArithError, PrecisionContext};

/// Which representation a [`Scalar`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Rational,
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A number that is either an exact rational or an inexact real/complex value
/// with its own mantissa width.
///
/// Rationals are kept canonical by `rug` (lowest terms, positive denominator).
/// Mixing an exact operand with an inexact one yields an inexact result at the
/// larger of the operand precisions.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Real(Float),
    Complex(Complex),
}

impl Scalar {
    pub fn exact(num: i64, den: i64) -> Result<Scalar, ArithError> {
        if den == 0 {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Scalar::Exact(Rational::from((num, den))))
    }

    pub fn int(v: i64) -> Scalar {
        Scalar::Exact(Rational::from(v))
    }

    pub fn real_in(ctx: &PrecisionContext, v: f64) -> Scalar {
        Scalar::Real(Float::with_val(ctx.bits(), v))
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Exact(_) => ScalarKind::Rational,
            Scalar::Real(_) => ScalarKind::Real,
            Scalar::Complex(_) => ScalarKind::Complex,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Mantissa width for inexact kinds.
    pub fn precision_bits(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Real(f) => Some(f.prec()),
            Scalar::Complex(c) => Some(c.prec().0.max(c.prec().1)),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => *r == 0,
            Scalar::Real(f) => f.is_zero(),
            Scalar::Complex(c) => c.real().is_zero() && c.imag().is_zero(),
        }
    }

    /// Real part as a float at `bits` precision.
    pub fn to_float(&self, bits: u32) -> Float {
        match self {
            Scalar::Exact(r) => Float::with_val(bits, r),
            Scalar::Real(f) => Float::with_val(bits, f),
            Scalar::Complex(c) => Float::with_val(bits, c.real()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Real(f) => f.to_f64(),
            Scalar::Complex(c) => c.real().to_f64(),
        }
    }

    /// Magnitude as a float (absolute value, or modulus for complex).
    pub fn abs_float(&self, bits: u32) -> Float {
        match self {
            Scalar::Exact(r) => Float::with_val(bits, r).abs(),
            Scalar::Real(f) => Float::with_val(bits, f).abs(),
            Scalar::Complex(c) => Float::with_val(bits, c.abs_ref()),
        }
    }

    fn promote_pair(a: &Scalar, b: &Scalar) -> (ScalarKind, u32) {
        let kind = match (a.kind(), b.kind()) {
            (ScalarKind::Complex, _) | (_, ScalarKind::Complex) => ScalarKind::Complex,
            (ScalarKind::Real, _) | (_, ScalarKind::Real) => ScalarKind::Real,
            _ => ScalarKind::Rational,
        };
        let bits = a
            .precision_bits()
            .into_iter()
            .chain(b.precision_bits())
            .max()
            .unwrap_or(0);
        (kind, bits)
    }

    fn as_complex(&self, bits: u32) -> Complex {
        match self {
            Scalar::Exact(r) => Complex::with_val(bits, (r, 0)),
            Scalar::Real(f) => Complex::with_val(bits, (f, 0)),
            Scalar::Complex(c) => Complex::with_val(bits, c),
        }
    }

    /// The four field operations with the promotion rule applied.
    pub fn arith(&self, other: &Scalar, op: ArithOp) -> Result<Scalar, ArithError> {
        if op == ArithOp::Div && other.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let (kind, bits) = Self::promote_pair(self, other);
        Ok(match kind {
            ScalarKind::Rational => {
                let (a, b) = (self.as_rational().unwrap(), other.as_rational().unwrap());
                Scalar::Exact(match op {
                    ArithOp::Add => Rational::from(a + b),
                    ArithOp::Sub => Rational::from(a - b),
                    ArithOp::Mul => Rational::from(a * b),
                    ArithOp::Div => Rational::from(a / b),
                })
            }
            ScalarKind::Real => {
                let (a, b) = (self.to_float(bits), other.to_float(bits));
                Scalar::Real(match op {
                    ArithOp::Add => Float::with_val(bits, &a + &b),
                    ArithOp::Sub => Float::with_val(bits, &a - &b),
                    ArithOp::Mul => Float::with_val(bits, &a * &b),
                    ArithOp::Div => Float::with_val(bits, &a / &b),
                })
            }
            ScalarKind::Complex => {
                let (a, b) = (self.as_complex(bits), other.as_complex(bits));
                Scalar::Complex(match op {
                    ArithOp::Add => Complex::with_val(bits, &a + &b),
                    ArithOp::Sub => Complex::with_val(bits, &a - &b),
                    ArithOp::Mul => Complex::with_val(bits, &a * &b),
                    ArithOp::Div => Complex::with_val(bits, &a / &b),
                })
            }
        })
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.arith(other, ArithOp::Add).expect("addition cannot fail")
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.arith(other, ArithOp::Sub).expect("subtraction cannot fail")
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.arith(other, ArithOp::Mul).expect("multiplication cannot fail")
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ArithError> {
        self.arith(other, ArithOp::Div)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(Rational::from(-r)),
            Scalar::Real(f) => Scalar::Real(Float::with_val(f.prec(), -f)),
            Scalar::Complex(c) => Scalar::Complex(Complex::with_val(c.prec(), -c)),
        }
    }

    pub fn pow_u(&self, e: u32) -> Scalar {
        let mut acc = self.one_like();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn zero_like(&self) -> Scalar {
        match self {
            Scalar::Exact(_) => Scalar::int(0),
            Scalar::Real(f) => Scalar::Real(Float::with_val(f.prec(), 0)),
            Scalar::Complex(c) => Scalar::Complex(Complex::with_val(c.prec(), 0)),
        }
    }

    pub fn one_like(&self) -> Scalar {
        match self {
            Scalar::Exact(_) => Scalar::int(1),
            Scalar::Real(f) => Scalar::Real(Float::with_val(f.prec(), 1)),
            Scalar::Complex(c) => Scalar::Complex(Complex::with_val(c.prec(), 1)),
        }
    }

    /// Parses `"num/den"` or an integer as an exact rational, anything else as
    /// a decimal real at the context precision.
    pub fn parse(text: &str, ctx: &PrecisionContext) -> Result<Scalar, ArithError> {
        let text = text.trim();
        if looks_rational(text) {
            return parse_rational(text).map(Scalar::Exact);
        }
        ctx.parse_float(text).map(Scalar::Real)
    }
}

fn looks_rational(text: &str) -> bool {
    let body = text.strip_prefix('-').or_else(|| text.strip_prefix('+')).unwrap_or(text);
    let mut parts = body.splitn(2, '/');
    let num = parts.next().unwrap_or("");
    let den = parts.next();
    let digits = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit());
    digits(num) && den.map_or(true, |d| digits(d.trim_start_matches('-')))
}

pub(crate) fn parse_rational(text: &str) -> Result<Rational, ArithError> {
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = Integer::from_str(n).map_err(|_| ArithError::Parse(text.to_string()))?;
    let den = Integer::from_str(d).map_err(|_| ArithError::Parse(text.to_string()))?;
    if den == 0 {
        return Err(ArithError::DivisionByZero);
    }
    Ok(Rational::from((num, den)))
}

/// `"num/den"` (or `"num"` for integers); the wire form for exact values.
pub fn rational_to_string(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn float_to_string(f: &Float) -> String {
    f.to_string_radix(10, None)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => f.write_str(&rational_to_string(r)),
            Scalar::Real(x) => f.write_str(&float_to_string(x)),
            Scalar::Complex(c) => write!(
                f,
                "({},{})",
                float_to_string(c.real()),
                float_to_string(c.imag())
            ),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::int(v)
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    kind: ScalarKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    num: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    den: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    re: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    im: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    bits: Option<u32>,
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Scalar::Exact(r) => ScalarRepr {
                kind: ScalarKind::Rational,
                num: Some(r.numer().to_string()),
                den: Some(r.denom().to_string()),
                re: None,
                im: None,
                bits: None,
            },
            Scalar::Real(x) => ScalarRepr {
                kind: ScalarKind::Real,
                num: None,
                den: None,
                re: Some(float_to_string(x)),
                im: None,
                bits: Some(x.prec()),
            },
            Scalar::Complex(c) => ScalarRepr {
                kind: ScalarKind::Complex,
                num: None,
                den: None,
                re: Some(float_to_string(c.real())),
                im: Some(float_to_string(c.imag())),
                bits: self.precision_bits(),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(d)?;
        let float = |text: &Option<String>, bits: u32| -> Result<Float, D::Error> {
            let text = text.as_deref().ok_or_else(|| D::Error::missing_field("re"))?;
            Float::parse(text)
                .map(|p| Float::with_val(bits, p))
                .map_err(D::Error::custom)
        };
        match repr.kind {
            ScalarKind::Rational => {
                let num = repr.num.ok_or_else(|| D::Error::missing_field("num"))?;
                let den = repr.den.unwrap_or_else(|| "1".into());
                parse_rational(&format!("{num}/{den}"))
                    .map(Scalar::Exact)
                    .map_err(D::Error::custom)
            }
            ScalarKind::Real => {
                let bits = repr.bits.ok_or_else(|| D::Error::missing_field("bits"))?;
                Ok(Scalar::Real(float(&repr.re, bits)?))
            }
            ScalarKind::Complex => {
                let bits = repr.bits.ok_or_else(|| D::Error::missing_field("bits"))?;
                let re = float(&repr.re, bits)?;
                let im = float(&repr.im, bits)?;
                Ok(Scalar::Complex(Complex::with_val(bits, (re, im))))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::exact(n, d).unwrap()
    }

    #[test]
    fn exact_fraction_arithmetic() {
        assert_eq!(q(1, 6).add(&Scalar::int(2)), q(13, 6));
        assert_eq!(q(41, 18).checked_div(&q(1, 3)).unwrap(), q(41, 6));
        assert_eq!(
            Scalar::int(5).checked_div(&Scalar::int(0)),
            Err(ArithError::DivisionByZero)
        );
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = q(6, -4);
        let Scalar::Exact(r) = r else { panic!() };
        assert_eq!(*r.numer(), -3);
        assert_eq!(*r.denom(), 2);
    }

    #[test]
    fn mixing_promotes_to_max_precision() {
        let ctx = PrecisionContext::new(128).unwrap();
        let a = Scalar::real_in(&ctx, 1.5);
        let b = Scalar::Real(Float::with_val(300, 2));
        let s = a.add(&q(1, 3));
        assert_eq!(s.kind(), ScalarKind::Real);
        assert_eq!(s.precision_bits(), Some(128));
        assert_eq!(a.mul(&b).precision_bits(), Some(300));
        let c = Scalar::Complex(Complex::with_val(200, (1, 1)));
        let cq = c.sub(&q(1, 2));
        assert_eq!(cq.kind(), ScalarKind::Complex);
        assert_eq!(cq.precision_bits(), Some(200));
    }

    #[test]
    fn parse_kinds() {
        let ctx = PrecisionContext::default();
        assert_eq!(Scalar::parse("41/6", &ctx).unwrap(), q(41, 6));
        assert_eq!(Scalar::parse("-3", &ctx).unwrap(), Scalar::int(-3));
        let r = Scalar::parse("0.5", &ctx).unwrap();
        assert_eq!(r.kind(), ScalarKind::Real);
        assert_eq!(r.precision_bits(), Some(256));
        assert!(Scalar::parse("1/0", &ctx).is_err());
        assert!(Scalar::parse("abc", &ctx).is_err());
    }

    #[test]
    fn json_forms() {
        let v = serde_json::to_value(q(13, 6)).unwrap();
        assert_eq!(v, serde_json::json!({"kind": "rational", "num": "13", "den": "6"}));
        let ctx = PrecisionContext::new(128).unwrap();
        let x = Scalar::real_in(&ctx, 0.1);
        let text = serde_json::to_string(&x).unwrap();
        let back: Scalar = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
        let c = Scalar::Complex(Complex::with_val(96, (0.25, -3)));
        let back: Scalar = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
