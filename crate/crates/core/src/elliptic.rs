//! Jacobi elliptic functions by the descending Landen (AGM) scale.

use rug::float::Constant;
use rug::Float;

use crate::precision::PrecisionContext;

/// Extra bits carried through the AGM scale and the amplitude recurrence.
const GUARD_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EllipticError {
    #[error("modulus {0} is outside [0, 1]")]
    ModulusOutOfRange(String),
    #[error("the complete integral diverges at k = 1")]
    Divergent,
    #[error("argument is not finite")]
    NonFinite,
}

/// Modulus `k` with its complement `k' = sqrt(1 - k²)`, computed once from
/// `(1-k)(1+k)` so it keeps full relative accuracy near `k = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulus {
    k: Float,
    kp: Float,
}

impl Modulus {
    pub fn new(k: Float) -> Result<Self, EllipticError> {
        if !(k >= 0 && k <= 1) {
            return Err(EllipticError::ModulusOutOfRange(k.to_string()));
        }
        let p = k.prec() + GUARD_BITS;
        let one_minus = Float::with_val(p, 1 - Float::with_val(p, &k));
        let one_plus = Float::with_val(p, 1 + Float::with_val(p, &k));
        let kp = Float::with_val(p, one_minus * one_plus).sqrt();
        Ok(Modulus { k, kp })
    }

    pub fn from_f64(k: f64, ctx: &PrecisionContext) -> Result<Self, EllipticError> {
        Self::new(ctx.float(k))
    }

    pub fn k(&self) -> &Float {
        &self.k
    }

    /// Complementary modulus, carried with guard bits.
    pub fn complement(&self) -> &Float {
        &self.kp
    }

    pub fn is_zero(&self) -> bool {
        self.k.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.k == 1
    }
}

/// `(sn, cn, dn)` at one argument and modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiTriple {
    pub sn: Float,
    pub cn: Float,
    pub dn: Float,
}

/// Evaluates `sn, cn, dn` at real `u`.
///
/// The AGM scale `a, b = k', c = k` descends until `c_N` is below the guarded
/// epsilon; the amplitude `φ_N = 2^N a_N u` is then stepped back with
/// `φ_{n-1} = (φ_n + asin(c_n/a_n · sin φ_n))/2`. `dn` is taken as
/// `sqrt(k'² + k² cn²)`, which is positive and free of cancellation.
pub fn jacobi(u: &Float, m: &Modulus, ctx: &PrecisionContext) -> Result<JacobiTriple, EllipticError> {
    if !u.is_finite() {
        return Err(EllipticError::NonFinite);
    }
    let bits = ctx.bits();
    let p = bits + GUARD_BITS;
    let u = Float::with_val(p, u);
    let round = |x: Float| Float::with_val(bits, x);
    if m.is_zero() {
        return Ok(JacobiTriple {
            sn: round(Float::with_val(p, u.sin_ref())),
            cn: round(Float::with_val(p, u.cos_ref())),
            dn: ctx.float(1),
        });
    }
    if m.is_one() {
        let sech = Float::with_val(p, u.cosh_ref()).recip();
        return Ok(JacobiTriple {
            sn: round(Float::with_val(p, u.tanh_ref())),
            cn: round(sech.clone()),
            dn: round(sech),
        });
    }
    let k = Float::with_val(p, m.k());
    let kp = Float::with_val(p, m.complement());
    let tiny = Float::with_val(p, 1) >> p;
    let mut a = vec![Float::with_val(p, 1)];
    let mut c = vec![k.clone()];
    let mut b = kp.clone();
    while c.last().unwrap().clone().abs() > tiny && a.len() < 64 {
        let an = a.last().unwrap().clone();
        let next_a = Float::with_val(p, &an + &b) / 2u32;
        let next_c = Float::with_val(p, &an - &b) / 2u32;
        b = Float::with_val(p, &an * &b).sqrt();
        a.push(next_a);
        c.push(next_c);
    }
    let n = a.len() - 1;
    let mut phi = Float::with_val(p, &a[n] * &u) << n as u32;
    for i in (1..=n).rev() {
        let ratio = Float::with_val(p, &c[i] / &a[i]);
        let s = Float::with_val(p, phi.sin_ref()) * ratio;
        phi = Float::with_val(p, &phi + s.asin()) / 2u32;
    }
    let sn = Float::with_val(p, phi.sin_ref());
    let cn = Float::with_val(p, phi.cos_ref());
    let k2 = Float::with_val(p, k.square_ref());
    let kp2 = Float::with_val(p, kp.square_ref());
    let dn = Float::with_val(p, kp2 + k2 * Float::with_val(p, cn.square_ref())).sqrt();
    Ok(JacobiTriple { sn: round(sn), cn: round(cn), dn: round(dn) })
}

/// Quarter period `K(k) = π / (2 AGM(1, k'))`.
pub fn complete_k(m: &Modulus, ctx: &PrecisionContext) -> Result<Float, EllipticError> {
    if m.is_one() {
        return Err(EllipticError::Divergent);
    }
    let p = ctx.bits() + GUARD_BITS;
    let one = Float::with_val(p, 1);
    let agm = Float::with_val(p, one.agm_ref(m.complement()));
    let pi = Float::with_val(p, Constant::Pi);
    Ok(Float::with_val(ctx.bits(), pi / (agm * 2u32)))
}
