use rug::Float;
use serde::{Deserialize, Serialize};

use super::StepError;
use crate::elliptic::{jacobi, Modulus};
use crate::precision::{PrecisionContext, Scalar};

/// Which second-order map a trajectory iterates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapId {
    Dp1,
    Qp1,
    Qp1Auto,
    Ercg,
}

impl MapId {
    pub fn name(&self) -> &'static str {
        match self {
            MapId::Dp1 => "dp1",
            MapId::Qp1 => "qp1",
            MapId::Qp1Auto => "qp1-auto",
            MapId::Ercg => "ercg",
        }
    }
}

impl std::str::FromStr for MapId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dp1" => Ok(MapId::Dp1),
            "qp1" => Ok(MapId::Qp1),
            "qp1-auto" | "qp1_auto" => Ok(MapId::Qp1Auto),
            "ercg" => Ok(MapId::Ercg),
            other => Err(format!("unknown map `{other}`")),
        }
    }
}

/// `w(w̄ + w + w̲) = a n + b + c w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DP1Params {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl DP1Params {
    pub fn new(a: Scalar, b: Scalar, c: Scalar) -> Self {
        DP1Params { a, b, c }
    }

    /// `a n + b`.
    pub fn affine_rhs(&self, n: i64) -> Scalar {
        self.a.mul(&Scalar::int(n)).add(&self.b)
    }
}

/// `w̄ w̲ = 1/w - 1/(z w²)` with `z_n = a qⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QP1Params {
    a: Scalar,
    q: Scalar,
}

impl QP1Params {
    pub fn new(a: Scalar, q: Scalar) -> Result<Self, StepError> {
        if a.is_zero() {
            return Err(StepError::Parameter("a must be nonzero".into()));
        }
        if q.is_zero() || q == Scalar::int(1) {
            return Err(StepError::Parameter("q must differ from 0 and 1".into()));
        }
        Ok(QP1Params { a, q })
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn z(&self, n: i64) -> Scalar {
        let p = self.q.pow_u(n.unsigned_abs() as u32);
        let qn = if n >= 0 {
            p
        } else {
            p.one_like().checked_div(&p).expect("q is nonzero")
        };
        self.a.mul(&qn)
    }
}

impl<'de> Deserialize<'de> for QP1Params {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: Scalar,
            q: Scalar,
        }
        let raw = Raw::deserialize(d)?;
        QP1Params::new(raw.a, raw.q).map_err(serde::de::Error::custom)
    }
}

/// Elliptic-difference parameters: `z_n = (γe + γo) n + ω`, with `γ_n`
/// alternating between `γe` (even n) and `γo` (odd n).
#[derive(Clone, Debug, PartialEq)]
pub struct ErcgParams {
    pub modulus: Modulus,
    pub gamma_e: Float,
    pub gamma_o: Float,
    pub omega: Float,
}

/// The three coefficient groups of the elliptic map at one index.
///
/// With `w̄`, `w̲` the neighbours of `w`, the relation is
/// `A·w(w̄ + w̲) - B·(w̄ w̲ + w²) + C·(1 + k² w² w̄ w̲) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErcgCoefficients {
    pub a: Float,
    pub b: Float,
    pub c: Float,
    pub k2: Float,
}

impl ErcgParams {
    pub fn z(&self, n: i64, bits: u32) -> Float {
        let s = Float::with_val(bits, &self.gamma_e + &self.gamma_o);
        Float::with_val(bits, s * n) + &self.omega
    }

    pub fn gamma(&self, n: i64) -> &Float {
        if n.rem_euclid(2) == 0 {
            &self.gamma_e
        } else {
            &self.gamma_o
        }
    }

    /// Coefficients transcribed group by group:
    /// `A = cn(γ_n) dn(γ_n) (1 - k² sn⁴(z_n))`,
    /// `B = cn(z_n) dn(z_n) (1 - k² sn²(z_n) sn²(γ_n))`,
    /// `C = (cn²(z_n) - cn²(γ_n)) cn(z_n) dn(z_n)`.
    pub fn coefficients(&self, n: i64, ctx: &PrecisionContext) -> Result<ErcgCoefficients, StepError> {
        let bits = ctx.bits();
        let z = self.z(n, bits);
        let jz = jacobi(&z, &self.modulus, ctx)?;
        let jg = jacobi(self.gamma(n), &self.modulus, ctx)?;
        let k2 = Float::with_val(bits, self.modulus.k().square_ref());
        let snz2 = Float::with_val(bits, jz.sn.square_ref());
        let sng2 = Float::with_val(bits, jg.sn.square_ref());
        let cnz2 = Float::with_val(bits, jz.cn.square_ref());
        let cng2 = Float::with_val(bits, jg.cn.square_ref());
        let cdz = Float::with_val(bits, &jz.cn * &jz.dn);
        let cdg = Float::with_val(bits, &jg.cn * &jg.dn);
        let snz4 = Float::with_val(bits, snz2.square_ref());
        let one_a = Float::with_val(bits, 1 - Float::with_val(bits, &k2 * &snz4));
        let a = Float::with_val(bits, &cdg * &one_a);
        let k2ss = Float::with_val(bits, Float::with_val(bits, &k2 * &snz2) * &sng2);
        let one_b = Float::with_val(bits, 1 - k2ss);
        let b = Float::with_val(bits, &cdz * &one_b);
        let diff = Float::with_val(bits, &cnz2 - &cng2);
        let c = Float::with_val(bits, &diff * &cdz);
        Ok(ErcgCoefficients { a, b, c, k2 })
    }
}

impl Serialize for ErcgParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            k: Scalar,
            gamma_e: Scalar,
            gamma_o: Scalar,
            omega: Scalar,
        }
        Repr {
            k: Scalar::Real(self.modulus.k().clone()),
            gamma_e: Scalar::Real(self.gamma_e.clone()),
            gamma_o: Scalar::Real(self.gamma_o.clone()),
            omega: Scalar::Real(self.omega.clone()),
        }
        .serialize(s)
    }
}

/// Parameters of any of the supported maps.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum MapParams {
    Dp1(DP1Params),
    Qp1(QP1Params),
    Qp1Auto,
    Ercg(ErcgParams),
}

impl MapParams {
    pub fn id(&self) -> MapId {
        match self {
            MapParams::Dp1(_) => MapId::Dp1,
            MapParams::Qp1(_) => MapId::Qp1,
            MapParams::Qp1Auto => MapId::Qp1Auto,
            MapParams::Ercg(_) => MapId::Ercg,
        }
    }
}

/// `1/z_n` for the q-map, the first coordinate of its base point at index n.
pub fn inverse_z(p: &QP1Params, n: i64) -> Scalar {
    let z = p.z(n);
    z.one_like().checked_div(&z).expect("z_n is nonzero")
}
