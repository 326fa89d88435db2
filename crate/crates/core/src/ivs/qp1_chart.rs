use serde::Serialize;

use super::IvsError;
use crate::dpmaps::ChartId;
use crate::precision::Scalar;

/// Blow-up chart of the q-map at its base point `(1/z, 0)`.
///
/// Coordinates `(u, v)` with `x = 1/z + u v`, `y = v`; the exceptional line is
/// `v = 0` and `u` is the slope `(x - 1/z)/y` of the approach.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Qp1BasepointChart {
    pub z: Scalar,
    pub center: (Scalar, Scalar),
    pub chart: ChartId,
}

pub fn qp1_basepoint_chart(z: &Scalar) -> Result<Qp1BasepointChart, IvsError> {
    if z.is_zero() {
        return Err(IvsError::Parameter("z must be nonzero".into()));
    }
    let inv = z.one_like().checked_div(z).map_err(|e| IvsError::Parameter(e.to_string()))?;
    let center = (inv, Scalar::int(0));
    Ok(Qp1BasepointChart {
        z: z.clone(),
        chart: ChartId::Blowup { base: 0, branch: 1, center: center.clone() },
        center,
    })
}

impl Qp1BasepointChart {
    /// `(x, y)` for chart coordinates `(u, v)`.
    pub fn substitution(&self, u: &Scalar, v: &Scalar) -> (Scalar, Scalar) {
        (self.center.0.add(&u.mul(v)), v.clone())
    }

    /// One step of the map lifted to the chart. With `x = 1/z + u v` the
    /// numerator `z x - 1 = z u v` cancels the factor `y = v`, leaving
    /// `(x̄, ȳ) = (u / x², x)`, which stays defined on `v = 0`.
    pub fn lifted_step(&self, u: &Scalar, v: &Scalar) -> Result<(Scalar, Scalar), IvsError> {
        let (x, _) = self.substitution(u, v);
        let next = u
            .checked_div(&x.mul(&x))
            .map_err(|_| IvsError::Parameter("lifted step undefined where x = 0".into()))?;
        Ok((next, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpmaps::{step_qp1, QP1Params};

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::exact(n, d).unwrap()
    }

    #[test]
    fn center_is_one_over_z() {
        let c = qp1_basepoint_chart(&s(2, 1)).unwrap();
        assert_eq!(c.center, (s(1, 2), s(0, 1)));
        assert!(qp1_basepoint_chart(&s(0, 1)).is_err());
    }

    #[test]
    fn lifted_step_agrees_off_the_exceptional_line() {
        let p = QP1Params::new(s(2, 1), s(3, 1)).unwrap();
        let n = 1;
        let z = p.z(n);
        let c = qp1_basepoint_chart(&z).unwrap();
        let (u, v) = (s(5, 7), s(1, 11));
        let (x, y) = c.substitution(&u, &v);
        let direct = step_qp1(&y, &x, n, &p).unwrap();
        assert_eq!(c.lifted_step(&u, &v).unwrap(), (direct, x));
    }

    #[test]
    fn exceptional_line_maps_to_u_z_squared() {
        let z = s(3, 2);
        let c = qp1_basepoint_chart(&z).unwrap();
        let (next, x) = c.lifted_step(&s(4, 1), &s(0, 1)).unwrap();
        assert_eq!(x, s(2, 3));
        assert_eq!(next, s(9, 1));
    }
}
