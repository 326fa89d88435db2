use rug::Float;

use super::params::{DP1Params, ErcgParams, QP1Params};
use super::StepError;
use crate::precision::{Field, PrecisionContext, Scalar};

/// Coefficients of one exact-capable map at a fixed index, in a field `F`.
#[derive(Clone, Debug)]
pub(crate) enum StepCoeffs<F> {
    /// `alpha = a n + b`.
    Dp1 { alpha: F, c: F },
    Qp1 { z: F },
    Auto,
}

impl<F: Field> StepCoeffs<F> {
    /// Affine step `w̄ = f(w̲, w)`; `None` where the formula divides by zero.
    pub(crate) fn affine(&self, w_prev: &F, w: &F) -> Option<F> {
        match self {
            StepCoeffs::Dp1 { alpha, c } => {
                let r = alpha.add(&c.mul(w)).div(w)?;
                Some(r.sub(w).sub(w_prev))
            }
            StepCoeffs::Qp1 { z } => {
                let num = z.mul(w).sub(&w.one_like());
                let den = z.mul(&w.square()).mul(w_prev);
                num.div(&den)
            }
            StepCoeffs::Auto => w.mul(w_prev).inv(),
        }
    }

    /// Homogeneous step on P¹×P¹: `x = [x0:x1] = w`, `y = [y0:y1] = w̲`.
    /// Both components vanish exactly at the indeterminacy points.
    pub(crate) fn homogeneous(&self, x: &(F, F), y: &(F, F)) -> (F, F) {
        let (x0, x1) = x;
        let (y0, y1) = y;
        match self {
            StepCoeffs::Dp1 { alpha, c } => {
                let x1y1 = x1.mul(y1);
                let t1 = alpha.mul(x1).mul(&x1y1);
                let t2 = c.mul(x0).mul(&x1y1);
                let t3 = x0.square().mul(y1);
                let t4 = x0.mul(x1).mul(y0);
                (t1.add(&t2).sub(&t3).sub(&t4), x0.mul(&x1y1))
            }
            StepCoeffs::Qp1 { z } => {
                let first = z.mul(x0).sub(x1).mul(x1).mul(y1);
                let second = z.mul(&x0.square()).mul(y0);
                (first, second)
            }
            StepCoeffs::Auto => (x1.mul(y1), x0.mul(y0)),
        }
    }

    pub(crate) fn map<G>(&self, f: impl Fn(&F) -> G) -> StepCoeffs<G> {
        match self {
            StepCoeffs::Dp1 { alpha, c } => StepCoeffs::Dp1 { alpha: f(alpha), c: f(c) },
            StepCoeffs::Qp1 { z } => StepCoeffs::Qp1 { z: f(z) },
            StepCoeffs::Auto => StepCoeffs::Auto,
        }
    }
}

/// Solves `w(w̄ + w + w̲) = a n + b + c w` for `w̄`.
pub fn step_dp1(w_prev: &Scalar, w: &Scalar, n: i64, p: &DP1Params) -> Result<Scalar, StepError> {
    let co = StepCoeffs::Dp1 { alpha: p.affine_rhs(n), c: p.c.clone() };
    co.affine(w_prev, w).ok_or_else(|| StepError::Singular { n, w_prev: w_prev.to_string(), w: w.to_string() })
}

/// `w̄ = (1/w - 1/(z_n w²)) / w̲`.
pub fn step_qp1(w_prev: &Scalar, w: &Scalar, n: i64, p: &QP1Params) -> Result<Scalar, StepError> {
    let co = StepCoeffs::Qp1 { z: p.z(n) };
    co.affine(w_prev, w).ok_or_else(|| StepError::Singular { n, w_prev: w_prev.to_string(), w: w.to_string() })
}

/// The autonomous limit `w̄ w w̲ = 1`.
pub fn step_qp1_auto(w_prev: &Scalar, w: &Scalar) -> Result<Scalar, StepError> {
    StepCoeffs::<Scalar>::Auto
        .affine(w_prev, w)
        .ok_or_else(|| StepError::Singular { n: 0, w_prev: w_prev.to_string(), w: w.to_string() })
}

/// The three groups whose sum multiplies `w̄` in the elliptic relation:
/// `A w`, `-B w̲` and `C k² w² w̲`.
pub fn ercg_linear_groups(w_prev: &Float, w: &Float, n: i64, p: &ErcgParams, ctx: &PrecisionContext) -> Result<[Float; 3], StepError> {
    let bits = ctx.bits();
    let co = p.coefficients(n, ctx)?;
    let g1 = Float::with_val(bits, &co.a * w);
    let g2 = Float::with_val(bits, -Float::with_val(bits, &co.b * w_prev));
    let w2 = Float::with_val(bits, w.square_ref());
    let g3 = Float::with_val(bits, Float::with_val(bits, &co.c * &co.k2) * w2) * w_prev;
    Ok([g1, g2, g3])
}

/// Solves the elliptic relation for `w̄` given `w̲ = w_prev` and `w`.
///
/// The relation is symmetric in `w̄ ↔ w̲`, so the same call steps backwards.
pub fn step_ercg(w_prev: &Float, w: &Float, n: i64, p: &ErcgParams, ctx: &PrecisionContext) -> Result<Float, StepError> {
    let bits = ctx.bits();
    let co = p.coefficients(n, ctx)?;
    let groups = ercg_linear_groups(w_prev, w, n, p, ctx)?;
    let lin = Float::with_val(bits, &groups[0] + &groups[1]) + &groups[2];
    let scale = groups.iter().fold(Float::with_val(bits, 0), |acc, g| acc + Float::with_val(bits, g.abs_ref()));
    let floor = Float::with_val(bits, ctx.epsilon() * 4u32) * &scale;
    if lin.is_zero() || Float::with_val(bits, lin.abs_ref()) <= floor {
        return Err(StepError::Indeterminate {
            n,
            groups: groups.map(|g| crate::precision::float_to_string(&g)),
        });
    }
    let w2 = Float::with_val(bits, w.square_ref());
    let t1 = Float::with_val(bits, &co.a * w) * w_prev;
    let t2 = Float::with_val(bits, &co.b * &w2);
    let constant = Float::with_val(bits, Float::with_val(bits, &t1 - &t2) + &co.c);
    Ok(Float::with_val(bits, -constant / lin))
}

/// `K(x, y) = (x² y² + x + y)/(x y)`.
pub fn k_invariant(x: &Scalar, y: &Scalar) -> Result<Scalar, StepError> {
    if x.is_zero() || y.is_zero() {
        return Err(StepError::ZeroArgument);
    }
    let xy = x.mul(y);
    let num = xy.mul(&xy).add(x).add(y);
    Ok(num.checked_div(&xy)?)
}

/// Right-hand side of `K(w̄, w) - K(w, w̲) = -(1/z) w (w̄ - w̲)/(w - 1/z)`.
///
/// `z = None` is the autonomous limit, where the defect vanishes identically.
pub fn k_defect(w_prev: &Scalar, w: &Scalar, w_next: &Scalar, z: Option<&Scalar>) -> Result<Scalar, StepError> {
    if w.is_zero() {
        return Err(StepError::ZeroArgument);
    }
    let Some(z) = z else {
        return Ok(w.zero_like());
    };
    let inv_z = z.one_like().checked_div(z)?;
    let gap = w.sub(&inv_z);
    if gap.is_zero() {
        return Err(StepError::BasePointProximity { w: w.to_string() });
    }
    let num = inv_z.mul(w).mul(&w_next.sub(w_prev));
    Ok(num.checked_div(&gap)?.neg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::Modulus;
    use crate::precision::q;
    use proptest::prelude::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::exact(n, d).unwrap()
    }

    fn k_as_sum(a: &Scalar, b: &Scalar) -> Scalar {
        // K(a, b) = ab + 1/a + 1/b
        let one = a.one_like();
        a.mul(b).add(&one.checked_div(a).unwrap()).add(&one.checked_div(b).unwrap())
    }

    #[test]
    fn dp1_examples() {
        let p = DP1Params::new(s(0, 1), s(3, 1), s(0, 1));
        assert_eq!(step_dp1(&s(1, 1), &s(1, 1), 7, &p).unwrap(), s(1, 1));
        let p = DP1Params::new(s(1, 1), s(0, 1), s(0, 1));
        assert_eq!(step_dp1(&s(0, 1), &s(1, 1), 2, &p).unwrap(), s(1, 1));
        assert!(matches!(step_dp1(&s(1, 1), &s(0, 1), 2, &p), Err(StepError::Singular { n: 2, .. })));
    }

    #[test]
    fn qp1_examples() {
        let p = QP1Params::new(s(2, 1), s(3, 1)).unwrap();
        assert_eq!(step_qp1(&s(1, 1), &s(1, 1), 0, &p).unwrap(), s(1, 2));
        assert_eq!(step_qp1_auto(&s(3, 1), &s(2, 1)).unwrap(), s(1, 6));
        assert!(step_qp1(&s(0, 1), &s(1, 1), 0, &p).is_err());
        assert!(QP1Params::new(s(1, 1), s(1, 1)).is_err());
        assert!(QP1Params::new(s(1, 1), s(0, 1)).is_err());
    }

    #[test]
    fn invariant_examples() {
        assert_eq!(k_invariant(&s(1, 1), &s(1, 1)).unwrap(), s(3, 1));
        assert_eq!(k_invariant(&s(2, 1), &s(3, 1)).unwrap(), s(41, 6));
        assert_eq!(k_invariant(&s(1, 6), &s(2, 1)).unwrap(), s(41, 6));
        assert!(k_invariant(&s(0, 1), &s(2, 1)).is_err());
    }

    #[test]
    fn defect_examples() {
        let z = s(2, 1);
        let d = k_defect(&s(1, 1), &s(1, 1), &s(1, 2), Some(&z)).unwrap();
        assert_eq!(d, s(1, 2));
        let direct = k_invariant(&s(1, 2), &s(1, 1)).unwrap().sub(&k_invariant(&s(1, 1), &s(1, 1)).unwrap());
        assert_eq!(d, direct);
        assert_eq!(k_defect(&s(3, 1), &s(2, 1), &s(1, 6), None).unwrap(), s(0, 1));
        assert!(matches!(
            k_defect(&s(1, 1), &s(1, 2), &s(1, 1), Some(&z)),
            Err(StepError::BasePointProximity { .. })
        ));
    }

    #[test]
    fn homogeneous_agrees_with_affine() {
        let co = StepCoeffs::Dp1 { alpha: q(7, 3), c: q(-1, 2) };
        let (x, y) = (q(5, 4), q(-2, 9));
        let aff = co.affine(&y, &x).unwrap();
        let (h0, h1) = co.homogeneous(&(x.clone(), q(1, 1)), &(y.clone(), q(1, 1)));
        assert_eq!(h0 / h1, aff);
        let co = StepCoeffs::Qp1 { z: q(3, 1) };
        let aff = co.affine(&y, &x).unwrap();
        let (h0, h1) = co.homogeneous(&(x.clone(), q(1, 1)), &(y.clone(), q(1, 1)));
        assert_eq!(h0 / h1, aff);
    }

    #[test]
    fn qp1_indeterminacy_points() {
        let z = q(2, 1);
        let co = StepCoeffs::Qp1 { z: z.clone() };
        let zero = q(0, 1);
        let one = q(1, 1);
        let pts = [
            ((q(1, 2), one.clone()), (zero.clone(), one.clone())),
            ((one.clone(), zero.clone()), (zero.clone(), one.clone())),
            ((zero.clone(), one.clone()), (one.clone(), zero.clone())),
        ];
        for (x, y) in pts {
            let (a, b) = co.homogeneous(&x, &y);
            assert!(a == 0 && b == 0);
        }
    }

    fn ctx128() -> PrecisionContext {
        PrecisionContext::new(128).unwrap()
    }

    fn ercg(k: &str, ge: &str, go: &str, om: &str, c: &PrecisionContext) -> ErcgParams {
        ErcgParams {
            modulus: Modulus::new(c.parse_float(k).unwrap()).unwrap(),
            gamma_e: c.parse_float(ge).unwrap(),
            gamma_o: c.parse_float(go).unwrap(),
            omega: c.parse_float(om).unwrap(),
        }
    }

    #[test]
    fn ercg_trigonometric_degeneration() {
        let c = ctx128();
        let p = ercg("0", "0.3", "0.45", "0.2", &c);
        let bits = c.bits();
        for n in 0..6i64 {
            let wp = c.parse_float("0.7").unwrap();
            let w = c.parse_float("-1.3").unwrap();
            let got = step_ercg(&wp, &w, n, &p, &c).unwrap();
            // independent evaluation: sn -> sin, cn -> cos, dn -> 1, k = 0
            let z = Float::with_val(bits, Float::with_val(bits, &p.gamma_e + &p.gamma_o) * n) + &p.omega;
            let g = p.gamma(n).clone();
            let cz = Float::with_val(bits, z.cos_ref());
            let cg = Float::with_val(bits, g.cos_ref());
            let a = cg.clone();
            let b = cz.clone();
            let cc = Float::with_val(bits, Float::with_val(bits, cz.square_ref()) - Float::with_val(bits, cg.square_ref())) * &cz;
            // A w (x + wp) - B (x wp + w²) + C = 0, linear in x
            let lin = Float::with_val(bits, &a * &w) - Float::with_val(bits, &b * &wp);
            let w2 = Float::with_val(bits, w.square_ref());
            let cst = Float::with_val(bits, Float::with_val(bits, &a * &w) * &wp) - Float::with_val(bits, &b * &w2) + &cc;
            let oracle = Float::with_val(bits, -cst / lin);
            let err = Float::with_val(bits, &got - &oracle).abs();
            assert!(err < 1e-25, "n = {n}, err = {err}");
        }
    }

    #[test]
    fn ercg_reversible() {
        let c = ctx128();
        let p = ercg("0.6", "0.17", "0.31", "0.4", &c);
        let mut wp = c.parse_float("0.35").unwrap();
        let mut w = c.parse_float("0.8").unwrap();
        for n in 1..20i64 {
            let next = step_ercg(&wp, &w, n, &p, &c).unwrap();
            let back = step_ercg(&next, &w, n, &p, &c).unwrap();
            let rel = Float::with_val(128, &back - &wp).abs() / Float::with_val(128, wp.abs_ref()).max(&Float::with_val(128, 1));
            assert!(rel < 1e-20, "n = {n}, rel = {rel}");
            wp = w;
            w = next;
        }
    }

    #[test]
    fn ercg_constant_shift_is_autonomous() {
        let c = ctx128();
        let p = ercg("0.5", "0", "0", "0.9", &c);
        let c0 = p.coefficients(0, &c).unwrap();
        for n in [1i64, 2, 7, -3] {
            assert_eq!(p.coefficients(n, &c).unwrap(), c0);
        }
        // z_n = γ_n... = ω and γ = 0: A = 1 - k² sn⁴(ω), B = cn dn(ω), C = (cn²(ω) - 1) cn dn(ω)
        assert!(c0.a > 0);
    }

    #[test]
    fn ercg_vanishing_coefficient_is_reported() {
        let c = ctx128();
        let p = ercg("0", "0", "0", "0", &c);
        // k = 0, z = γ = 0: A = B = 1, C = 0, so the w̄ coefficient is w - w̲
        let x = c.parse_float("0.5").unwrap();
        let err = step_ercg(&x, &x, 0, &p, &c).unwrap_err();
        assert!(matches!(err, StepError::Indeterminate { n: 0, .. }));
    }

    fn rat() -> impl Strategy<Value = Scalar> {
        (-60i64..60, 1i64..40).prop_map(|(n, d)| s(n, d))
    }

    proptest! {
        #[test]
        fn autonomous_conservation(x in rat(), y in rat(), steps in 1usize..12) {
            prop_assume!(!x.is_zero() && !y.is_zero());
            let k0 = k_invariant(&x, &y).unwrap();
            let (mut a, mut b) = (y, x);
            for _ in 0..steps {
                let c = step_qp1_auto(&a, &b).unwrap();
                prop_assert_eq!(k_invariant(&c, &b).unwrap(), k0.clone());
                a = b;
                b = c;
            }
        }

        #[test]
        fn defect_identity(wp in rat(), w in rat(), z in rat()) {
            prop_assume!(!wp.is_zero() && !w.is_zero() && !z.is_zero());
            let inv_z = z.one_like().checked_div(&z).unwrap();
            prop_assume!(w != inv_z);
            let p = QP1Params::new(z.clone(), s(2, 1)).unwrap();
            let wn = step_qp1(&wp, &w, 0, &p).unwrap();
            prop_assume!(!wn.is_zero());
            let lhs = k_invariant(&wn, &w).unwrap().sub(&k_invariant(&w, &wp).unwrap());
            // derivation: K(a,b) = ab + 1/a + 1/b gives
            // K(w̄,w) - K(w,w̲) = (w̄ - w̲)(w - 1/(w̄ w̲)), then use w̄ w̲ = (z w - 1)/(z w²)
            let oracle_def = k_as_sum(&wn, &w).sub(&k_as_sum(&w, &wp));
            let prod = wn.mul(&wp);
            let factored = wn.sub(&wp).mul(&w.sub(&prod.one_like().checked_div(&prod).unwrap()));
            prop_assert_eq!(&lhs, &oracle_def);
            prop_assert_eq!(&lhs, &factored);
            prop_assert_eq!(lhs, k_defect(&wp, &w, &wn, Some(&z)).unwrap());
        }
    }
}
