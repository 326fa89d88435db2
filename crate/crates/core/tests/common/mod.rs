//! Shared oracles for integration tests.
#![allow(dead_code)]

use rug::Float;

/// Second-order jet `c₀ + c₁ε + c₂ε²` of a function of `t`.
#[derive(Clone, Debug)]
pub struct Jet(pub [Float; 3]);

impl Jet {
    pub fn constant(v: &Float) -> Jet {
        let z = Float::with_val(v.prec(), 0);
        Jet([v.clone(), z.clone(), z])
    }

    /// From value and first two derivatives.
    pub fn from_derivatives(v: &Float, d1: &Float, d2: &Float) -> Jet {
        Jet([v.clone(), d1.clone(), Float::with_val(v.prec(), d2 / 2u32)])
    }

    pub fn value(&self) -> &Float {
        &self.0[0]
    }

    pub fn d1(&self) -> Float {
        self.0[1].clone()
    }

    pub fn d2(&self) -> Float {
        Float::with_val(self.0[2].prec(), &self.0[2] * 2u32)
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(std::array::from_fn(|i| Float::with_val(self.0[i].prec(), &self.0[i] + &o.0[i])))
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet(std::array::from_fn(|i| Float::with_val(self.0[i].prec(), &self.0[i] - &o.0[i])))
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet(std::array::from_fn(|i| Float::with_val(self.0[i].prec(), &self.0[i] * k)))
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let p = self.0[0].prec();
        let m = |i: usize, j: usize| Float::with_val(p, &self.0[i] * &o.0[j]);
        Jet([m(0, 0), m(0, 1) + m(1, 0), m(0, 2) + m(1, 1) + m(2, 0)])
    }

    pub fn recip(&self) -> Jet {
        let p = self.0[0].prec();
        let [a0, a1, a2] = &self.0;
        let b0 = Float::with_val(p, a0.recip_ref());
        let b1 = -Float::with_val(p, a1 * Float::with_val(p, b0.square_ref()));
        let b2 = (Float::with_val(p, a1.square_ref()) - Float::with_val(p, a0 * a2)) * Float::with_val(p, b0.clone().pow(3u32));
        Jet([b0, b1, b2])
    }

    pub fn div(&self, o: &Jet) -> Jet {
        self.mul(&o.recip())
    }
}

use rug::ops::Pow;

/// Right side of the fourth equation (with the `-β²/(2w)` term) on jets.
pub fn p4_rhs(t: &Jet, w: &Jet, wp: &Jet, alpha: &Float, beta: &Float) -> Jet {
    let p = alpha.prec();
    let w2 = w.mul(w);
    let a = wp.mul(wp).div(&w.scale(2.0));
    let b = w2.mul(w).scale(1.5);
    let c = t.mul(&w2).scale(4.0);
    let d = t.mul(t).sub(&Jet::constant(alpha)).mul(w).scale(2.0);
    let b2 = Float::with_val(p, beta.square_ref());
    let e = Jet::constant(&b2).div(&w.scale(2.0));
    a.add(&b).add(&c).add(&d).sub(&e)
}

/// Jets of `w` and `w'` at a point of a fourth-equation solution, with
/// `w''` and `w'''` taken from the equation itself.
pub fn p4_jets(t: &Float, w: &Float, wp: &Float, alpha: &Float, beta: &Float) -> (Jet, Jet) {
    let p = t.prec();
    let z = Float::with_val(p, 0);
    let one = Float::with_val(p, 1);
    let wpp = p4_rhs(&Jet::constant(t), &Jet::constant(w), &Jet::constant(wp), alpha, beta).value().clone();
    // first-order propagation gives w''' as the ε-coefficient
    let tj1 = Jet([t.clone(), one.clone(), z.clone()]);
    let wj1 = Jet([w.clone(), wp.clone(), z.clone()]);
    let wpj1 = Jet([wp.clone(), wpp.clone(), z.clone()]);
    let wppp = p4_rhs(&tj1, &wj1, &wpj1, alpha, beta).d1();
    (Jet::from_derivatives(w, wp, &wpp), Jet::from_derivatives(wp, &wpp, &wppp))
}

/// The up transform `(-w' - w² - 2tw + β)/(2w)` on jets.
pub fn up_jet(t: &Jet, w: &Jet, wp: &Jet, beta: &Float) -> Jet {
    let num = Jet::constant(beta).sub(wp).sub(&w.mul(w)).sub(&t.mul(w).scale(2.0));
    num.div(&w.scale(2.0))
}
