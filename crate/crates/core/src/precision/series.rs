use rug::Rational;

/// Exponent used as the absolute precision of an exact zero.
const EXACT: i64 = 1 << 40;

/// Truncated Laurent series in a formal perturbation ε over Q.
///
/// The value is `ε^val · Σ coeffs[i] ε^i`. `coeffs[0]` is nonzero unless
/// `coeffs` is empty, in which case the series is zero to absolute order
/// `val` (exactly zero when `val` is the sentinel). `terms` bounds the
/// relative length kept by products and constants.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsSeries {
    val: i64,
    coeffs: Vec<Rational>,
    terms: usize,
}

impl EpsSeries {
    pub fn zero(terms: usize) -> Self {
        EpsSeries { val: EXACT, coeffs: Vec::new(), terms }
    }

    pub fn constant(r: &Rational, terms: usize) -> Self {
        if *r == 0 {
            return Self::zero(terms);
        }
        let mut coeffs = vec![Rational::new(); terms];
        coeffs[0] = r.clone();
        EpsSeries { val: 0, coeffs, terms }
    }

    /// `r + ε`.
    pub fn perturbed(r: &Rational, terms: usize) -> Self {
        let eps = EpsSeries { val: 1, coeffs: one_then_zeros(terms), terms };
        Self::constant(r, terms).add(&eps)
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// Valuation (order in ε); meaningful only for nonzero series.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.first()
    }

    /// Coefficient of `ε^k`, if known.
    pub fn coeff(&self, k: i64) -> Option<Rational> {
        if k >= self.abs_prec() {
            return None;
        }
        if k < self.val {
            return Some(Rational::new());
        }
        Some(self.coeffs[(k - self.val) as usize].clone())
    }

    /// Exponent below which all coefficients are known.
    pub fn abs_prec(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Value at ε → 0: `Some(c)` for a finite limit, `None` for a pole.
    pub fn limit(&self) -> Option<Rational> {
        if self.coeffs.is_empty() || self.val > 0 {
            Some(Rational::new())
        } else if self.val == 0 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn normalized(mut val: i64, mut coeffs: Vec<Rational>, terms: usize, abs: i64) -> Self {
        let lead = coeffs.iter().position(|c| *c != 0);
        match lead {
            None => EpsSeries { val: abs.min(EXACT), coeffs: Vec::new(), terms },
            Some(i) => {
                coeffs.drain(..i);
                val += i as i64;
                coeffs.truncate(terms);
                EpsSeries { val, coeffs, terms }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let terms = self.terms.max(other.terms);
        let abs = self.abs_prec().min(other.abs_prec());
        if self.is_exact_zero() && other.is_exact_zero() {
            return EpsSeries { val: abs, coeffs: Vec::new(), terms };
        }
        let lo = self.val.min(other.val);
        if lo >= abs {
            return EpsSeries { val: abs, coeffs: Vec::new(), terms };
        }
        let mut coeffs = vec![Rational::new(); (abs - lo) as usize];
        for s in [self, other] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let k = s.val + i as i64;
                if k < abs {
                    coeffs[(k - lo) as usize] += c;
                }
            }
        }
        Self::normalized(lo, coeffs, terms, abs)
    }

    pub fn neg(&self) -> Self {
        EpsSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
            terms: self.terms,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let terms = self.terms.max(other.terms);
        if self.is_exact_zero() || other.is_exact_zero() {
            let val = (self.val + other.val).min(EXACT);
            return EpsSeries { val, coeffs: Vec::new(), terms };
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![Rational::new(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                coeffs[i + j] += Rational::from(a * b);
            }
        }
        EpsSeries { val: self.val + other.val, coeffs, terms }
    }

    /// Reciprocal; `None` when no nonzero coefficient is known.
    pub fn inv(&self) -> Option<Self> {
        let a0 = self.coeffs.first()?;
        let n = self.coeffs.len();
        let inv0 = Rational::from(a0.recip_ref());
        let mut b: Vec<Rational> = Vec::with_capacity(n);
        b.push(inv0.clone());
        for k in 1..n {
            let mut s = Rational::new();
            for j in 1..=k {
                s += Rational::from(&self.coeffs[j] * &b[k - j]);
            }
            b.push(Rational::from(-(s * &inv0)));
        }
        Some(EpsSeries { val: -self.val, coeffs: b, terms: self.terms })
    }
}

fn one_then_zeros(terms: usize) -> Vec<Rational> {
    let mut v = vec![Rational::new(); terms.max(1)];
    v[0] = Rational::from(1);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn geometric_inverse() {
        // 1/(1-ε) = 1 + ε + ε² + ...
        let one = EpsSeries::constant(&r(1, 1), 6);
        let x = one.add(&EpsSeries::perturbed(&r(0, 1), 6).neg());
        let inv = x.inv().unwrap();
        for k in 0..6 {
            assert_eq!(inv.coeff(k), Some(r(1, 1)));
        }
    }

    #[test]
    fn cancellation_raises_valuation() {
        let a = EpsSeries::perturbed(&r(1, 2), 8);
        let b = EpsSeries::constant(&r(1, 2), 8);
        let d = a.add(&b.neg());
        assert_eq!(d.valuation(), 1);
        assert_eq!(d.leading(), Some(&r(1, 1)));
        let p = d.inv().unwrap();
        assert_eq!(p.valuation(), -1);
        assert_eq!(p.limit(), None);
        assert_eq!(d.limit(), Some(r(0, 1)));
    }

    #[test]
    fn full_cancellation_loses_invertibility() {
        let a = EpsSeries::perturbed(&r(3, 1), 4);
        let z = a.add(&a.neg());
        assert!(z.is_exact_zero());
        assert!(z.inv().is_none());
    }

    #[test]
    fn product_and_inverse_roundtrip() {
        let a = EpsSeries::perturbed(&r(2, 3), 10);
        let b = a.mul(&a).add(&EpsSeries::constant(&r(-5, 1), 10));
        let back = b.mul(&b.inv().unwrap());
        assert_eq!(back.coeff(0), Some(r(1, 1)));
        for k in 1..10 {
            assert_eq!(back.coeff(k), Some(r(0, 1)));
        }
    }
}
