use std::fmt;

use rug::{Integer, Rational};

/// Dense univariate polynomial over Q, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        UPoly::new(vec![c])
    }

    /// `x - r`.
    pub fn linear_root(r: &Rational) -> Self {
        UPoly::new(vec![Rational::from(-r), Rational::from(1)])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        UPoly::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rational::new(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        UPoly::new(out)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        UPoly::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        UPoly::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dl = d.leading().expect("division by the zero polynomial");
        let dd = d.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quo = vec![Rational::new(); rem.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = Rational::from(&rem[k + dd] / dl);
            if c != 0 {
                for (j, b) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= Rational::from(&c * b);
                }
            }
            quo[k] = c;
        }
        rem.truncate(dd);
        (UPoly::new(quo), UPoly::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => UPoly::zero(),
            Some(l) => self.scale(&Rational::from(l.recip_ref())),
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * i as u32))
                .collect(),
        )
    }

    /// Integer coefficients with unit content and positive leading term.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut den = Integer::from(1);
        for c in &self.coeffs {
            den.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&den / c.denom())))
            .collect();
        let mut g = Integer::new();
        for i in &ints {
            g.gcd_mut(i);
        }
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        UPoly::new(ints.into_iter().map(|i| Rational::from((i, g.clone()))).collect())
    }

    pub fn squarefree(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    fn sturm_sequence(&self) -> Vec<UPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].divrem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&Rational::from(-1)));
        }
        seq
    }

    fn sign_changes(seq: &[UPoly], x: &Rational) -> usize {
        let signs: Vec<i32> = seq
            .iter()
            .map(|p| p.eval(x).cmp0() as i32)
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// All rational roots with multiplicity, in increasing order.
    ///
    /// Real roots of the square-free part are isolated with a Sturm sequence
    /// and refined until the only candidate `s/a_n` (with `a_n` the leading
    /// integer coefficient) can be read off and checked exactly.
    pub fn rational_roots(&self) -> Vec<(Rational, usize)> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let sf = self.squarefree().primitive();
        let an = Integer::from(sf.leading().unwrap().numer());
        let bound = {
            let l = sf.leading().unwrap();
            let m = sf.coeffs.iter().map(|c| Rational::from(c / l).abs()).max().unwrap();
            Rational::from(m + 1u32)
        };
        let seq = sf.sturm_sequence();
        let lo = Rational::from(-&bound);
        let mut found = Vec::new();
        let mut stack = vec![(lo, bound.clone())];
        let target_width = Rational::from((Integer::from(1), Integer::from(&an * 4u32)));
        while let Some((a, b)) = stack.pop() {
            let count = Self::sign_changes(&seq, &a) as i64 - Self::sign_changes(&seq, &b) as i64;
            if count <= 0 {
                continue;
            }
            if count == 1 {
                if let Some(r) = refine_single(&sf, &seq, a, b, &an, &target_width) {
                    found.push(r);
                }
                continue;
            }
            let mid = Rational::from(&a + &b) / 2u32;
            stack.push((a, mid.clone()));
            stack.push((mid, b));
        }
        found.sort();
        found
            .into_iter()
            .map(|r| {
                let mut m = 0;
                let mut p = self.clone();
                let lin = UPoly::linear_root(&r);
                loop {
                    let (qt, rem) = p.divrem(&lin);
                    if !rem.is_zero() {
                        break;
                    }
                    m += 1;
                    p = qt;
                }
                (r, m)
            })
            .collect()
    }
}

fn refine_single(
    sf: &UPoly,
    seq: &[UPoly],
    mut a: Rational,
    mut b: Rational,
    an: &Integer,
    width: &Rational,
) -> Option<Rational> {
    if sf.eval(&b) == 0 {
        return Some(b);
    }
    while Rational::from(&b - &a) >= *width {
        let mid = Rational::from(&a + &b) / 2u32;
        if sf.eval(&mid) == 0 {
            return Some(mid);
        }
        let left = UPoly::sign_changes(seq, &a) as i64 - UPoly::sign_changes(seq, &mid) as i64;
        if left == 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    let mid = Rational::from(&a + &b) / 2u32;
    let s = Rational::from(&mid * an).round();
    let cand = Rational::from((s.numer().clone(), an.clone()));
    (cand > a && cand <= b && sf.eval(&cand) == 0).then_some(cand)
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let a = Rational::from(c.abs_ref());
            let unit = a == 1;
            match (i, unit) {
                (0, _) => write!(f, "{}", super::rational_to_string(&a))?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{}*x", super::rational_to_string(&a))?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{}*x^{i}", super::rational_to_string(&a))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn from_roots(roots: &[Rational]) -> UPoly {
        roots
            .iter()
            .fold(UPoly::constant(r(1, 1)), |p, x| p.mul(&UPoly::linear_root(x)))
    }

    #[test]
    fn divrem_reconstructs() {
        let a = UPoly::from_i64(&[1, -3, 0, 2, 5]);
        let d = UPoly::from_i64(&[2, 0, 3]);
        let (q, rem) = a.divrem(&d);
        assert_eq!(q.mul(&d).add(&rem), a);
        assert!(rem.degree().unwrap() < 2);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let common = UPoly::linear_root(&r(2, 3));
        let a = common.mul(&UPoly::from_i64(&[1, 1]));
        let b = common.mul(&UPoly::from_i64(&[-5, 0, 1]));
        assert_eq!(a.gcd(&b), common);
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        let p = from_roots(&[r(1, 2), r(1, 2), r(-3, 1), r(0, 1), r(7, 5)])
            .mul(&UPoly::from_i64(&[-2, 0, 1]));
        let roots = p.rational_roots();
        assert_eq!(
            roots,
            vec![(r(-3, 1), 1), (r(0, 1), 1), (r(1, 2), 2), (r(7, 5), 1)]
        );
    }

    #[test]
    fn irreducible_quadratic_has_none() {
        assert!(UPoly::from_i64(&[1, 0, 1]).rational_roots().is_empty());
        assert!(UPoly::from_i64(&[-2, 0, 1]).rational_roots().is_empty());
    }

    #[test]
    fn close_rational_roots_are_separated() {
        let p = from_roots(&[r(100, 101), r(101, 102), r(-1, 1000)]);
        let got: Vec<_> = p.rational_roots().into_iter().map(|(x, _)| x).collect();
        assert_eq!(got, vec![r(-1, 1000), r(100, 101), r(101, 102)]);
    }
}
