use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::{ArithError, Field, UPoly};

/// Sparse bivariate polynomial over Q keyed by `(deg_x, deg_y)`.
///
/// Zero coefficients are never stored, so the degree queries always scan the
/// live keys.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        BivarPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, Rational::from(1))
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, Rational::from(1))
    }

    pub fn monomial(dx: u32, dy: u32, c: Rational) -> Self {
        let mut p = BivarPoly::zero();
        p.add_term(dx, dy, c);
        p
    }

    /// Builds from `(dx, dy, coefficient)` triples; repeated keys accumulate.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32, Rational)>>(it: I) -> Self {
        let mut p = BivarPoly::zero();
        for (dx, dy, c) in it {
            p.add_term(dx, dy, c);
        }
        p
    }

    pub fn from_i64_terms(terms: &[(u32, u32, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(a, b, c)| (a, b, Rational::from(c))))
    }

    fn add_term(&mut self, dx: u32, dy: u32, c: Rational) {
        if c == 0 {
            return;
        }
        let slot = self.terms.entry((dx, dy)).or_default();
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&(dx, dy));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &Rational)> {
        self.terms.iter().map(|(&(a, b), c)| (a, b, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, dx: u32, dy: u32) -> Rational {
        self.terms.get(&(dx, dy)).cloned().unwrap_or_default()
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0 + k.1).max()
    }

    /// Lowest total degree present (multiplicity of the origin on the curve).
    pub fn order_at_origin(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0 + k.1).min()
    }

    /// Largest `e` with `x^e` dividing the polynomial.
    pub fn x_adic_order(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn y_adic_order(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).min()
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from(-1))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if *s == 0 {
            return BivarPoly::zero();
        }
        BivarPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, Rational::from(c * s))).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = BivarPoly::zero();
        for (&(a, b), c) in &self.terms {
            for (&(d, e), f) in &other.terms {
                out.add_term(a + d, b + e, Rational::from(c * f));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = BivarPoly::constant(Rational::from(1));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Divides by `x^dx y^dy`; fails naming the first term that is not divisible.
    pub fn exact_div_monomial(&self, dx: u32, dy: u32) -> Result<Self, ArithError> {
        let mut out = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            if a < dx || b < dy {
                return Err(ArithError::NotDivisible {
                    term: BivarPoly::monomial(a, b, c.clone()).to_string(),
                    dx,
                    dy,
                });
            }
            out.insert((a - dx, b - dy), c.clone());
        }
        Ok(BivarPoly { terms: out })
    }

    /// Evaluation in any field; exact for rational inputs.
    pub fn eval_in<F: Field>(&self, x: &F, y: &F) -> F {
        let mut acc = x.zero_like();
        let xmax = self.degree_x().unwrap_or(0) as usize;
        let ymax = self.degree_y().unwrap_or(0) as usize;
        let xp = powers(x, xmax);
        let yp = powers(y, ymax);
        for (&(a, b), c) in &self.terms {
            let term = xp[a as usize].mul(&yp[b as usize]).mul(&x.from_rational_like(c));
            acc = acc.add(&term);
        }
        acc
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        self.eval_in(x, y)
    }

    /// `p(px(x, y), py(x, y))`.
    pub fn compose(&self, px: &BivarPoly, py: &BivarPoly) -> BivarPoly {
        let xmax = self.degree_x().unwrap_or(0) as usize;
        let ymax = self.degree_y().unwrap_or(0) as usize;
        let one = BivarPoly::constant(Rational::from(1));
        let mut xp = vec![one.clone()];
        for i in 0..xmax {
            xp.push(xp[i].mul(px));
        }
        let mut yp = vec![one];
        for i in 0..ymax {
            yp.push(yp[i].mul(py));
        }
        let mut out = BivarPoly::zero();
        for (&(a, b), c) in &self.terms {
            out = out.add(&xp[a as usize].mul(&yp[b as usize]).scale(c));
        }
        out
    }

    /// `p(x + cx, y + cy)`: moves the point `(cx, cy)` to the origin.
    pub fn translate(&self, cx: &Rational, cy: &Rational) -> BivarPoly {
        let px = BivarPoly::x().add(&BivarPoly::constant(cx.clone()));
        let py = BivarPoly::y().add(&BivarPoly::constant(cy.clone()));
        self.compose(&px, &py)
    }

    pub fn swap_xy(&self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(&(a, b), c)| ((b, a), c.clone())).collect(),
        }
    }

    /// `p(x, 0)` as a polynomial in x.
    pub fn restrict_y0(&self) -> UPoly {
        self.restrict_y(&Rational::new())
    }

    /// `p(0, y)` as a polynomial in y.
    pub fn restrict_x0(&self) -> UPoly {
        self.swap_xy().restrict_y0()
    }

    /// `p(x, y0)` as a polynomial in x.
    pub fn restrict_y(&self, y0: &Rational) -> UPoly {
        let n = self.degree_x().map_or(0, |d| d as usize + 1);
        let mut out = vec![Rational::new(); n];
        for (&(a, b), c) in &self.terms {
            out[a as usize] += Rational::from(c * Rational::from(y0.pow(b as i32)));
        }
        UPoly::new(out)
    }

    /// `p(x0, y)` as a polynomial in y.
    pub fn restrict_x(&self, x0: &Rational) -> UPoly {
        self.swap_xy().restrict_y(x0)
    }

    /// Coefficients of `y^j` as polynomials in x, `j = 0..=deg_y`.
    pub fn coeffs_in_y(&self) -> Vec<UPoly> {
        let dy = self.degree_y().map_or(0, |d| d as usize + 1);
        let dx = self.degree_x().map_or(0, |d| d as usize + 1);
        let mut rows = vec![vec![Rational::new(); dx]; dy];
        for (&(a, b), c) in &self.terms {
            rows[b as usize][a as usize] = c.clone();
        }
        rows.into_iter().map(UPoly::new).collect()
    }

    /// Integer coefficients with unit content; leading key has positive sign.
    pub fn primitive(&self) -> BivarPoly {
        if self.is_zero() {
            return BivarPoly::zero();
        }
        let mut den = Integer::from(1);
        for c in self.terms.values() {
            den.lcm_mut(c.denom());
        }
        let mut g = Integer::new();
        for c in self.terms.values() {
            g.gcd_mut(&Integer::from(c.numer() * Integer::from(&den / c.denom())));
        }
        let (_, lead) = self.terms.iter().next_back().unwrap();
        let mut s = Rational::from((den, g));
        if lead.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }
}

fn powers<F: Field>(x: &F, n: usize) -> Vec<F> {
    let mut v = vec![x.one_like()];
    for i in 0..n {
        v.push(v[i].mul(x));
    }
    v
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        let ordered = self
            .terms
            .iter()
            .rev()
            .map(|(k, c)| (k.0 + k.1, *k, c))
            .collect::<Vec<_>>();
        let mut ordered = ordered;
        ordered.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));
        for (_, (a, b), c) in ordered {
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let mag = Rational::from(c.abs_ref());
            let mut factors = Vec::new();
            if mag != 1 || (a == 0 && b == 0) {
                factors.push(super::rational_to_string(&mag));
            }
            for (v, e) in [("x", a), ("y", b)] {
                match e {
                    0 => {}
                    1 => factors.push(v.to_string()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}
