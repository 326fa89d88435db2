use rug::Rational;
use serde::Serialize;

use super::pencil::{Pencil, Region};
use super::IvsError;
use crate::precision::{rational_to_string, BivarPoly, UPoly};

/// A common zero of the pencil in the chart where it is first visible.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasePoint {
    pub chart: usize,
    #[serde(serialize_with = "ser_point")]
    pub coords: (Rational, Rational),
    /// Smallest order of vanishing of `A`, `B` at the point.
    pub multiplicity: u32,
    /// Exceptional line carrying the point, for infinitely near points.
    pub parent: Option<usize>,
}

fn ser_point<S: serde::Serializer>(p: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
    [rational_to_string(&p.0), rational_to_string(&p.1)].serialize(s)
}

/// Common zeros with irrational coordinates, known only through the degree
/// of the squarefree factor whose roots carry them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnsupportedLocus {
    pub chart: usize,
    pub description: String,
    pub degree: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BaseLocus {
    pub points: Vec<BasePoint>,
    pub unsupported: Vec<UnsupportedLocus>,
}

impl BaseLocus {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.unsupported.is_empty()
    }
}

fn det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut d = Rational::from(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| m[r][c] != 0) else {
            return Rational::new();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let piv = m[c][c].clone();
        d *= &piv;
        for r in c + 1..n {
            if m[r][c] == 0 {
                continue;
            }
            let f = Rational::from(&m[r][c] / &piv);
            for k in c..n {
                let t = Rational::from(&f * &m[c][k]);
                m[r][k] -= t;
            }
        }
    }
    d
}

/// Sylvester determinant of `a`, `b` with formal degrees `m`, `n`.
fn sylvester(a: &UPoly, b: &UPoly, m: usize, n: usize) -> Rational {
    let size = m + n;
    if size == 0 {
        return Rational::from(1);
    }
    let coeff = |p: &UPoly, k: usize| p.coeffs().get(k).cloned().unwrap_or_default();
    let mut rows = Vec::with_capacity(size);
    for s in 0..n {
        let mut row = vec![Rational::new(); size];
        for k in 0..=m {
            row[s + k] = coeff(a, m - k);
        }
        rows.push(row);
    }
    for s in 0..m {
        let mut row = vec![Rational::new(); size];
        for k in 0..=n {
            row[s + k] = coeff(b, n - k);
        }
        rows.push(row);
    }
    det(rows)
}

/// Polynomial through `(k, values[k])`, `k = 0, 1, …`, by divided differences.
fn interpolate(values: &[Rational]) -> UPoly {
    let mut dd = values.to_vec();
    let n = dd.len();
    for level in 1..n {
        for k in (level..n).rev() {
            let diff = Rational::from(&dd[k] - &dd[k - 1]);
            dd[k] = diff / Rational::from(level as u64);
        }
    }
    let mut out = UPoly::zero();
    let mut basis = UPoly::constant(Rational::from(1));
    for (k, c) in dd.iter().enumerate() {
        out = out.add(&basis.scale(c));
        basis = basis.mul(&UPoly::linear_root(&Rational::from(k as u64)));
    }
    out
}

/// Resultant with respect to `y`, as a polynomial in `x`.
pub(crate) fn resultant_y(a: &BivarPoly, b: &BivarPoly) -> UPoly {
    let m = a.degree_y().unwrap_or(0) as usize;
    let n = b.degree_y().unwrap_or(0) as usize;
    let bound = a.degree_x().unwrap_or(0) as usize * n + b.degree_x().unwrap_or(0) as usize * m;
    let values: Vec<Rational> = (0..=bound)
        .map(|k| {
            let x = Rational::from(k as u64);
            sylvester(&a.restrict_x(&x), &b.restrict_x(&x), m, n)
        })
        .collect();
    interpolate(&values)
}

/// Rational roots of `gcd(a, b)` and the degree of its remaining squarefree part.
fn common_roots(a: &UPoly, b: &UPoly) -> Option<(Vec<Rational>, usize)> {
    let g = match (a.is_zero(), b.is_zero()) {
        (true, true) => return None,
        (true, false) => b.monic(),
        (false, true) => a.monic(),
        (false, false) => a.gcd(b),
    };
    let roots: Vec<Rational> = g.rational_roots().into_iter().map(|(r, _)| r).collect();
    let sf = g.squarefree().degree().unwrap_or(0);
    Some((roots.clone(), sf - roots.len()))
}

fn all_common_zeros(a: &BivarPoly, b: &BivarPoly) -> Result<(Vec<(Rational, Rational)>, usize), ()> {
    let (my, ny) = (a.degree_y().unwrap_or(0), b.degree_y().unwrap_or(0));
    if my == 0 && ny == 0 {
        let g = common_roots(&a.restrict_y0(), &b.restrict_y0()).ok_or(())?;
        return if g.0.is_empty() && g.1 == 0 { Ok((Vec::new(), 0)) } else { Err(()) };
    }
    let res = resultant_y(a, b);
    if res.is_zero() {
        return Err(());
    }
    let mut pts = Vec::new();
    let mut residual = res.squarefree();
    let mut irr = 0;
    for (r, _) in res.rational_roots() {
        residual = residual.divrem(&UPoly::linear_root(&r)).0;
        let (ys, extra) = common_roots(&a.restrict_x(&r), &b.restrict_x(&r)).ok_or(())?;
        irr += extra;
        pts.extend(ys.into_iter().map(|y| (r.clone(), y)));
    }
    // roots where both leading coefficients in y vanish may only meet at y = ∞
    let lc = |p: &BivarPoly, d: u32| p.coeffs_in_y().get(d as usize).cloned().unwrap_or_else(UPoly::zero);
    let at_infinity = residual.gcd(&lc(a, my).gcd(&lc(b, ny)));
    if at_infinity.degree().unwrap_or(0) > 0 {
        residual = residual.divrem(&at_infinity).0;
    }
    irr += residual.degree().unwrap_or(0);
    Ok((pts, irr))
}

/// Order at the point `c` of a polynomial, `u32::MAX` for the zero polynomial.
pub(crate) fn order_at(p: &BivarPoly, c: &(Rational, Rational)) -> u32 {
    p.translate(&c.0, &c.1).order_at_origin().unwrap_or(u32::MAX)
}

/// Base points inside the region of one chart.
pub(crate) fn chart_base_points(p: &Pencil, ci: usize, out: &mut BaseLocus) -> Result<(), IvsError> {
    let chart = &p.charts[ci];
    let common = || IvsError::CommonFactor { chart: chart.name.clone() };
    let (mut cands, irr, what): (Vec<(Rational, Rational)>, usize, &str) = match chart.region {
        Region::All => {
            let (pts, irr) = all_common_zeros(&chart.a, &chart.b).map_err(|_| common())?;
            (pts, irr, "affine eliminant factor")
        }
        Region::FirstZero => {
            let (ys, irr) = common_roots(&chart.a.restrict_x0(), &chart.b.restrict_x0()).ok_or_else(common)?;
            (ys.into_iter().map(|y| (Rational::new(), y)).collect(), irr, "factor on the line x = 0")
        }
        Region::SecondZero => {
            let (xs, irr) = common_roots(&chart.a.restrict_y0(), &chart.b.restrict_y0()).ok_or_else(common)?;
            (xs.into_iter().map(|x| (x, Rational::new())).collect(), irr, "factor on the line y = 0")
        }
        Region::Origin => {
            let o = (Rational::new(), Rational::new());
            let hit = chart.a.eval(&o.0, &o.1) == 0 && chart.b.eval(&o.0, &o.1) == 0;
            (if hit { vec![o] } else { vec![] }, 0, "")
        }
    };
    if irr > 0 {
        out.unsupported.push(UnsupportedLocus { chart: ci, description: format!("{} in chart {}", what, chart.name), degree: irr });
    }
    cands.sort();
    for c in cands {
        if chart.excluded.contains(&c) {
            continue;
        }
        let multiplicity = order_at(&chart.a, &c).min(order_at(&chart.b, &c));
        let parent = chart.parent.as_ref().map(|pp| pp.exceptional);
        out.points.push(BasePoint { chart: ci, coords: c, multiplicity, parent });
    }
    Ok(())
}

/// All base points of the pencil, each reported in the first chart whose
/// region contains it; centers already blown up are skipped.
pub fn base_points(p: &Pencil) -> Result<BaseLocus, IvsError> {
    let mut out = BaseLocus::default();
    for ci in 0..p.charts.len() {
        chart_base_points(p, ci, &mut out)?;
    }
    Ok(out)
}
