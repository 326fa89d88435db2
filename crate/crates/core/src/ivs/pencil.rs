use rug::Rational;
use serde::Serialize;

use super::IvsError;
use crate::precision::{rational_to_string, BivarPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Ambient {
    /// P¹×P¹ with charts `(x, y)`, `(1/x, y)`, `(x, 1/y)`, `(1/x, 1/y)`.
    P1xP1,
    /// P² with charts `w = 1`, `v = 1`, `u = 1`.
    P2,
}

/// Part of a chart not already covered by an earlier chart of the atlas.
/// Base points are searched only there, so each is reported once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    All,
    FirstZero,
    SecondZero,
    Origin,
}

/// How a blow-up chart sits over its parent: branch 1 has
/// `(x, y) = (cx + x₁y₁, cy + y₁)`, branch 2 has `(x, y) = (cx + x₂, cy + x₂y₂)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartParent {
    pub chart: usize,
    pub blowup: usize,
    pub branch: u8,
    #[serde(serialize_with = "ser_point")]
    pub center: (Rational, Rational),
    /// Power of the exceptional coordinate divided out of the pencil.
    pub factor_exponent: u32,
    /// Record index of the exceptional line of this blow-up.
    pub exceptional: usize,
}

fn ser_point<S: serde::Serializer>(p: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
    [rational_to_string(&p.0), rational_to_string(&p.1)].serialize(s)
}

/// One affine chart with the pencil and the tracked curves in its coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub name: String,
    pub parent: Option<ChartParent>,
    pub a: BivarPoly,
    pub b: BivarPoly,
    pub region: Region,
    /// Centers already blown up in this chart.
    pub excluded: Vec<(Rational, Rational)>,
    /// Local equations of tracked curves visible in this chart, keyed by curve index.
    pub curves: Vec<(usize, BivarPoly)>,
}

/// The pencil `A - κB` on an atlas of affine charts.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    pub ambient: Ambient,
    pub charts: Vec<Chart>,
    /// Self-intersection of a member before any blow-up.
    pub member_square: i64,
    pub(crate) line_names: Vec<String>,
    pub(crate) line_matrix: Vec<Vec<i64>>,
}

fn root_chart(name: &str, a: BivarPoly, b: BivarPoly, region: Region, curves: Vec<(usize, BivarPoly)>) -> Chart {
    Chart { name: name.into(), parent: None, a, b, region, excluded: Vec::new(), curves }
}

fn remap(p: &BivarPoly, f: impl Fn(u32, u32) -> (u32, u32)) -> BivarPoly {
    BivarPoly::from_terms(p.terms().map(|(i, j, c)| {
        let (a, b) = f(i, j);
        (a, b, c.clone())
    }))
}

impl Pencil {
    /// Pencil on P¹×P¹ from its affine chart; bidegree is read off `a` and `b`.
    pub fn p1xp1(a: BivarPoly, b: BivarPoly) -> Result<Self, IvsError> {
        if a.is_zero() || b.is_zero() {
            return Err(IvsError::Parameter("pencil members must be nonzero".into()));
        }
        let (a, b) = (a.primitive(), b.primitive());
        let dx = a.degree_x().unwrap().max(b.degree_x().unwrap());
        let dy = a.degree_y().unwrap().max(b.degree_y().unwrap());
        let inv_x = |p: &BivarPoly| remap(p, |i, j| (dx - i, j));
        let inv_y = |p: &BivarPoly| remap(p, |i, j| (i, dy - j));
        let inv_xy = |p: &BivarPoly| remap(p, |i, j| (dx - i, dy - j));
        let (x, y) = (BivarPoly::x(), BivarPoly::y());
        // lines: 0 x=0, 1 x=inf, 2 y=0, 3 y=inf
        let charts = vec![
            root_chart("affine", a.clone(), b.clone(), Region::All, vec![(0, x.clone()), (2, y.clone())]),
            root_chart("inv_x", inv_x(&a), inv_x(&b), Region::FirstZero, vec![(1, x.clone()), (2, y.clone())]),
            root_chart("inv_y", inv_y(&a), inv_y(&b), Region::SecondZero, vec![(0, x.clone()), (3, y.clone())]),
            root_chart("inv_xy", inv_xy(&a), inv_xy(&b), Region::Origin, vec![(1, x), (3, y)]),
        ];
        let m = |i: usize, j: usize| i64::from((i < 2) != (j < 2));
        Ok(Pencil {
            ambient: Ambient::P1xP1,
            charts,
            member_square: 2 * i64::from(dx) * i64::from(dy),
            line_names: ["x=0", "x=inf", "y=0", "y=inf"].map(String::from).to_vec(),
            line_matrix: (0..4).map(|i| (0..4).map(|j| m(i, j)).collect()).collect(),
        })
    }

    /// Pencil of plane curves of degree `degree` given on the chart `w = 1`
    /// with coordinates `(u, v)`.
    pub fn p2(a: BivarPoly, b: BivarPoly, degree: u32) -> Result<Self, IvsError> {
        if a.is_zero() || b.is_zero() {
            return Err(IvsError::Parameter("pencil members must be nonzero".into()));
        }
        if a.total_degree().unwrap().max(b.total_degree().unwrap()) > degree {
            return Err(IvsError::Parameter(format!("members exceed degree {degree}")));
        }
        let (a, b) = (a.primitive(), b.primitive());
        let d = degree;
        // homogenize u^i v^j -> u^i v^j w^(d-i-j), then set v = 1 or u = 1
        let at_v1 = |p: &BivarPoly| remap(p, |i, j| (i, d - i - j));
        let at_u1 = |p: &BivarPoly| remap(p, |i, j| (j, d - i - j));
        let w = BivarPoly::y();
        let charts = vec![
            root_chart("w=1", a.clone(), b.clone(), Region::All, vec![]),
            root_chart("v=1", at_v1(&a), at_v1(&b), Region::SecondZero, vec![(0, w.clone())]),
            root_chart("u=1", at_u1(&a), at_u1(&b), Region::Origin, vec![(0, w)]),
        ];
        Ok(Pencil {
            ambient: Ambient::P2,
            charts,
            member_square: i64::from(d * d),
            line_names: vec!["w=0".into()],
            line_matrix: vec![vec![1]],
        })
    }

    /// `A = x²y² + x + y`, `B = xy`: the invariant pencil of the autonomous q-map.
    pub fn biquadratic() -> Self {
        let a = BivarPoly::from_i64_terms(&[(2, 2, 1), (1, 0, 1), (0, 1, 1)]);
        let b = BivarPoly::from_i64_terms(&[(1, 1, 1)]);
        Pencil::p1xp1(a, b).expect("valid pencil")
    }

    /// Weierstrass cubics `w v² - 4u³ - g₂ u w² - g₃ w³` with `g₃` as pencil
    /// parameter: `A = w v² - 4u³ - g₂ u w²`, `B = w³`.
    pub fn weierstrass(g2: &Rational) -> Self {
        let mut a = BivarPoly::from_i64_terms(&[(0, 2, 1), (3, 0, -4)]);
        a = a.sub(&BivarPoly::monomial(1, 0, g2.clone()));
        let b = BivarPoly::constant(Rational::from(1));
        Pencil::p2(a, b, 3).expect("valid pencil")
    }

    /// `A - κB` in chart `chart`.
    pub fn member(&self, chart: usize, kappa: &Rational) -> BivarPoly {
        let c = &self.charts[chart];
        c.a.sub(&c.b.scale(kappa))
    }

    /// Maps chart coordinates to the coordinates of the parent chart.
    pub fn to_parent(&self, chart: usize, pt: &(Rational, Rational)) -> Option<(usize, (Rational, Rational))> {
        let p = self.charts[chart].parent.as_ref()?;
        let (cx, cy) = &p.center;
        let q = match p.branch {
            1 => (Rational::from(cx + Rational::from(&pt.0 * &pt.1)), Rational::from(cy + &pt.1)),
            _ => (Rational::from(cx + &pt.0), Rational::from(cy + Rational::from(&pt.0 * &pt.1))),
        };
        Some((p.chart, q))
    }
}
