use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use serde::Serialize;

use super::base_points::{base_points, chart_base_points, order_at, BaseLocus, BasePoint, UnsupportedLocus};
use super::pencil::{Ambient, Chart, ChartParent, Pencil, Region};
use super::IvsError;
use crate::precision::{rational_to_string, BivarPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveKind {
    /// Strict transform of a coordinate line of the ambient surface.
    Line,
    /// Exceptional line of the blow-up with this index.
    Exceptional { blowup: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Curve {
    pub name: String,
    #[serde(flatten)]
    pub kind: CurveKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlowupRecord {
    pub index: usize,
    pub chart: usize,
    pub chart_name: String,
    pub center: [String; 2],
    pub multiplicity: u32,
    /// Exceptional line carrying the center, for infinitely near centers.
    pub parent: Option<usize>,
    /// Tracked curves through the center with their multiplicities there.
    pub curves_through: Vec<(usize, u32)>,
    /// Root chart, then each center and branch leading to this center; does
    /// not depend on the order in which siblings were processed.
    pub address: Vec<String>,
}

/// Blow-up history with self-intersections on the diagonal of a symmetric
/// intersection matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolutionRecord {
    pub ambient: Ambient,
    pub curves: Vec<Curve>,
    pub matrix: Vec<Vec<i64>>,
    pub blowups: Vec<BlowupRecord>,
    /// Self-intersection of a member before resolution.
    pub member_square: i64,
    pub resolved: bool,
    pub budget_exhausted: bool,
    pub unsupported: Vec<UnsupportedLocus>,
}

impl ResolutionRecord {
    pub fn new(p: &Pencil) -> Self {
        ResolutionRecord {
            ambient: p.ambient,
            curves: p.line_names.iter().map(|n| Curve { name: n.clone(), kind: CurveKind::Line }).collect(),
            matrix: p.line_matrix.clone(),
            blowups: Vec::new(),
            member_square: p.member_square,
            resolved: false,
            budget_exhausted: false,
            unsupported: Vec::new(),
        }
    }

    pub fn self_intersection(&self, curve: usize) -> i64 {
        self.matrix[curve][curve]
    }

    pub fn curves_with_square(&self, s: i64) -> Vec<usize> {
        (0..self.curves.len()).filter(|&i| self.matrix[i][i] == s).collect()
    }

    /// Self-intersection of the strict transform of a general member; zero
    /// exactly when no base points remain.
    pub fn member_strict_square(&self) -> i64 {
        self.member_square - self.blowups.iter().map(|b| i64::from(b.multiplicity).pow(2)).sum::<i64>()
    }

    /// Intersection matrix with exceptional lines ordered by center address,
    /// for comparing records that processed siblings in different orders.
    pub fn canonical_matrix(&self) -> Vec<Vec<i64>> {
        let lines: Vec<usize> = (0..self.curves.len())
            .filter(|&i| self.curves[i].kind == CurveKind::Line)
            .collect();
        let mut exc: Vec<(usize, &Vec<String>)> = self
            .curves
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c.kind {
                CurveKind::Exceptional { blowup } => Some((i, &self.blowups[blowup].address)),
                CurveKind::Line => None,
            })
            .collect();
        exc.sort_by(|a, b| a.1.cmp(b.1));
        let order: Vec<usize> = lines.into_iter().chain(exc.into_iter().map(|(i, _)| i)).collect();
        order.iter().map(|&i| order.iter().map(|&j| self.matrix[i][j]).collect()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.matrix.len();
        (0..n).all(|i| (0..n).all(|j| self.matrix[i][j] == self.matrix[j][i]))
    }
}

fn chart_address(p: &Pencil, ci: usize) -> Vec<String> {
    let chart = &p.charts[ci];
    match &chart.parent {
        None => vec![chart.name.clone()],
        Some(par) => {
            let mut a = chart_address(p, par.chart);
            a.push(format!("({},{})", rational_to_string(&par.center.0), rational_to_string(&par.center.1)));
            a.push(format!("branch {}", par.branch));
            a
        }
    }
}

fn transform(f: &BivarPoly, c: &(Rational, Rational), branch: u8) -> BivarPoly {
    let (x, y) = (BivarPoly::x(), BivarPoly::y());
    let xy = x.mul(&y);
    let t = f.translate(&c.0, &c.1);
    match branch {
        1 => t.compose(&xy, &y),
        _ => t.compose(&x, &xy),
    }
}

fn divide_exceptional(f: &BivarPoly, branch: u8, m: u32) -> Result<BivarPoly, IvsError> {
    let r = if branch == 1 { f.exact_div_monomial(0, m) } else { f.exact_div_monomial(m, 0) };
    r.map_err(|e| IvsError::Internal(e.to_string()))
}

/// Blows up `target`, returning the new atlas and the updated record.
pub fn blow_up(p: &Pencil, rec: &ResolutionRecord, target: &BasePoint) -> Result<(Pencil, ResolutionRecord), IvsError> {
    let chart = p.charts.get(target.chart).ok_or_else(|| IvsError::Parameter(format!("no chart {}", target.chart)))?;
    let c = &target.coords;
    let not_base = || IvsError::NotABasePoint {
        chart: chart.name.clone(),
        x: rational_to_string(&c.0),
        y: rational_to_string(&c.1),
    };
    if chart.excluded.contains(c) || chart.a.eval(&c.0, &c.1) != 0 || chart.b.eval(&c.0, &c.1) != 0 {
        return Err(not_base());
    }
    let m = order_at(&chart.a, c).min(order_at(&chart.b, c));
    let index = rec.blowups.len();
    let e = rec.curves.len();
    let through: Vec<(usize, u32)> = chart
        .curves
        .iter()
        .filter_map(|(i, f)| {
            let k = order_at(f, c);
            (k > 0).then_some((*i, k))
        })
        .collect();

    let mut children = Vec::with_capacity(2);
    for branch in [1u8, 2] {
        let a = divide_exceptional(&transform(&chart.a, c, branch), branch, m)?;
        let b = divide_exceptional(&transform(&chart.b, c, branch), branch, m)?;
        let mut curves = Vec::new();
        for (i, f) in &chart.curves {
            let k = order_at(f, c);
            let k = if k == u32::MAX { 0 } else { k };
            let g = divide_exceptional(&transform(f, c, branch), branch, k)?;
            // a nonzero constant means the strict transform misses this chart
            if g.total_degree().is_some_and(|d| d > 0) {
                curves.push((*i, g));
            }
        }
        curves.push((e, if branch == 1 { BivarPoly::y() } else { BivarPoly::x() }));
        children.push(Chart {
            name: format!("E{}.{}", index + 1, branch),
            parent: Some(ChartParent { chart: target.chart, blowup: index, branch, center: c.clone(), factor_exponent: m, exceptional: e }),
            a,
            b,
            region: if branch == 1 { Region::SecondZero } else { Region::Origin },
            excluded: Vec::new(),
            curves,
        });
    }

    let mut np = p.clone();
    np.charts[target.chart].excluded.push(c.clone());
    np.charts.extend(children);

    let mut nr = rec.clone();
    for row in nr.matrix.iter_mut() {
        row.push(0);
    }
    nr.matrix.push(vec![0; e + 1]);
    for &(i, mi) in &through {
        for &(j, mj) in &through {
            nr.matrix[i][j] -= i64::from(mi) * i64::from(mj);
        }
        nr.matrix[e][i] = i64::from(mi);
        nr.matrix[i][e] = i64::from(mi);
    }
    nr.matrix[e][e] = -1;
    nr.curves.push(Curve { name: format!("L{}", index + 1), kind: CurveKind::Exceptional { blowup: index } });
    nr.blowups.push(BlowupRecord {
        index,
        chart: target.chart,
        chart_name: chart.name.clone(),
        center: [rational_to_string(&c.0), rational_to_string(&c.1)],
        multiplicity: m,
        parent: chart.parent.as_ref().map(|pp| pp.exceptional),
        curves_through: through,
        address: {
            let mut a = chart_address(p, target.chart);
            a.push(format!("({},{})", rational_to_string(&c.0), rational_to_string(&c.1)));
            a
        },
    });
    Ok((np, nr))
}

#[derive(Clone, Debug)]
pub struct ResolveOptions {
    pub max_blowups: usize,
    /// Shuffles each group of sibling base points with this seed.
    pub sibling_seed: Option<u64>,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { max_blowups: 64, sibling_seed: None }
    }
}

/// Blows up base points until none remain, following each chain of
/// infinitely near points before its siblings.
pub fn resolve_with(p: &Pencil, opts: &ResolveOptions) -> Result<(Pencil, ResolutionRecord), IvsError> {
    if opts.max_blowups == 0 {
        return Err(IvsError::Parameter("max_blowups must be at least 1".into()));
    }
    let mut rng = opts.sibling_seed.map(ChaCha8Rng::seed_from_u64);
    let mut order = |mut pts: Vec<BasePoint>| {
        if let Some(r) = rng.as_mut() {
            pts.shuffle(r);
        }
        pts.reverse();
        pts
    };
    let mut pencil = p.clone();
    let mut rec = ResolutionRecord::new(p);
    let initial = base_points(&pencil)?;
    rec.unsupported = initial.unsupported;
    let mut stack = order(initial.points);
    while let Some(bp) = stack.pop() {
        if rec.blowups.len() == opts.max_blowups {
            rec.budget_exhausted = true;
            break;
        }
        let (np, nr) = blow_up(&pencil, &rec, &bp)?;
        pencil = np;
        rec = nr;
        let mut found = BaseLocus::default();
        let n = pencil.charts.len();
        for ci in n - 2..n {
            chart_base_points(&pencil, ci, &mut found)?;
        }
        rec.unsupported.extend(found.unsupported);
        stack.extend(order(found.points));
    }
    let remaining = base_points(&pencil)?;
    rec.resolved = !rec.budget_exhausted && remaining.is_empty() && rec.unsupported.is_empty();
    Ok((pencil, rec))
}

pub fn resolve(p: &Pencil, max_blowups: usize) -> Result<ResolutionRecord, IvsError> {
    resolve_with(p, &ResolveOptions { max_blowups, sibling_seed: None }).map(|(_, r)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::q;

    #[test]
    fn coordinate_pencil_one_blowup() {
        let p = Pencil::p2(BivarPoly::x(), BivarPoly::y(), 1).unwrap();
        let (fp, rec) = resolve_with(&p, &ResolveOptions::default()).unwrap();
        assert!(rec.resolved);
        assert_eq!(rec.blowups.len(), 1);
        assert!(base_points(&fp).unwrap().is_empty());
        // the line at infinity misses the center
        assert_eq!(rec.self_intersection(0), 1);
        assert_eq!(rec.self_intersection(1), -1);
        assert_eq!(rec.member_strict_square(), 0);
    }

    #[test]
    fn biquadratic_origin_has_infinitely_near_point() {
        let p = Pencil::biquadratic();
        let rec = ResolutionRecord::new(&p);
        let bl = base_points(&p).unwrap();
        let (np, _) = blow_up(&p, &rec, &bl.points[0]).unwrap();
        let after = base_points(&np).unwrap();
        let near: Vec<_> = after.points.iter().filter(|b| b.parent == Some(4)).collect();
        assert_eq!(near.len(), 1);
        assert_eq!(near[0].coords, (q(-1, 1), q(0, 1)));
    }

    #[test]
    fn pullback_matches_parent() {
        // A_parent(cx + x1 y1, cy + y1) = y1^m A_child(x1, y1)
        let p = Pencil::biquadratic();
        let bl = base_points(&p).unwrap();
        let (np, _) = blow_up(&p, &ResolutionRecord::new(&p), &bl.points[1]).unwrap();
        let n = np.charts.len();
        for ci in [n - 2, n - 1] {
            let ch = &np.charts[ci];
            let par = ch.parent.as_ref().unwrap();
            for pt in [(q(2, 3), q(-1, 5)), (q(-7, 2), q(3, 4))] {
                let (pc, ppt) = np.to_parent(ci, &pt).unwrap();
                let e = if par.branch == 1 { pt.1.clone() } else { pt.0.clone() };
                let f = Rational::from(rug::ops::Pow::pow(&e, par.factor_exponent as i32)) * ch.a.eval(&pt.0, &pt.1);
                assert_eq!(np.charts[pc].a.eval(&ppt.0, &ppt.1), f);
            }
        }
    }

    #[test]
    fn line_through_center_drops_to_minus_one() {
        // fibre y = 0 of P¹×P¹ starts at 0 and meets the base point (0, 0)
        let p = Pencil::biquadratic();
        let rec = ResolutionRecord::new(&p);
        assert_eq!(rec.self_intersection(2), 0);
        let bp = base_points(&p).unwrap().points[0].clone();
        let (_, r) = blow_up(&p, &rec, &bp).unwrap();
        assert_eq!(r.self_intersection(2), -1);
    }

    #[test]
    fn non_base_point_is_rejected() {
        let p = Pencil::biquadratic();
        let bogus = BasePoint { chart: 0, coords: (q(1, 1), q(1, 1)), multiplicity: 1, parent: None };
        assert!(matches!(blow_up(&p, &ResolutionRecord::new(&p), &bogus), Err(IvsError::NotABasePoint { .. })));
    }

    #[test]
    fn budget_is_reported() {
        let rec = resolve(&Pencil::weierstrass(&q(1, 1)), 3).unwrap();
        assert!(rec.budget_exhausted);
        assert!(!rec.resolved);
        assert_eq!(rec.blowups.len(), 3);
    }
}
