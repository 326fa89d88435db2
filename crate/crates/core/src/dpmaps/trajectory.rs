use std::collections::BTreeMap;
use std::fmt::Write as _;

use rug::{Float, Rational};
use serde::Serialize;

use super::params::{inverse_z, MapId, MapParams};
use super::passage::{exceptional_coordinate, pass, Limit, MAX_PASSAGE};
use super::step::{k_invariant, step_ercg, StepCoeffs};
use super::surface::{ChartId, Proj, SurfacePoint};
use super::StepError;
use crate::ivs::qp1_basepoint_chart;
use crate::precision::{PrecisionContext, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// One state `(w_n, w_{n∓1})` of a trajectory in its chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub n: i64,
    pub point: SurfacePoint,
    /// `K(w_n, w_{n∓1})` when both entries are finite and nonzero.
    pub k: Option<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartSwitch {
    pub n: i64,
    pub from: String,
    pub to: String,
}

/// A run of entries obtained as limits of a perturbed orbit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PassageRecord {
    /// Index of the perturbed entry.
    pub perturbed_n: i64,
    /// Indices and limit values of the replaced entries.
    pub entries: Vec<(i64, Limit)>,
    pub series_terms: usize,
}

/// Why a trajectory stopped before its requested length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub n: i64,
    pub kind: String,
    pub message: String,
}

/// An orbit of one of the maps.
///
/// `values` holds every computed entry, seeds included, ordered in the
/// direction of iteration (`steps + 2` entries for a full run). `rows` holds
/// the consecutive states formed by neighbouring entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub map: MapId,
    pub params: MapParams,
    pub n0: i64,
    pub direction: Direction,
    pub exact: bool,
    #[serde(skip)]
    pub values: Vec<Proj>,
    pub rows: Vec<TrajectoryRow>,
    pub chart_switches: Vec<ChartSwitch>,
    pub passages: Vec<PassageRecord>,
    pub termination: Option<Diagnostic>,
}

impl Trajectory {
    pub fn index(&self, i: usize) -> i64 {
        index_of(self.n0, self.direction, i)
    }

    pub fn completed(&self) -> bool {
        self.termination.is_none()
    }

    /// Finite entries as scalars, `None` for ∞.
    pub fn entries(&self) -> Vec<Option<Scalar>> {
        self.values.iter().map(Proj::value).collect()
    }

    /// CSV with header `n,chart,coord1,coord2,K`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,chart,coord1,coord2,K\n");
        for r in &self.rows {
            let k = r.k.as_ref().map(|k| k.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.n,
                r.point.chart.label(),
                r.point.coords.0,
                r.point.coords.1,
                k
            );
        }
        out
    }
}

fn index_of(n0: i64, dir: Direction, i: usize) -> i64 {
    match dir {
        Direction::Forward => n0 + i as i64,
        Direction::Backward => n0 - i as i64,
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryOptions {
    pub direction: Direction,
    /// Precision for inexact runs and the elliptic map.
    pub ctx: PrecisionContext,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        TrajectoryOptions { direction: Direction::Forward, ctx: PrecisionContext::default() }
    }
}

fn coeffs_at(params: &MapParams, n: i64) -> Option<StepCoeffs<Scalar>> {
    Some(match params {
        MapParams::Dp1(p) => StepCoeffs::Dp1 { alpha: p.affine_rhs(n), c: p.c.clone() },
        MapParams::Qp1(p) => StepCoeffs::Qp1 { z: p.z(n) },
        MapParams::Qp1Auto => StepCoeffs::Auto,
        MapParams::Ercg(_) => return None,
    })
}

fn params_exact(params: &MapParams) -> bool {
    match params {
        MapParams::Dp1(p) => p.a.is_exact() && p.b.is_exact() && p.c.is_exact(),
        MapParams::Qp1(p) => p.a().is_exact() && p.q().is_exact(),
        MapParams::Qp1Auto => true,
        MapParams::Ercg(_) => false,
    }
}

struct Driver<'a> {
    params: &'a MapParams,
    n0: i64,
    dir: Direction,
    ctx: PrecisionContext,
    exact: bool,
    values: Vec<Proj>,
    /// Exceptional-line coordinate of states sitting on the blown-up `(1/z, 0)`.
    on_exceptional: BTreeMap<usize, Scalar>,
    passages: Vec<PassageRecord>,
    termination: Option<Diagnostic>,
}

impl<'a> Driver<'a> {
    fn idx(&self, i: usize) -> i64 {
        index_of(self.n0, self.dir, i)
    }

    fn overflow_bits(&self) -> Option<u32> {
        (!self.exact).then(|| self.ctx.bits() / 2)
    }

    fn stop(&mut self, i: usize, kind: &str, message: String) {
        self.termination = Some(Diagnostic { n: self.idx(i), kind: kind.into(), message });
    }

    /// Fills `values` up to `target` entries starting with the state ending at `i`.
    fn run(&mut self, mut i: usize, target: usize) {
        while self.values.len() < target {
            let n = self.idx(i);
            let x = self.values[i].clone();
            let y = self.values[i - 1].clone();
            if let MapParams::Ercg(p) = self.params {
                match (x.value(), y.value()) {
                    (Some(xv), Some(yv)) => {
                        let xf = xv.to_float(self.ctx.bits());
                        let yf = yv.to_float(self.ctx.bits());
                        match step_ercg(&yf, &xf, n, p, &self.ctx) {
                            Ok(v) if v.is_finite() => self.values.push(Proj::finite(Scalar::Real(v))),
                            Ok(_) => return self.stop(i, "overflow", "non-finite iterate".into()),
                            Err(e) => return self.stop(i, "indeterminate-step", e.to_string()),
                        }
                    }
                    _ => return self.stop(i, "singular-step", "infinite entry".into()),
                }
                i += 1;
                continue;
            }
            let co = coeffs_at(self.params, n).expect("exact-capable map");
            let affine_form = |p: &Proj| p.h1 == p.h1.one_like();
            let fast = if affine_form(&x) && affine_form(&y) {
                co.affine(&y.h0, &x.h0)
            } else {
                None
            };
            if let Some(v) = fast {
                let one = v.one_like();
                match Proj::from_pair(v, one, self.overflow_bits()) {
                    Some(p) => self.values.push(p),
                    None => return self.stop(i, "singular-step", "zero pair".into()),
                }
                i += 1;
                continue;
            }
            if i == 1 {
                return self.stop(
                    i,
                    "singular-step",
                    format!("seed (w_prev, w) = ({}, {}) is singular for the step at n = {n}", fmt_proj(&y), fmt_proj(&x)),
                );
            }
            let (h0, h1) = co.homogeneous(&(x.h0.clone(), x.h1.clone()), &(y.h0.clone(), y.h1.clone()));
            if let Some(p) = Proj::from_pair(h0, h1, self.overflow_bits()) {
                self.values.push(p);
                i += 1;
                continue;
            }
            if !self.exact {
                return self.stop(i, "indeterminate-step", format!("state ({}, {}) is an indeterminacy point", fmt_proj(&x), fmt_proj(&y)));
            }
            match self.passage(i, target) {
                Ok(next_i) => i = next_i,
                Err(msg) => return self.stop(i, "unresolved-indeterminacy", msg),
            }
        }
    }

    fn regular_state(&self, j: usize) -> Option<(Rational, Rational)> {
        let a = self.values[j - 1].value()?.as_rational()?.clone();
        let b = self.values[j].value()?.as_rational()?.clone();
        (a != 0 && b != 0).then_some((a, b))
    }

    /// Replaces the entries after the last regular state by limits and returns
    /// the index of the last replaced entry.
    fn passage(&mut self, i: usize, target: usize) -> Result<usize, String> {
        let j = (1..i)
            .rev()
            .find(|&j| self.regular_state(j).is_some())
            .ok_or_else(|| "no regular state precedes the indeterminacy".to_string())?;
        let (prev, cur) = self.regular_state(j).unwrap();
        let params = self.params;
        let (n0, dir) = (self.n0, self.dir);
        let coeffs = move |k: usize| {
            let n = index_of(n0, dir, j + k);
            coeffs_at(params, n)
                .expect("exact-capable map")
                .map(|s| s.as_rational().expect("exact coefficients").clone())
        };
        let must_pass = i + 1 - j;
        let budget = target - 1 - j;
        let res = pass(&prev, &cur, &coeffs, must_pass, budget)
            .ok_or_else(|| format!("perturbed orbit from n = {} did not return to regular values within {MAX_PASSAGE} steps", self.idx(j)))?;
        self.values.truncate(j + 1);
        let mut entries = Vec::new();
        for (k, lim) in res.limits.iter().enumerate() {
            let m = j + 1 + k;
            let p = match lim {
                Limit::Finite(r) => Proj::finite(Scalar::Exact(r.clone())),
                Limit::Infinite => Proj::infinity_like(&Scalar::int(1)),
            };
            self.values.push(p);
            entries.push((self.idx(m), lim.clone()));
        }
        if let (MapParams::Qp1(qp), Direction::Forward) = (self.params, self.dir) {
            let all: Vec<_> = std::iter::once(&res.anchor.1).chain(res.series.iter()).collect();
            for k in 1..all.len() {
                let m = j + k;
                let inv_z = inverse_z(qp, self.idx(m));
                let inv_z = inv_z.as_rational().unwrap();
                let here = self.values[m].value();
                let before = self.values[m - 1].value();
                if here.as_ref().and_then(|v| v.as_rational()) == Some(inv_z)
                    && before.as_ref().is_some_and(|v| v.is_zero())
                {
                    if let Some(u) = exceptional_coordinate(all[k], all[k - 1], inv_z) {
                        self.on_exceptional.insert(m, Scalar::Exact(u));
                    }
                }
            }
        }
        self.passages.push(PassageRecord { perturbed_n: self.idx(j), entries, series_terms: res.terms });
        Ok(self.values.len() - 1)
    }

    fn rows(&self) -> Vec<TrajectoryRow> {
        (1..self.values.len())
            .map(|m| {
                let n = self.idx(m);
                let (x, y) = (&self.values[m], &self.values[m - 1]);
                let point = match (self.on_exceptional.get(&m), self.params) {
                    (Some(u), MapParams::Qp1(qp)) => SurfacePoint {
                        chart: ChartId::Blowup { base: 0, branch: 1, center: (inverse_z(qp, n), Scalar::int(0)) },
                        coords: (u.clone(), Scalar::int(0)),
                    },
                    _ => SurfacePoint::from_proj(x, y),
                };
                let k = match (x.value(), y.value()) {
                    (Some(a), Some(b)) if !a.is_zero() && !b.is_zero() && !x.in_reciprocal() && !y.in_reciprocal() => {
                        k_invariant(&a, &b).ok()
                    }
                    _ => None,
                };
                TrajectoryRow { n, point, k }
            })
            .collect()
    }

    fn finish(self) -> Trajectory {
        let rows = self.rows();
        let chart_switches = rows
            .windows(2)
            .filter(|w| w[0].point.chart.label() != w[1].point.chart.label())
            .map(|w| ChartSwitch { n: w[1].n, from: w[0].point.chart.label(), to: w[1].point.chart.label() })
            .collect();
        Trajectory {
            map: self.params.id(),
            params: self.params.clone(),
            n0: self.n0,
            direction: self.dir,
            exact: self.exact,
            values: self.values,
            rows,
            chart_switches,
            passages: self.passages,
            termination: self.termination,
        }
    }
}

fn fmt_proj(p: &Proj) -> String {
    match p.value() {
        Some(v) => v.to_string(),
        None => "inf".into(),
    }
}

/// Iterates `steps` times from the seeds `(w_{n0}, w_{n0±1})`.
///
/// Exact runs step on rationals and continue through indeterminate points by
/// a perturbed passage; inexact runs switch to reciprocal coordinates once a
/// value exceeds `2^(bits/2)` and stop at indeterminate points. Runtime
/// singularities end the trajectory with a diagnostic instead of an error.
pub fn run_trajectory(
    params: &MapParams,
    seed: (Scalar, Scalar),
    n0: i64,
    steps: usize,
    opts: &TrajectoryOptions,
) -> Result<Trajectory, StepError> {
    if steps == 0 {
        return Err(StepError::Parameter("steps must be at least 1".into()));
    }
    let exact = params_exact(params) && seed.0.is_exact() && seed.1.is_exact();
    let mut d = Driver {
        params,
        n0,
        dir: opts.direction,
        ctx: opts.ctx,
        exact,
        values: vec![Proj::finite(seed.0), Proj::finite(seed.1)],
        on_exceptional: BTreeMap::new(),
        passages: Vec::new(),
        termination: None,
    };
    d.run(1, steps + 2);
    Ok(d.finish())
}

/// Forward q-map trajectory starting from a state given as a surface point at
/// index `n` (the state `(w_n, w_{n-1})`), which may lie on the exceptional
/// line over `(1/z_n, 0)`.
pub fn run_trajectory_from_point(
    params: &MapParams,
    point: &SurfacePoint,
    n: i64,
    steps: usize,
    opts: &TrajectoryOptions,
) -> Result<Trajectory, StepError> {
    if steps == 0 {
        return Err(StepError::Parameter("steps must be at least 1".into()));
    }
    let MapParams::Qp1(qp) = params else {
        let (x, y) = point.to_proj()?;
        let (Some(xv), Some(yv)) = (x.value(), y.value()) else {
            return Err(StepError::Chart("start point must be finite for this map".into()));
        };
        return run_trajectory(params, (yv, xv), n - 1, steps, opts);
    };
    let chart = qp1_basepoint_chart(&qp.z(n)).map_err(|e| StepError::Chart(e.to_string()))?;
    let mut d = Driver {
        params,
        n0: n - 1,
        dir: Direction::Forward,
        ctx: opts.ctx,
        exact: params_exact(params),
        values: Vec::new(),
        on_exceptional: BTreeMap::new(),
        passages: Vec::new(),
        termination: None,
    };
    let as_exc = point.in_chart(&chart.chart).filter(|p| p.on_exceptional_line());
    if let Some(p) = as_exc {
        let (u, v) = (&p.coords.0, &p.coords.1);
        let (xn, yn) = chart.lifted_step(u, v).map_err(|e| StepError::Chart(e.to_string()))?;
        d.values = vec![Proj::finite(Scalar::int(0)), Proj::finite(chart.center.0.clone()), Proj::finite(xn)];
        debug_assert_eq!(yn, chart.center.0);
        d.on_exceptional.insert(1, u.clone());
        d.run(2, steps + 2);
    } else {
        let (x, y) = point.to_proj()?;
        d.values = vec![y, x];
        d.run(1, steps + 2);
    }
    Ok(d.finish())
}

/// Float helper for inexact seeds.
pub fn real_seed(ctx: &PrecisionContext, a: f64, b: f64) -> (Scalar, Scalar) {
    (Scalar::Real(Float::with_val(ctx.bits(), a)), Scalar::Real(Float::with_val(ctx.bits(), b)))
}
