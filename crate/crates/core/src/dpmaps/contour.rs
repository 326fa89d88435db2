use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;

use super::step::k_invariant;
use super::StepError;
use crate::precision::{rational_to_string, Scalar};

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]` sampled on `nx × ny` points.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub x: (Rational, Rational),
    pub y: (Rational, Rational),
    pub nx: usize,
    pub ny: usize,
}

/// `K(x, y)` sampled on a rectangle, `values[j][i]` at `(xs[i], ys[j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourGrid {
    pub xs: Vec<Rational>,
    pub ys: Vec<Rational>,
    pub values: Vec<Vec<Rational>>,
    /// Requested contour levels, echoed for plotting.
    pub levels: Vec<Rational>,
}

fn axis(lo: &Rational, hi: &Rational, n: usize) -> Vec<Rational> {
    if n == 1 {
        return vec![lo.clone()];
    }
    let h = Rational::from(hi - lo) / Rational::from(n - 1);
    (0..n).map(|i| Rational::from(lo + Rational::from(&h * Rational::from(i)))).collect()
}

fn touches_zero(lo: &Rational, hi: &Rational) -> bool {
    *lo <= 0 && *hi >= 0
}

/// `count` evenly spaced levels over `[lo, hi]`, inclusive.
pub fn level_range(lo: &Rational, hi: &Rational, count: usize) -> Vec<Rational> {
    if count == 0 {
        return Vec::new();
    }
    axis(lo, hi, count)
}

/// Exact grid of the autonomous invariant, evaluated in parallel.
pub fn contour_grid(spec: &GridSpec, levels: Vec<Rational>) -> Result<ContourGrid, StepError> {
    if spec.nx == 0 || spec.ny == 0 {
        return Err(StepError::Parameter("grid resolution must be at least 1×1".into()));
    }
    if spec.x.0 > spec.x.1 || spec.y.0 > spec.y.1 {
        return Err(StepError::Parameter("grid bounds must be increasing".into()));
    }
    if touches_zero(&spec.x.0, &spec.x.1) || touches_zero(&spec.y.0, &spec.y.1) {
        return Err(StepError::Parameter("grid must not touch the axes x = 0 or y = 0".into()));
    }
    let xs = axis(&spec.x.0, &spec.x.1, spec.nx);
    let ys = axis(&spec.y.0, &spec.y.1, spec.ny);
    let values = ys
        .par_iter()
        .map(|y| {
            xs.iter()
                .map(|x| {
                    let k = k_invariant(&Scalar::Exact(x.clone()), &Scalar::Exact(y.clone()))
                        .expect("grid avoids the axes");
                    k.as_rational().expect("exact inputs").clone()
                })
                .collect()
        })
        .collect();
    Ok(ContourGrid { xs, ys, values, levels })
}

impl ContourGrid {
    /// CSV with header `x,y,K`, one line per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,K\n");
        for (j, y) in self.ys.iter().enumerate() {
            for (i, x) in self.xs.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    rational_to_string(x),
                    rational_to_string(y),
                    rational_to_string(&self.values[j][i])
                ));
            }
        }
        out
    }
}

impl Serialize for ContourGrid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            xs: Vec<String>,
            ys: Vec<String>,
            values: Vec<Vec<String>>,
            values_f64: Vec<Vec<f64>>,
            levels: Vec<String>,
        }
        let strs = |v: &[Rational]| v.iter().map(rational_to_string).collect::<Vec<_>>();
        Repr {
            xs: strs(&self.xs),
            ys: strs(&self.ys),
            values: self.values.iter().map(|r| strs(r)).collect(),
            values_f64: self.values.iter().map(|r| r.iter().map(Rational::to_f64).collect()).collect(),
            levels: strs(&self.levels),
        }
        .serialize(s)
    }
}
