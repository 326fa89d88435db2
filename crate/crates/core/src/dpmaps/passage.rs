//! Exact continuation through indeterminate points by a formal perturbation.
//!
//! The newest entry of the last regular state is replaced by `w + ε` and the
//! affine step is iterated over truncated Laurent series in ε until two
//! consecutive entries are again finite and nonzero. The limits at ε → 0 are
//! the points of the orbit on the resolved surface.

use rug::Rational;
use serde::Serialize;

use super::step::StepCoeffs;
use crate::precision::{EpsSeries, Field};

/// Longest run of non-regular entries a passage may cover.
pub const MAX_PASSAGE: usize = 12;

const TERM_SCHEDULE: [usize; 3] = [16, 32, 64];

/// Limit of one entry of the perturbed orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Limit {
    Finite(Rational),
    Infinite,
}

impl Limit {
    pub fn label(&self) -> String {
        match self {
            Limit::Finite(r) => crate::precision::rational_to_string(r),
            Limit::Infinite => "inf".into(),
        }
    }
}

impl Serialize for Limit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// Outcome of a successful passage.
#[derive(Clone, Debug)]
pub(crate) struct PassageResult {
    /// Limits for entries `start + 1 ..= start + limits.len()`.
    pub limits: Vec<Limit>,
    /// The perturbed series, indexed like `limits`, kept for chart coordinates.
    pub series: Vec<EpsSeries>,
    /// The predecessor series of the first limit (the perturbed entry).
    pub anchor: (EpsSeries, EpsSeries),
    pub terms: usize,
}

fn limit_of(s: &EpsSeries) -> Limit {
    match s.limit() {
        Some(r) => Limit::Finite(r),
        None => Limit::Infinite,
    }
}

fn regular(s: &EpsSeries) -> bool {
    !s.is_exact_zero() && s.valuation() == 0
}

/// Runs the perturbed iteration from the regular state `(prev, cur)`.
///
/// `coeffs(k)` gives the step coefficients used to produce entry `k + 1`
/// from entries `k - 1, k` (relative to the state, `k = 0` is `cur`).
/// `must_pass` is how many entries past `cur` have to be produced before a
/// regular pair ends the passage, and `budget` caps the total.
pub(crate) fn pass(
    prev: &Rational,
    cur: &Rational,
    coeffs: &dyn Fn(usize) -> StepCoeffs<Rational>,
    must_pass: usize,
    budget: usize,
) -> Option<PassageResult> {
    'schedule: for &terms in &TERM_SCHEDULE {
        let a = EpsSeries::constant(prev, terms);
        let b = EpsSeries::perturbed(cur, terms);
        let mut hist = vec![a.clone(), b.clone()];
        let mut k = 0usize;
        loop {
            let co = coeffs(k).map(|r| EpsSeries::constant(r, terms));
            let next = match co.affine(&hist[k], &hist[k + 1]) {
                // an inexact series with no terms at or below order 0 has lost its limit
                Some(v) if v.is_exact_zero() || v.leading().is_some() || v.valuation() > 0 => v,
                _ => continue 'schedule,
            };
            hist.push(next);
            k += 1;
            let produced = k;
            let done = produced >= must_pass
                && regular(&hist[k])
                && regular(&hist[k + 1]);
            if done || produced >= budget {
                break;
            }
            if produced > must_pass + MAX_PASSAGE {
                return None;
            }
        }
        let series: Vec<EpsSeries> = hist[2..].to_vec();
        let limits = series.iter().map(limit_of).collect();
        return Some(PassageResult { limits, series, anchor: (a, b), terms });
    }
    None
}

/// `lim (x - cx)/y` for series `x, y`, the blow-up coordinate along the
/// exceptional line over `(cx, 0)`.
pub(crate) fn exceptional_coordinate(x: &EpsSeries, y: &EpsSeries, cx: &Rational) -> Option<Rational> {
    let shifted = x.sub(&x.from_rational_like(cx));
    let ratio = shifted.div(y)?;
    ratio.limit()
}
