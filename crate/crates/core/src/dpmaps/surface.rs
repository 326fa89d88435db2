use std::fmt;

use serde::{Serialize, Serializer};

use super::StepError;
use crate::precision::Scalar;

/// A point of P¹ as a normalized homogeneous pair `[h0 : h1]`.
///
/// Exact values are normalized to `[w : 1]` or `[1 : 0]`. Inexact values use
/// `[w : 1]` while `|w|` stays below the overflow threshold and `[1 : 1/w]`
/// beyond it, so the stored components are always bounded.
#[derive(Clone, Debug, PartialEq)]
pub struct Proj {
    pub h0: Scalar,
    pub h1: Scalar,
}

impl Proj {
    pub fn finite(w: Scalar) -> Self {
        let one = w.one_like();
        Proj { h0: w, h1: one }
    }

    pub fn infinity_like(like: &Scalar) -> Self {
        Proj { h0: like.one_like(), h1: like.zero_like() }
    }

    /// Normalizes `[a : b]`; `None` when both components vanish.
    pub fn from_pair(a: Scalar, b: Scalar, overflow_bits: Option<u32>) -> Option<Self> {
        if a.is_zero() && b.is_zero() {
            return None;
        }
        if b.is_zero() {
            return Some(Proj::infinity_like(&a));
        }
        if let Some(half) = overflow_bits {
            let bits = a.precision_bits().unwrap_or(64).max(b.precision_bits().unwrap_or(64));
            let ratio = a.checked_div(&b).ok()?;
            let threshold = rug::Float::with_val(bits, 1) << half;
            if ratio.abs_float(bits) > threshold {
                let inv = b.checked_div(&a).ok()?;
                return Some(Proj { h0: a.one_like(), h1: inv });
            }
            return Some(Proj::finite(ratio));
        }
        Some(Proj::finite(a.checked_div(&b).ok()?))
    }

    pub fn is_infinite(&self) -> bool {
        self.h1.is_zero()
    }

    /// True when the value is carried in the reciprocal coordinate.
    pub fn in_reciprocal(&self) -> bool {
        self.h0 == self.h0.one_like() && !self.is_affine_form()
    }

    fn is_affine_form(&self) -> bool {
        self.h1 == self.h1.one_like()
    }

    pub fn is_zero(&self) -> bool {
        self.h0.is_zero()
    }

    /// The affine value `h0/h1`, if finite.
    pub fn value(&self) -> Option<Scalar> {
        if self.is_infinite() {
            None
        } else if self.is_affine_form() {
            Some(self.h0.clone())
        } else {
            self.h0.checked_div(&self.h1).ok()
        }
    }

    /// The coordinate `h1/h0` of the chart at infinity, if defined.
    pub fn reciprocal(&self) -> Option<Scalar> {
        if self.is_zero() {
            None
        } else {
            self.h1.checked_div(&self.h0).ok()
        }
    }

    /// Affine coordinate when representable without overflow, else the
    /// reciprocal coordinate (with `true`).
    pub fn chart_coordinate(&self) -> (Scalar, bool) {
        if self.is_affine_form() {
            (self.h0.clone(), false)
        } else {
            (self.reciprocal().expect("normalized infinity has h0 = 1"), true)
        }
    }
}

/// Coordinate chart on P¹×P¹ or on a blow-up of it.
#[derive(Clone, Debug, PartialEq)]
pub enum ChartId {
    /// `(x, y)`.
    Affine,
    /// `(1/x, y)`.
    InvX,
    /// `(x, 1/y)`.
    InvY,
    /// `(1/x, 1/y)`.
    InvXY,
    /// Blow-up of the point `center` (affine coordinates). Branch 1 uses
    /// `((x - cx)/(y - cy), y - cy)`, branch 2 uses `(x - cx, (y - cy)/(x - cx))`.
    /// `base` numbers the blown-up points of the map (0 is `(1/z, 0)` of the q-map).
    Blowup { base: usize, branch: u8, center: (Scalar, Scalar) },
}

impl ChartId {
    pub fn label(&self) -> String {
        match self {
            ChartId::Affine => "affine".into(),
            ChartId::InvX => "inv_x".into(),
            ChartId::InvY => "inv_y".into(),
            ChartId::InvXY => "inv_xy".into(),
            ChartId::Blowup { base, branch, .. } => format!("blowup({base},{branch})"),
        }
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for ChartId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ChartId::Blowup { base, branch, center } => {
                #[derive(Serialize)]
                struct B<'a> {
                    name: String,
                    base: usize,
                    branch: u8,
                    center: [&'a Scalar; 2],
                }
                B { name: self.label(), base: *base, branch: *branch, center: [&center.0, &center.1] }.serialize(s)
            }
            other => s.serialize_str(&other.label()),
        }
    }
}

/// A point given by two finite coordinates in a named chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub chart: ChartId,
    pub coords: (Scalar, Scalar),
}

impl SurfacePoint {
    pub fn affine(x: Scalar, y: Scalar) -> Self {
        SurfacePoint { chart: ChartId::Affine, coords: (x, y) }
    }

    /// Encodes a pair of P¹ points in the matching coordinate chart.
    pub fn from_proj(x: &Proj, y: &Proj) -> Self {
        let (cx, ix) = x.chart_coordinate();
        let (cy, iy) = y.chart_coordinate();
        let chart = match (ix, iy) {
            (false, false) => ChartId::Affine,
            (true, false) => ChartId::InvX,
            (false, true) => ChartId::InvY,
            (true, true) => ChartId::InvXY,
        };
        SurfacePoint { chart, coords: (cx, cy) }
    }

    /// The underlying pair of P¹ points. Points on an exceptional line map to
    /// the blown-up center.
    pub fn to_proj(&self) -> Result<(Proj, Proj), StepError> {
        let (a, b) = &self.coords;
        let recip = |v: &Scalar| -> Proj {
            if v.is_zero() {
                Proj::infinity_like(v)
            } else {
                Proj::finite(v.one_like().checked_div(v).expect("nonzero"))
            }
        };
        Ok(match &self.chart {
            ChartId::Affine => (Proj::finite(a.clone()), Proj::finite(b.clone())),
            ChartId::InvX => (recip(a), Proj::finite(b.clone())),
            ChartId::InvY => (Proj::finite(a.clone()), recip(b)),
            ChartId::InvXY => (recip(a), recip(b)),
            ChartId::Blowup { branch, center, .. } => {
                let (cx, cy) = center;
                let (x, y) = match branch {
                    1 => (cx.add(&a.mul(b)), cy.add(b)),
                    2 => (cx.add(a), cy.add(&a.mul(b))),
                    other => return Err(StepError::Chart(format!("unknown blow-up branch {other}"))),
                };
                (Proj::finite(x), Proj::finite(y))
            }
        })
    }

    /// Re-expresses the point in `target`; `None` when it has no finite
    /// coordinates there (or lies on the exceptional line of a source chart
    /// and the target cannot tell points of that line apart).
    pub fn in_chart(&self, target: &ChartId) -> Option<SurfacePoint> {
        if *target == self.chart {
            return Some(self.clone());
        }
        let (x, y) = self.to_proj().ok()?;
        let fin = |p: &Proj| p.value();
        let rec = |p: &Proj| p.reciprocal();
        let coords = match target {
            ChartId::Affine => (fin(&x)?, fin(&y)?),
            ChartId::InvX => (rec(&x)?, fin(&y)?),
            ChartId::InvY => (fin(&x)?, rec(&y)?),
            ChartId::InvXY => (rec(&x)?, rec(&y)?),
            ChartId::Blowup { branch, center, .. } => {
                let dx = fin(&x)?.sub(&center.0);
                let dy = fin(&y)?.sub(&center.1);
                match branch {
                    1 => (dx.checked_div(&dy).ok()?, dy),
                    2 => {
                        let u = dy.checked_div(&dx).ok()?;
                        (dx, u)
                    }
                    _ => return None,
                }
            }
        };
        Some(SurfacePoint { chart: target.clone(), coords })
    }

    /// True for points on the exceptional line of a blow-up chart.
    pub fn on_exceptional_line(&self) -> bool {
        match &self.chart {
            ChartId::Blowup { branch: 1, .. } => self.coords.1.is_zero(),
            ChartId::Blowup { branch: 2, .. } => self.coords.0.is_zero(),
            _ => false,
        }
    }
}
