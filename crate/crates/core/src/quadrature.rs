//! Double-exponential (tanh-sinh) quadrature on a finite interval.

use rug::float::Constant;
use rug::Float;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("quadrature did not reach {target:e} after {levels} levels (last difference {last:e})")]
    NotConverged { target: f64, last: f64, levels: u32 },
    #[error("empty or reversed interval")]
    BadInterval,
}

/// Value together with the difference between the last two refinement levels.
#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Float,
    pub error_estimate: Float,
    pub levels: u32,
}

/// A tanh-sinh rule at a fixed working precision.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    bits: u32,
    max_levels: u32,
}

/// One abscissa of the rule on [-1, 1], stored as its distance to the nearest
/// endpoint so clustered nodes keep full relative accuracy.
#[derive(Debug, Clone)]
struct Node {
    complement: Float,
    weight: Float,
}

impl TanhSinh {
    pub fn new(bits: u32) -> Self {
        TanhSinh { bits, max_levels: 12 }
    }

    pub fn with_max_levels(mut self, levels: u32) -> Self {
        self.max_levels = levels;
        self
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Nodes `t = k·h` with `t > 0` for odd `k` (all `k` on level 0), each
    /// standing for the symmetric pair `±t`.
    fn level_nodes(&self, level: u32) -> Vec<Node> {
        let bits = self.bits;
        let h = Float::with_val(bits, 1) >> level;
        let half_pi = Float::with_val(bits, Constant::Pi) / 2u32;
        // far enough out that integrable endpoint singularities like 1/√x
        // contribute below the working precision
        let cutoff = Float::with_val(bits, 1) >> (2 * bits + 8);
        let step = if level == 0 { 1 } else { 2 };
        let mut out = Vec::new();
        let mut k: u64 = 1;
        loop {
            let t = Float::with_val(bits, &h * k);
            let s = Float::with_val(bits, t.sinh_ref()) * &half_pi;
            let e2s = Float::with_val(bits, s.clone() * 2u32).exp();
            // 1 - tanh(s) = 2/(e^{2s}+1)
            let complement = Float::with_val(bits, 2u32 / Float::with_val(bits, &e2s + 1u32));
            let cosh_s = Float::with_val(bits, s.cosh_ref());
            let weight = Float::with_val(bits, t.cosh_ref()) * &half_pi
                / Float::with_val(bits, cosh_s.square_ref());
            if weight < cutoff || complement.is_zero() {
                break;
            }
            out.push(Node { complement, weight });
            k += step;
        }
        out
    }

    /// Integrates `f` over `[a, b]` until successive levels agree to `tol`.
    pub fn integrate<F>(&self, f: F, a: &Float, b: &Float, tol: &Float) -> Result<QuadResult, QuadError>
    where
        F: Fn(&Float) -> Float,
    {
        let bits = self.bits;
        if a >= b {
            return Err(QuadError::BadInterval);
        }
        let half = Float::with_val(bits, b - a) / 2u32;
        let center = Float::with_val(bits, a + b) / 2u32;
        let eval_pair = |node: &Node| -> Float {
            let off = Float::with_val(bits, &half * &node.complement);
            let right = Float::with_val(bits, b - &off);
            let left = Float::with_val(bits, a + &off);
            let fr = Float::with_val(bits, f(&right));
            let fl = Float::with_val(bits, f(&left));
            Float::with_val(bits, fr + fl) * &node.weight
        };
        let half_pi = Float::with_val(bits, Constant::Pi) / 2u32;
        let mut sum = Float::with_val(bits, f(&center)) * &half_pi;
        let mut h = Float::with_val(bits, 1);
        let mut prev: Option<Float> = None;
        let mut last_diff = Float::with_val(bits, f64::INFINITY);
        for level in 0..=self.max_levels {
            for node in self.level_nodes(level) {
                sum += eval_pair(&node);
            }
            if level > 0 {
                h >>= 1;
            }
            let estimate = Float::with_val(bits, &sum * &h) * &half;
            if let Some(p) = prev.as_ref() {
                last_diff = Float::with_val(bits, &estimate - p).abs();
                if level >= 3 && last_diff <= *tol {
                    return Ok(QuadResult { value: estimate, error_estimate: last_diff, levels: level });
                }
            }
            prev = Some(estimate);
        }
        Err(QuadError::NotConverged {
            target: tol.to_f64(),
            last: last_diff.to_f64(),
            levels: self.max_levels,
        })
    }

    /// Abscissas and weights of the level-`level` composite rule on `[a, b]`,
    /// usable as a discrete inner product.
    pub fn rule(&self, a: &Float, b: &Float, level: u32) -> Vec<(Float, Float)> {
        let bits = self.bits;
        let half = Float::with_val(bits, b - a) / 2u32;
        let center = Float::with_val(bits, a + b) / 2u32;
        let h = Float::with_val(bits, 1) >> level;
        let half_pi = Float::with_val(bits, Constant::Pi) / 2u32;
        let scale = Float::with_val(bits, &h * &half);
        let mut out = vec![(center, Float::with_val(bits, &half_pi * &scale))];
        for l in 0..=level {
            for node in self.level_nodes(l) {
                let off = Float::with_val(bits, &half * &node.complement);
                let w = Float::with_val(bits, &node.weight * &scale);
                out.push((Float::with_val(bits, b - &off), w.clone()));
                out.push((Float::with_val(bits, a + &off), w));
            }
        }
        out
    }
}
