//! Moments, Hankel determinants and recurrence coefficients of the quartic
//! weight `exp(-x⁴/4 + t x²)`, and the nonlinear recurrence they satisfy.

use rug::ops::Pow;
use rug::Float;
use serde::Serialize;
use thiserror::Error;

use crate::precision::{float_to_string, PrecisionContext};
use crate::quadrature::{QuadError, TanhSinh};

#[derive(Debug, Error)]
pub enum OrthoError {
    #[error("need N >= {min}, got {got}")]
    TooFew { min: usize, got: usize },
    #[error("moment quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("moment error bound {bound:e} exceeds target {target:e}")]
    Precision { bound: f64, target: f64 },
    #[error("index {0} outside the computed range")]
    Index(usize),
}

/// Even weight `exp(-V(x))` on the real line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Weight {
    /// `V = x⁴/4 - t x²`.
    Quartic { t: f64 },
    /// `V = x²/2`; the Hermite case, kept as a check on the pipeline.
    Gaussian,
}

impl Weight {
    fn t(&self, bits: u32) -> Float {
        match self {
            Weight::Quartic { t } => Float::with_val(bits, *t),
            Weight::Gaussian => Float::new(bits),
        }
    }

    fn potential(&self, x: &Float, t: &Float) -> Float {
        let bits = x.prec();
        let x2 = Float::with_val(bits, x.square_ref());
        match self {
            Weight::Quartic { .. } => {
                let quart = Float::with_val(bits, x2.square_ref()) / 4u32;
                quart - Float::with_val(bits, t * &x2)
            }
            Weight::Gaussian => x2 / 2u32,
        }
    }

    fn potential_slope(&self, x: &Float, t: &Float) -> Float {
        let bits = x.prec();
        match self {
            Weight::Quartic { .. } => {
                let cube = Float::with_val(bits, x.square_ref()) * x;
                cube - Float::with_val(bits, t * x) * 2u32
            }
            Weight::Gaussian => x.clone(),
        }
    }

    /// `μ_{k+1}` in terms of lower moments, from integrating `(x^k e^{-V})'`
    /// over the line: quartic `μ_{k+3} = k μ_{k-1} + 2t μ_{k+1}`, Gaussian
    /// `μ_{k+1} = k μ_{k-1}`.
    fn lag(&self) -> usize {
        match self {
            Weight::Quartic { .. } => 4,
            Weight::Gaussian => 2,
        }
    }
}

/// `μ_0 … μ_{2N}` of the weight, immutable once built.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub weight: Weight,
    pub t: Float,
    pub n: usize,
    pub moments: Vec<Float>,
    /// Certified absolute error of the two quadrature moments.
    pub error_bound: Float,
    pub bits: u32,
}

/// Cutoff `R` with `∫_R^∞ x^k e^{-V}` certified below `target`, using
/// `∫_R^∞ x^k e^{-V} <= R^k e^{-V(R)} / (V'(R) - k/R)` when the denominator is
/// positive and increasing.
fn cutoff(w: &Weight, t: &Float, k: u32, target: &Float) -> (Float, Float) {
    let bits = t.prec();
    let mut r = Float::with_val(bits, 2);
    loop {
        let slope = w.potential_slope(&r, t) - Float::with_val(bits, k) / &r;
        let grows = Float::with_val(bits, r.square_ref()) * 3u32 > Float::with_val(bits, t * 2u32);
        if slope > 0 && grows {
            let pw = Float::with_val(bits, (&r).pow(k));
            let e = Float::with_val(bits, -w.potential(&r, t)).exp();
            let bound = pw * e / slope;
            if bound < *target {
                return (r, bound);
            }
        }
        r += 0.5;
    }
}

/// `∫ x^k e^{-V}` over the line by tanh-sinh on `[0, R]` with a certified
/// tail, for even `k`. Returns the value and its error bound.
pub fn direct_moment(w: &Weight, k: u32, ctx: &PrecisionContext) -> Result<(Float, Float), OrthoError> {
    let bits = ctx.bits();
    if k % 2 == 1 {
        return Ok((Float::new(bits), Float::new(bits)));
    }
    let work = bits + 32;
    let t = w.t(work);
    let target = Float::with_val(work, 1) >> (bits - 8);
    let (r, tail) = cutoff(w, &t, k, &Float::with_val(work, &target / 16u32));
    let f = |x: &Float| {
        let e = Float::with_val(work, -w.potential(x, &t)).exp();
        Float::with_val(work, x.pow(k)) * e
    };
    let q = TanhSinh::new(work).with_max_levels(14);
    let res = q.integrate(f, &Float::new(work), &r, &Float::with_val(work, &target / 16u32))?;
    let value = Float::with_val(bits, res.value * 2u32);
    let bound = Float::with_val(bits, (res.error_estimate + tail) * 2u32);
    Ok((value, bound))
}

/// Moments up to `μ_{2N}`: two by quadrature, the rest by the exact recursion.
pub fn compute_moments_for(w: &Weight, n: usize, ctx: &PrecisionContext) -> Result<MomentTable, OrthoError> {
    if n < 2 {
        return Err(OrthoError::TooFew { min: 2, got: n });
    }
    let bits = ctx.bits();
    let t = w.t(bits);
    let mut moments = vec![Float::new(bits); 2 * n + 1];
    let (m0, e0) = direct_moment(w, 0, ctx)?;
    let (m2, e2) = direct_moment(w, 2, ctx)?;
    let error_bound = Float::with_val(bits, if e0 > e2 { &e0 } else { &e2 });
    let target = Float::with_val(bits, 1) >> (bits - 16);
    if error_bound > target {
        return Err(OrthoError::Precision { bound: error_bound.to_f64(), target: target.to_f64() });
    }
    moments[0] = m0;
    moments[2] = m2;
    let lag = w.lag();
    for idx in (4..=2 * n).step_by(2) {
        // idx = k + lag - 1 with k odd
        let k = idx + 1 - lag;
        let mut v = Float::with_val(bits, &moments[k - 1] * (k as u32));
        if lag == 4 {
            v += Float::with_val(bits, &moments[k + 1] * &t) * 2u32;
        }
        moments[idx] = v;
    }
    Ok(MomentTable { weight: w.clone(), t, n, moments, error_bound, bits })
}

pub fn compute_moments(t: f64, n: usize, ctx: &PrecisionContext) -> Result<MomentTable, OrthoError> {
    compute_moments_for(&Weight::Quartic { t }, n, ctx)
}

impl MomentTable {
    /// Largest relative defect of the moment recursion over the table.
    pub fn recursion_defect(&self) -> Float {
        let bits = self.bits;
        let lag = self.weight.lag();
        let mut worst = Float::new(bits);
        for k in (1..self.moments.len()).step_by(2) {
            let top = k + lag - 1;
            if top >= self.moments.len() {
                break;
            }
            let mut rhs = Float::with_val(bits, &self.moments[k - 1] * (k as u32));
            if lag == 4 {
                rhs += Float::with_val(bits, &self.moments[k + 1] * &self.t) * 2u32;
            }
            let d = Float::with_val(bits, &self.moments[top] - &rhs).abs() / Float::with_val(bits, self.moments[top].abs_ref());
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

/// Leading principal minors `Δ_1 … Δ_m` of the Hankel matrix, by fraction-free
/// elimination at twice the table precision; the `k`-th pivot is `Δ_k`.
fn hankel_minors(m: &MomentTable, size: usize) -> Vec<Float> {
    let wide = 2 * m.bits;
    let mut a: Vec<Vec<Float>> = (0..size)
        .map(|i| (0..size).map(|j| Float::with_val(wide, &m.moments[i + j])).collect())
        .collect();
    let mut out = Vec::with_capacity(size);
    let mut prev = Float::with_val(wide, 1);
    for k in 0..size {
        out.push(Float::with_val(m.bits, &a[k][k]));
        for i in k + 1..size {
            for j in k + 1..size {
                let v = Float::with_val(wide, &a[i][j] * &a[k][k]) - Float::with_val(wide, &a[i][k] * &a[k][j]);
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    out
}

/// `Δ_n = det(μ_{i+j})`, `0 <= i, j < n`.
pub fn hankel_det(m: &MomentTable, n: usize) -> Result<Float, OrthoError> {
    if n == 0 || n > m.n {
        return Err(OrthoError::Index(n));
    }
    Ok(hankel_minors(m, n).pop().expect("n >= 1"))
}

/// Hankel determinants, norms and recurrence coefficients of one weight.
#[derive(Clone, Debug)]
pub struct OrthoData {
    pub t: Float,
    /// `Δ_1 … Δ_N`.
    pub deltas: Vec<Float>,
    /// `h_0 … h_{N-1}`, `h_k = Δ_{k+1}/Δ_k`.
    pub norms: Vec<Float>,
    /// `λ_2 … λ_N` of `Φ_n = x Φ_{n-1} - λ_n Φ_{n-2}`.
    lambdas: Vec<Float>,
}

impl OrthoData {
    pub fn lambda(&self, n: usize) -> Option<&Float> {
        n.checked_sub(2).and_then(|i| self.lambdas.get(i))
    }

    /// Largest `n` with `λ_n` available.
    pub fn max_index(&self) -> usize {
        self.lambdas.len() + 1
    }
}

/// `λ_n = Δ_n Δ_{n-2} / Δ_{n-1}²` with `Δ_0 = 1`.
pub fn lambda_coeffs(m: &MomentTable) -> Result<OrthoData, OrthoError> {
    if m.n < 4 {
        return Err(OrthoError::TooFew { min: 4, got: m.n });
    }
    let bits = m.bits;
    let deltas = hankel_minors(m, m.n);
    let d = |k: usize| if k == 0 { Float::with_val(bits, 1) } else { deltas[k - 1].clone() };
    let norms = (0..m.n).map(|k| d(k + 1) / d(k)).collect();
    let lambdas = (2..=m.n)
        .map(|n| Float::with_val(bits, d(n) * d(n - 2)) / Float::with_val(bits, d(n - 1).square_ref()))
        .collect();
    Ok(OrthoData { t: m.t.clone(), deltas, norms, lambdas })
}

/// Candidate right-hand side `n + c + 2t λ_{n+j}` of the recurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StringForm {
    pub offset: u32,
    pub shift: u32,
}

impl StringForm {
    pub fn candidates() -> Vec<StringForm> {
        (0..=2).flat_map(|c| (0..=2).map(move |j| StringForm { offset: c, shift: j })).collect()
    }

    pub fn describe(&self) -> String {
        let c = if self.offset == 0 { String::new() } else { format!(" + {}", self.offset) };
        let j = if self.shift == 0 { String::new() } else { format!("+{}", self.shift) };
        format!("lambda_(n+2) (lambda_(n+1) + lambda_(n+2) + lambda_(n+3)) = n{c} + 2t lambda_(n{j})")
    }
}

/// `(LHS - RHS)/|LHS|` for `λ_{n+2}(λ_{n+1}+λ_{n+2}+λ_{n+3}) = n + c + 2t λ_{n+j}`.
pub fn string_residual(d: &OrthoData, form: StringForm, n: usize) -> Result<Float, OrthoError> {
    let l = |k: usize| d.lambda(k).cloned().ok_or(OrthoError::Index(k));
    let bits = d.t.prec();
    let sum = l(n + 1)? + l(n + 2)? + l(n + 3)?;
    let lhs = Float::with_val(bits, &sum * &l(n + 2)?);
    let rhs = Float::with_val(bits, (n as u32) + form.offset) + Float::with_val(bits, &d.t * &l(n + form.shift as usize)?) * 2u32;
    Ok(Float::with_val(bits, &lhs - &rhs) / lhs.abs())
}

/// Largest relative residual of each candidate form over all tables and
/// `n_range`, with the best form first when it separates from the rest.
#[derive(Clone, Debug, Serialize)]
pub struct StringResolution {
    pub form: Option<StringForm>,
    pub description: Option<String>,
    pub candidates: Vec<(StringForm, f64)>,
}

/// Picks the candidate whose residual is at rounding level while every other
/// candidate is visibly off, over all supplied tables.
pub fn resolve_string_form(tables: &[OrthoData], n_range: std::ops::RangeInclusive<usize>, noise: f64) -> StringResolution {
    let mut candidates: Vec<(StringForm, f64)> = StringForm::candidates()
        .into_iter()
        .filter_map(|form| {
            let mut worst = 0f64;
            for d in tables {
                for n in n_range.clone() {
                    if n + (form.shift as usize) < 2 {
                        continue;
                    }
                    worst = worst.max(string_residual(d, form, n).ok()?.to_f64().abs());
                }
            }
            Some((form, worst))
        })
        .collect();
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1));
    let unique = candidates.len() > 1 && candidates[0].1 < noise && candidates[1].1 > noise.sqrt();
    let form = unique.then(|| candidates[0].0);
    StringResolution { form, description: form.map(|f| f.describe()), candidates }
}

/// One reported row `(n, λ_n, residual)` of the resolved recurrence.
#[derive(Clone, Debug, Serialize)]
pub struct StringRow {
    pub n: usize,
    pub lambda: String,
    pub residual: f64,
}

pub fn string_rows(d: &OrthoData, form: StringForm, n_range: std::ops::RangeInclusive<usize>) -> Result<Vec<StringRow>, OrthoError> {
    n_range
        .map(|n| {
            let lam = d.lambda(n).ok_or(OrthoError::Index(n))?;
            Ok(StringRow { n, lambda: float_to_string(lam), residual: string_residual(d, form, n)?.to_f64() })
        })
        .collect()
}

/// `λ_2 … λ_{m+1}` by modified Gram–Schmidt of `1, x, …, x^m` in the discrete
/// inner product of a tanh-sinh rule on `[-R, R]`.
pub fn gram_schmidt_lambdas(w: &Weight, m: usize, ctx: &PrecisionContext, level: u32) -> Vec<Float> {
    let bits = ctx.bits() + 64;
    let t = w.t(bits);
    let target = Float::with_val(bits, 1) >> (bits + 16);
    let (r, _) = cutoff(w, &t, 2 * m as u32, &target);
    let neg_r = Float::with_val(bits, -&r);
    let rule = TanhSinh::new(bits).rule(&neg_r, &r, level);
    let xs: Vec<&Float> = rule.iter().map(|(x, _)| x).collect();
    let ws: Vec<Float> = rule
        .iter()
        .map(|(x, wt)| Float::with_val(bits, -w.potential(x, &t)).exp() * wt)
        .collect();
    let dot = |a: &[Float], b: &[Float]| {
        let mut s = Float::new(bits);
        for ((u, v), wt) in a.iter().zip(b).zip(&ws) {
            s += Float::with_val(bits, u * v) * wt;
        }
        s
    };
    let mut basis: Vec<Vec<Float>> = Vec::new();
    let mut norms: Vec<Float> = Vec::new();
    for k in 0..=m {
        let mut v: Vec<Float> = xs.iter().map(|x| Float::with_val(bits, (*x).pow(k as u32))).collect();
        for (p, h) in basis.iter().zip(&norms) {
            let c = dot(&v, p) / h;
            for (vi, pi) in v.iter_mut().zip(p) {
                *vi -= Float::with_val(bits, &c * pi);
            }
        }
        norms.push(dot(&v, &v));
        basis.push(v);
    }
    (1..=m).map(|k| Float::with_val(ctx.bits(), &norms[k] / &norms[k - 1])).collect()
}
