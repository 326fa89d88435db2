use std::fmt::Write as _;

use clap::{Args, ValueEnum};
use painleve_core::dpmaps::{
    contour_grid, level_range, run_trajectory, Direction, DP1Params, ErcgParams, GridSpec, MapParams, QP1Params,
    StepError, TrajectoryOptions,
};
use painleve_core::elliptic::Modulus;
use painleve_core::ivs::{dynkin, resolve_with, IvsError, Pencil, ResolveOptions};
use painleve_core::ortho::{compute_moments, lambda_coeffs, resolve_string_form, string_rows, OrthoError};
use painleve_core::pode::{integrate, IntegrateOptions, OdeSpec, PodeError};
use painleve_core::precision::{rational, rational_to_string, Rational};
use painleve_core::weyl::{check_relations, check_translation, SignConvention};
use painleve_core::PrecisionContext;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::{scalar, scalar_list, scalar_tuple, CliError, Format, GlobalArgs, SCHEMA_VERSION};

/// What a command hands back to the driver.
pub struct Report {
    pub body: String,
    pub code: i32,
    /// Human-readable line for standard error.
    pub note: Option<String>,
}

/// A command with its fully resolved configuration.
struct Resolved {
    command: &'static str,
    config: Value,
    format: Format,
}

impl Resolved {
    fn new<T: Serialize>(command: &'static str, g: &GlobalArgs, format: Format, args: &T) -> Self {
        let mut cfg = Map::new();
        cfg.insert("bits".into(), json!(g.bits.unwrap_or(painleve_core::precision::DEFAULT_BITS)));
        cfg.insert("format".into(), json!(format.name()));
        cfg.insert("seed".into(), json!(g.seed));
        if let Ok(Value::Object(m)) = serde_json::to_value(args) {
            cfg.extend(m);
        }
        Resolved { command, config: Value::Object(cfg), format }
    }

    fn document(&self, key: &str, payload: Value) -> String {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            key: payload,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
        s.push('\n');
        s
    }

    /// Turns a runtime failure into an exit-2 report, as a JSON document
    /// carrying the diagnostic when JSON output was requested.
    fn finish(&self, outcome: Result<Report, CliError>) -> Result<Report, CliError> {
        match outcome {
            Err(CliError::Runtime { kind, message }) if matches!(self.format, Format::Json) => Ok(Report {
                body: self.document("error", json!({ "kind": kind, "message": message })),
                code: 2,
                note: Some(format!("{kind}: {message}")),
            }),
            other => other,
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn step_error(e: StepError) -> CliError {
    match e {
        StepError::Parameter(m) => CliError::Config(m),
        other => CliError::runtime("step-error", other),
    }
}

fn exact_pair(field: &str, text: &str) -> Result<(Rational, Rational), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    let [lo, hi] = parts.as_slice() else {
        return Err(CliError::field(field, format!("expected `lo,hi`, got `{text}`")));
    };
    let p = |s: &str| rational(s.trim()).map_err(|_| CliError::field(field, format!("`{s}` is not an exact rational such as 3/2")));
    Ok((p(lo)?, p(hi)?))
}

// ---------------------------------------------------------------- iterate

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapChoice {
    Dp1,
    Qp1,
    Qp1Auto,
    Ercg,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct IterateArgs {
    #[arg(long, value_enum)]
    pub map: Option<MapChoice>,
    /// dp1: slope of the affine right-hand side; qp1: scale of z_n.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// dp1: intercept of the affine right-hand side.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// dp1: coefficient of w on the right-hand side.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// qp1: ratio of z_n.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// ercg: elliptic modulus.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_e: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_o: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Index of the first seed entry.
    #[arg(long, allow_hyphen_values = true)]
    pub n0: Option<i64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub backward: bool,
}

impl IterateArgs {
    fn params_mut(&mut self) -> [(&'static str, &mut Option<String>); 8] {
        [
            ("a", &mut self.a),
            ("b", &mut self.b),
            ("c", &mut self.c),
            ("q", &mut self.q),
            ("k", &mut self.k),
            ("gamma-e", &mut self.gamma_e),
            ("gamma-o", &mut self.gamma_o),
            ("omega", &mut self.omega),
        ]
    }

    /// Rejects parameters of other maps and fills defaults for this one.
    fn fill(&mut self) -> Result<MapChoice, CliError> {
        let map = *self.map.get_or_insert(MapChoice::Qp1Auto);
        let defaults: &[(&str, &str)] = match map {
            MapChoice::Dp1 => &[("a", "1"), ("b", "0"), ("c", "0")],
            MapChoice::Qp1 => &[("a", "1"), ("q", "2")],
            MapChoice::Qp1Auto => &[],
            MapChoice::Ercg => &[("k", "0.5"), ("gamma-e", "0.17"), ("gamma-o", "0.31"), ("omega", "0.4")],
        };
        for (name, slot) in self.params_mut() {
            match defaults.iter().find(|(d, _)| *d == name) {
                Some((_, v)) => {
                    slot.get_or_insert_with(|| v.to_string());
                }
                None if slot.is_some() => {
                    let id = serde_json::to_value(map).expect("enum serializes");
                    return Err(CliError::field(name, format!("does not apply to map {id}")));
                }
                None => {}
            }
        }
        self.n0.get_or_insert(0);
        self.steps.get_or_insert(10);
        Ok(map)
    }

    fn map_params(&self, map: MapChoice, ctx: &PrecisionContext) -> Result<MapParams, CliError> {
        let get = |name: &str, v: &Option<String>| scalar(name, v.as_deref().unwrap_or_default(), ctx);
        Ok(match map {
            MapChoice::Dp1 => MapParams::Dp1(DP1Params::new(get("a", &self.a)?, get("b", &self.b)?, get("c", &self.c)?)),
            MapChoice::Qp1 => MapParams::Qp1(QP1Params::new(get("a", &self.a)?, get("q", &self.q)?).map_err(|e| CliError::field("q", e))?),
            MapChoice::Qp1Auto => MapParams::Qp1Auto,
            MapChoice::Ercg => {
                let f = |name: &str, v: &Option<String>| get(name, v).map(|s| s.to_float(ctx.bits()));
                let modulus = Modulus::new(f("k", &self.k)?).map_err(|e| CliError::field("k", e))?;
                MapParams::Ercg(ErcgParams {
                    modulus,
                    gamma_e: f("gamma-e", &self.gamma_e)?,
                    gamma_o: f("gamma-o", &self.gamma_o)?,
                    omega: f("omega", &self.omega)?,
                })
            }
        })
    }
}

pub fn iterate(mut g: GlobalArgs, mut a: IterateArgs) -> Result<Report, CliError> {
    let ctx = g.ctx()?;
    let format = g.format_among(&[Format::Csv, Format::Json])?;
    let map = a.fill()?;
    let params = a.map_params(map, &ctx)?;
    let seed_text = g.seed.get_or_insert_with(|| "2,3".into()).clone();
    let seed = scalar_tuple("seed", &seed_text, 2, &ctx)?;
    let (steps, n0) = (a.steps.expect("filled"), a.n0.expect("filled"));
    if steps == 0 {
        return Err(CliError::field("steps", "must be at least 1"));
    }
    let run = Resolved::new("iterate", &g, format, &a);
    let direction = if a.backward { Direction::Backward } else { Direction::Forward };
    let opts = TrajectoryOptions { direction, ctx };
    let [s0, s1]: [_; 2] = seed.try_into().expect("two entries");
    let outcome = run_trajectory(&params, (s0, s1), n0, steps, &opts).map_err(step_error).map(|traj| {
        let note = traj.termination.as_ref().map(|d| format!("terminated at n = {}: {} ({})", d.n, d.kind, d.message));
        let body = match format {
            Format::Json => run.document("result", to_json(&traj)),
            _ => traj.to_csv(),
        };
        Report { body, code: if traj.completed() { 0 } else { 2 }, note }
    });
    run.finish(outcome)
}

// --------------------------------------------------------------- contours

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ContourArgs {
    /// Exact x range `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Exact y range `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// Contour levels `lo,hi,count`.
    #[arg(long, allow_hyphen_values = true)]
    pub levels: Option<String>,
}

impl ContourArgs {
    fn fill(&mut self) {
        self.x.get_or_insert_with(|| "1/4,4".into());
        self.y.get_or_insert_with(|| "1/4,4".into());
        self.nx.get_or_insert(41);
        self.ny.get_or_insert(41);
        self.levels.get_or_insert_with(|| "3,12,10".into());
    }

    fn spec(&self) -> Result<(GridSpec, Vec<Rational>), CliError> {
        let x = exact_pair("x", self.x.as_deref().unwrap_or_default())?;
        let y = exact_pair("y", self.y.as_deref().unwrap_or_default())?;
        for (name, (lo, hi)) in [("x", &x), ("y", &y)] {
            if lo > hi {
                return Err(CliError::field(name, "bounds must be increasing"));
            }
            if *lo <= 0 && *hi >= 0 {
                return Err(CliError::field(name, "the grid must not touch the axes"));
            }
        }
        let (nx, ny) = (self.nx.unwrap_or_default(), self.ny.unwrap_or_default());
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n == 0 {
                return Err(CliError::field(name, "must be at least 1"));
            }
        }
        let text = self.levels.as_deref().unwrap_or_default();
        let parts: Vec<&str> = text.split(',').collect();
        let [lo, hi, count] = parts.as_slice() else {
            return Err(CliError::field("levels", format!("expected `lo,hi,count`, got `{text}`")));
        };
        let (lo, hi) = exact_pair("levels", &format!("{lo},{hi}"))?;
        let count: usize = count.trim().parse().map_err(|_| CliError::field("levels", format!("`{count}` is not a count")))?;
        Ok((GridSpec { x, y, nx, ny }, level_range(&lo, &hi, count)))
    }
}

pub fn contours(g: GlobalArgs, mut a: ContourArgs) -> Result<Report, CliError> {
    let format = g.format_among(&[Format::Csv, Format::Json])?;
    a.fill();
    let (spec, levels) = a.spec()?;
    let run = Resolved::new("contours", &g, format, &a);
    let grid = contour_grid(&spec, levels).map_err(step_error)?;
    let body = match format {
        Format::Json => run.document("result", to_json(&grid)),
        _ => grid.to_csv(),
    };
    Ok(Report { body, code: 0, note: None })
}

// ----------------------------------------------------------------- thread

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ThreadArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: ContourArgs,
    /// Scale of z_n for the threaded q-map orbit.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Ratio of z_n.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub n0: Option<i64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

pub fn thread(mut g: GlobalArgs, mut a: ThreadArgs) -> Result<Report, CliError> {
    let ctx = g.ctx()?;
    let format = g.format_among(&[Format::Json])?;
    a.grid.fill();
    let (spec, levels) = a.grid.spec()?;
    let qa = scalar("a", a.a.get_or_insert_with(|| "1".into()), &ctx)?;
    let qq = scalar("q", a.q.get_or_insert_with(|| "11/10".into()), &ctx)?;
    let params = MapParams::Qp1(QP1Params::new(qa, qq).map_err(|e| CliError::field("q", e))?);
    let (n0, steps) = (*a.n0.get_or_insert(0), *a.steps.get_or_insert(20));
    if steps == 0 {
        return Err(CliError::field("steps", "must be at least 1"));
    }
    let seed_text = g.seed.get_or_insert_with(|| "2,3".into()).clone();
    let [s0, s1]: [_; 2] = scalar_tuple("seed", &seed_text, 2, &ctx)?.try_into().expect("two entries");
    let run = Resolved::new("thread", &g, format, &a);
    let outcome = (|| {
        let grid = contour_grid(&spec, levels).map_err(step_error)?;
        let opts = TrajectoryOptions { direction: Direction::Forward, ctx };
        let traj = run_trajectory(&params, (s0, s1), n0, steps, &opts).map_err(step_error)?;
        let note = traj.termination.as_ref().map(|d| format!("terminated at n = {}: {} ({})", d.n, d.kind, d.message));
        let body = run.document("result", json!({ "grid": to_json(&grid), "trajectory": to_json(&traj) }));
        Ok(Report { body, code: if traj.completed() { 0 } else { 2 }, note })
    })();
    run.finish(outcome)
}

// ------------------------------------------------------------------ ortho

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct OrthoArgs {
    /// Quadratic coefficient of the quartic weight.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Last reported index.
    #[arg(long)]
    pub n: Option<usize>,
    /// Largest accepted relative residual.
    #[arg(long)]
    pub threshold: Option<f64>,
}

/// Extra values of the weight parameter used to single out the recurrence form.
const RESOLVING_T: [f64; 2] = [0.5, 1.0];

fn ortho_error(e: OrthoError) -> CliError {
    CliError::runtime("ortho-error", e)
}

pub fn ortho(g: GlobalArgs, mut a: OrthoArgs) -> Result<Report, CliError> {
    let ctx = g.ctx()?;
    let format = g.format_among(&[Format::Csv, Format::Json])?;
    let t = scalar("t", a.t.get_or_insert_with(|| "0".into()), &ctx)?.to_f64();
    let n = *a.n.get_or_insert(12);
    let threshold = *a.threshold.get_or_insert(1e-18);
    if n < 2 {
        return Err(CliError::field("n", "must be at least 2"));
    }
    let run = Resolved::new("ortho", &g, format, &a);
    let outcome = (|| {
        let mut ts = vec![t];
        ts.extend(RESOLVING_T.iter().filter(|&&s| s != t));
        // λ up to n + 3 enters the residual at n
        let tables = ts
            .iter()
            .map(|&s| compute_moments(s, n + 3, &ctx).and_then(|m| lambda_coeffs(&m)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(ortho_error)?;
        let res = resolve_string_form(&tables, 2..=n, threshold);
        let Some(form) = res.form else {
            return Err(CliError::runtime("unresolved", "no candidate recurrence separates from the others"));
        };
        let rows = string_rows(&tables[0], form, 2..=n).map_err(ortho_error)?;
        let passed = rows.iter().all(|r| r.residual.abs() < threshold);
        let description = form.describe();
        let body = match format {
            Format::Json => run.document(
                "result",
                json!({ "form": form, "description": description, "candidates": res.candidates, "rows": rows, "passed": passed }),
            ),
            _ => {
                let mut out = String::from("n,lambda,residual\n");
                for r in &rows {
                    let _ = writeln!(out, "{},{},{:e}", r.n, r.lambda, r.residual);
                }
                out
            }
        };
        let verdict = if passed { "all rows within threshold" } else { "rows exceed threshold" };
        Ok(Report { body, code: if passed { 0 } else { 2 }, note: Some(format!("resolved form: {description}; {verdict}")) })
    })();
    run.finish(outcome)
}

// ------------------------------------------------------------------- weyl

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionChoice {
    PlusNext,
    PlusPrev,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct WeylArgs {
    /// Random exact field states per relation.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionChoice>,
}

pub fn weyl_check(mut g: GlobalArgs, mut a: WeylArgs) -> Result<Report, CliError> {
    let format = g.format_among(&[Format::Json])?;
    g.seed.get_or_insert_with(|| "0".into());
    let seed = g.integer_seed()?.expect("filled");
    let trials = *a.trials.get_or_insert(100);
    let conv = match *a.convention.get_or_insert(ConventionChoice::PlusNext) {
        ConventionChoice::PlusNext => SignConvention::PlusNext,
        ConventionChoice::PlusPrev => SignConvention::PlusPrev,
    };
    let run = Resolved::new("weyl check", &g, format, &a);
    let relations = check_relations(trials, seed, conv);
    let translation = check_translation(trials, seed);
    let passed = relations.iter().all(|r| r.passed) && translation.passed();
    let failed = relations.iter().filter(|r| !r.passed).count();
    let body = run.document(
        "result",
        json!({ "relations": to_json(&relations), "translation": to_json(&translation), "passed": passed }),
    );
    let note = (!passed).then(|| format!("{failed} relation checks failed; translation passed: {}", translation.passed()));
    Ok(Report { body, code: if passed { 0 } else { 2 }, note })
}

// -------------------------------------------------------------------- ode

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct OdeArgs {
    /// P1 … P6, NY (three-field system) or P1auto.
    #[arg(long)]
    pub system: Option<String>,
    /// Comma-separated parameters in the order alpha, beta, gamma, delta.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Comma-separated initial state, `w,w'` or `f0,f1,f2`.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Continue through flagged poles instead of stopping.
    #[arg(long)]
    pub no_halt: bool,
}

fn pode_error(e: PodeError) -> CliError {
    match e {
        PodeError::Parameter(m) => CliError::Config(m),
        other => CliError::runtime("ode-error", other),
    }
}

pub fn ode(g: GlobalArgs, mut a: OdeArgs) -> Result<Report, CliError> {
    let ctx = g.ctx()?;
    let format = g.format_among(&[Format::Csv, Format::Json])?;
    let system = a.system.get_or_insert_with(|| "P1".into()).clone();
    let params = scalar_list("params", a.params.get_or_insert_with(String::new), &ctx)?;
    let spec = OdeSpec::from_parts(&system, &params).map_err(|e| {
        let field = if e.to_string().starts_with("unknown system") { "system" } else { "params" };
        CliError::field(field, e)
    })?;
    let dim = spec.dimension();
    let init_text = a.init.get_or_insert_with(|| vec!["0"; dim].join(",")).clone();
    let y0: Vec<_> = scalar_tuple("init", &init_text, dim, &ctx)?.iter().map(|s| s.to_float(ctx.bits())).collect();
    let t0 = scalar("t0", a.t0.get_or_insert_with(|| "0".into()), &ctx)?.to_float(ctx.bits());
    let t1 = scalar("t1", a.t1.get_or_insert_with(|| "1".into()), &ctx)?.to_float(ctx.bits());
    let tol = *a.tol.get_or_insert(1e-10);
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::field("tol", "must lie in (0, 1)"));
    }
    let run = Resolved::new("ode", &g, format, &a);
    let opts = IntegrateOptions { halt_on_pole: !a.no_halt, ..Default::default() };
    let outcome = integrate(&spec, &y0, (&t0, &t1), tol, &ctx, &opts).map_err(pode_error).map(|traj| {
        let clean = traj.completed && traj.events.is_empty();
        let note = traj.events.first().map(|e| format!("pole flagged near t = {} (|w| = {:e})", e.t, e.magnitude));
        let body = match format {
            Format::Json => run.document("result", to_json(&traj)),
            _ => traj.to_csv(),
        };
        Report { body, code: if clean { 0 } else { 2 }, note }
    });
    run.finish(outcome)
}

// ---------------------------------------------------------------- resolve

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PencilChoice {
    Weierstrass,
    Biquadratic,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ResolveArgs {
    #[arg(long, value_enum)]
    pub pencil: Option<PencilChoice>,
    /// Exact coefficient of the Weierstrass pencil.
    #[arg(long, allow_hyphen_values = true)]
    pub g2: Option<String>,
    #[arg(long)]
    pub max_blowups: Option<usize>,
}

fn ivs_error(e: IvsError) -> CliError {
    match e {
        IvsError::Parameter(m) => CliError::Config(m),
        other => CliError::runtime("resolution-error", other),
    }
}

pub fn resolve(g: GlobalArgs, mut a: ResolveArgs) -> Result<Report, CliError> {
    let format = g.format_among(&[Format::Json, Format::Dot])?;
    let sibling_seed = g.integer_seed()?;
    let pencil = match *a.pencil.get_or_insert(PencilChoice::Weierstrass) {
        PencilChoice::Weierstrass => {
            let text = a.g2.get_or_insert_with(|| "1".into());
            let g2 = rational(text.trim()).map_err(|_| CliError::field("g2", format!("`{text}` is not an exact rational")))?;
            a.g2 = Some(rational_to_string(&g2));
            Pencil::weierstrass(&g2)
        }
        PencilChoice::Biquadratic if a.g2.is_some() => return Err(CliError::field("g2", "does not apply to the biquadratic pencil")),
        PencilChoice::Biquadratic => Pencil::biquadratic(),
    };
    let max_blowups = *a.max_blowups.get_or_insert(64);
    let run = Resolved::new("resolve", &g, format, &a);
    let outcome = resolve_with(&pencil, &ResolveOptions { max_blowups, sibling_seed }).map_err(ivs_error).map(|(_, rec)| {
        let graph = dynkin(&rec);
        let ok = rec.resolved && rec.unsupported.is_empty();
        let body = match format {
            Format::Dot => graph.to_dot(),
            _ => run.document(
                "result",
                json!({ "blowups": rec.blowups.len(), "record": to_json(&rec), "dynkin": to_json(&graph), "dot": graph.to_dot() }),
            ),
        };
        let note = format!("{} blow-ups, -2 graph {}", rec.blowups.len(), graph.label);
        Report { body, code: if ok { 0 } else { 2 }, note: Some(note) }
    });
    run.finish(outcome)
}
