//! Layering of command-line flags over an optional JSON config file.
//!
//! Every argument struct serializes with one key per flag (kebab-case, `null`
//! when unset). A config file is a flat JSON object over the same keys; flags
//! that were given win over the file, and defaults fill whatever is left.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use painleve_core::{PrecisionContext, Scalar};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag, bad config file or bad parameter value; exit 1.
    Config(String),
    /// A module stopped with a diagnostic; exit 2.
    Runtime { kind: String, message: String },
}

impl CliError {
    pub fn field(name: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Config(format!("field `{name}`: {msg}"))
    }

    pub fn runtime(kind: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Runtime { kind: kind.to_string(), message: msg.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime { .. } => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime { kind, message } => write!(f, "{kind}: {message}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Dot,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Dot => "dot",
        }
    }
}

/// Accepts a JSON string or number so a config file may write `"seed": 7`.
fn string_or_number<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    match Option::<Value>::deserialize(d)? {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(Value::Number(n)) => Ok(Some(n.to_string())),
        Some(other) => Err(serde::de::Error::custom(format!("expected a string or number, got {other}"))),
    }
}

#[derive(clap::Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct GlobalArgs {
    /// Working precision in bits for inexact values.
    #[arg(long, global = true)]
    pub bits: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// RNG seed, or the initial pair `w0,w1` for `iterate` and `thread`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(deserialize_with = "string_or_number")]
    pub seed: Option<String>,
    /// JSON config file; flags given on the command line override it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn ctx(&self) -> Result<PrecisionContext, CliError> {
        let bits = self.bits.unwrap_or(painleve_core::precision::DEFAULT_BITS);
        PrecisionContext::new(bits).map_err(|e| CliError::field("bits", e))
    }

    /// The requested format if it is one of `allowed`, else the first of them.
    pub fn format_among(&self, allowed: &[Format]) -> Result<Format, CliError> {
        match self.format {
            None => Ok(allowed[0]),
            Some(f) if allowed.contains(&f) => Ok(f),
            Some(f) => {
                let names: Vec<_> = allowed.iter().map(|a| a.name()).collect();
                Err(CliError::field("format", format!("`{}` is not available here; use one of {}", f.name(), names.join(", "))))
            }
        }
    }

    pub fn integer_seed(&self) -> Result<Option<u64>, CliError> {
        self.seed
            .as_deref()
            .map(|s| s.trim().parse::<u64>().map_err(|_| CliError::field("seed", format!("`{s}` is not a nonnegative integer"))))
            .transpose()
    }
}

pub fn load_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::field("config", format!("{}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::field("config", "top level must be a JSON object")),
        Err(e) => Err(CliError::field("config", format!("{}: {e}", path.display()))),
    }
}

fn object<T: Serialize>(v: &T) -> Map<String, Value> {
    match serde_json::to_value(v) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

/// Keys understood by a struct, taken from its serialized default.
pub fn known_keys<T: Serialize + Default>() -> BTreeSet<String> {
    object(&T::default()).into_iter().map(|(k, _)| k).collect()
}

/// Overlays the flags that were given onto the config file entries for the
/// same keys; unset flags are `null` and boolean flags are only ever raised.
pub fn layer<T: Serialize + DeserializeOwned + Default>(cli: &T, file: &Map<String, Value>) -> Result<T, CliError> {
    let mut merged = Map::new();
    for key in known_keys::<T>() {
        if let Some(v) = file.get(&key) {
            merged.insert(key, v.clone());
        }
    }
    for (k, v) in object(cli) {
        if !v.is_null() && v != Value::Bool(false) {
            merged.insert(k, v);
        }
    }
    serde_path_to_error::deserialize(Value::Object(merged)).map_err(|e| CliError::field(&e.path().to_string(), e.inner()))
}

pub fn reject_unknown(file: &Map<String, Value>, known: &BTreeSet<String>) -> Result<(), CliError> {
    match file.keys().find(|k| !known.contains(*k) && *k != "config") {
        Some(k) => Err(CliError::field(k, "unknown key in config file")),
        None => Ok(()),
    }
}

pub fn scalar(field: &str, text: &str, ctx: &PrecisionContext) -> Result<Scalar, CliError> {
    Scalar::parse(text, ctx).map_err(|e| CliError::field(field, format!("`{text}`: {e}")))
}

/// A comma-separated list of scalars.
pub fn scalar_list(field: &str, text: &str, ctx: &PrecisionContext) -> Result<Vec<Scalar>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|part| scalar(field, part, ctx)).collect()
}

/// A comma-separated list of exactly `n` scalars.
pub fn scalar_tuple(field: &str, text: &str, n: usize, ctx: &PrecisionContext) -> Result<Vec<Scalar>, CliError> {
    let v = scalar_list(field, text, ctx)?;
    if v.len() != n {
        return Err(CliError::field(field, format!("expected {n} comma-separated values, got {}", v.len())));
    }
    Ok(v)
}
