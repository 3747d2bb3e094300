//! Flag/config-file merging and the exit-code contract.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

pub const SEED_ENV: &str = "SINGULAR_GEOM_SEED";

/// A failed run: the process exit code and a message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const USAGE: u8 = 1;
    pub const HALFSPACE: u8 = 2;
    pub const DEGENERATE: u8 = 3;
    pub const COUNTEREXAMPLE: u8 = 4;
    pub const DIVERGED: u8 = 5;

    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure::new(Failure::USAGE, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Overlays the non-null fields of `flags` on the JSON object in `config`
/// and reads the result back as `T`. Unknown keys in the file are errors.
pub fn merge<T>(flags: &T, config: Option<&Path>) -> CliResult<T>
where
    T: Serialize + DeserializeOwned,
{
    let mut merged = match config {
        Some(path) => read_config(path)?,
        None => Map::new(),
    };
    let Value::Object(flag_map) = serde_json::to_value(flags).map_err(|e| Failure::usage(e.to_string()))? else {
        unreachable!("argument structs serialize to objects");
    };
    for (k, v) in flag_map {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Failure::usage(format!("config: {e}")))
}

fn read_config(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(Failure::usage(format!("config {} must hold a JSON object", path.display()))),
        Err(e) => Err(Failure::usage(format!("config {}: {e}", path.display()))),
    }
}

/// Seed from the environment, if set.
pub fn env_seed() -> CliResult<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| Failure::usage(format!("{SEED_ENV}='{s}' is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

/// Prints the resolved configuration to stderr.
pub fn log_resolved<T: Serialize>(command: &str, resolved: &T) {
    let json = serde_json::to_string(resolved).unwrap_or_default();
    eprintln!("{command}: {json}");
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}
