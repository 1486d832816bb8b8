//! `--config` files: flat `key = value` lines or a JSON object, turned into
//! flags placed ahead of the real command line so explicit flags win.

use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// Keys a config file may set, matching the long flag names.
pub const KEYS: &[&str] = &[
    "m", "n", "z", "kappa", "delta", "seed", "trials", "tol", "out", "format", "limit", "rule", "n-lo", "n-hi",
    "mode", "form", "max-depth", "csv", "b", "timing",
];

const SWITCHES: &[&str] = &["timing"];

pub fn load(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let pairs = if text.trim_start().starts_with('{') {
        parse_json(text)?
    } else {
        parse_lines(text)?
    };
    for (k, _) in &pairs {
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::Usage(format!("unknown config key {k:?}")));
        }
    }
    Ok(pairs)
}

fn parse_lines(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {} is not key = value", i + 1)))?;
        let v = v.trim().trim_matches('"');
        out.push((normalize(k.trim()), v.to_string()));
    }
    Ok(out)
}

fn parse_json(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config json: {e}")))?;
    let Value::Object(map) = v else {
        return Err(CliError::Usage("config json must be an object".into()));
    };
    map.into_iter()
        .map(|(k, v)| {
            let s = match v {
                Value::String(s) => s,
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                other => return Err(CliError::Usage(format!("config value for {k:?} must be scalar, got {other}"))),
            };
            Ok((normalize(&k), s))
        })
        .collect()
}

fn normalize(k: &str) -> String {
    k.trim_start_matches("--").replace('_', "-")
}

/// Flags for the pairs, with switches expanded only when true.
pub fn to_args(pairs: &[(String, String)]) -> Result<Vec<String>, CliError> {
    let mut args = Vec::new();
    for (k, v) in pairs {
        if SWITCHES.contains(&k.as_str()) {
            match v.as_str() {
                "true" => args.push(format!("--{k}")),
                "false" => {}
                _ => return Err(CliError::Usage(format!("{k} must be true or false"))),
            }
        } else {
            args.push(format!("--{k}"));
            args.push(v.clone());
        }
    }
    Ok(args)
}
