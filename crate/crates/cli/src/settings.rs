use std::collections::BTreeMap;
use std::path::Path;

use anyhow::anyhow;
use serde::Serialize;

use crate::{read_text, CliError, CliResult};

pub const CONFIG_ENV: &str = "RBENCH_CONFIG";

/// Provenance echoed at the top of every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub tool: String,
    pub command: String,
    pub overrides: BTreeMap<String, String>,
}

impl RunMeta {
    pub fn new(command: &str, overrides: &BTreeMap<String, String>) -> Self {
        Self {
            tool: format!("rbench {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            overrides: overrides.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("run metadata serializes")
    }

    /// Single-line header for the JSONL and CSV outputs.
    pub fn header_line(&self) -> String {
        serde_json::to_string(self).expect("run metadata serializes")
    }
}

fn flatten(prefix: &str, value: &toml::Value, out: &mut BTreeMap<String, String>) -> CliResult<()> {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                flatten(&key(k), v, out)?;
            }
        }
        toml::Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        toml::Value::Integer(i) => {
            out.insert(prefix.to_string(), i.to_string());
        }
        toml::Value::Float(f) => {
            out.insert(prefix.to_string(), f.to_string());
        }
        other => {
            return Err(CliError::io(anyhow!(
                "config key `{prefix}` has unsupported value {other}"
            )))
        }
    }
    Ok(())
}

/// Reads a TOML config file into flat `section.key` overrides.
pub fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = read_text(path)?;
    let value: toml::Value = text
        .parse()
        .map_err(|e| CliError::io(anyhow!("invalid config file {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    flatten("", &value, &mut out)?;
    Ok(out)
}

/// Config file named by `$RBENCH_CONFIG` first, then `--set` flags on top.
pub fn collect_overrides(flags: &[String]) -> CliResult<BTreeMap<String, String>> {
    let mut out = match std::env::var_os(CONFIG_ENV) {
        Some(path) if !path.is_empty() => read_config_file(Path::new(&path))?,
        _ => BTreeMap::new(),
    };
    for flag in flags {
        let (k, v) = rbench_core::config::parse_override(flag).map_err(CliError::io)?;
        out.insert(k, v);
    }
    Ok(out)
}
