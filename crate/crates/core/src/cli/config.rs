use std::path::Path;

use serde_json::Value;
use thiserror::Error;

use crate::model::SystemParams;

/// Top-level keys of a configuration document.
pub const REQUIRED_FIELDS: [&str; 11] = [
    "nu_b",
    "nu_c",
    "kappa_a",
    "kappa_c",
    "gamma_B",
    "g_a",
    "g_c",
    "n_molecules",
    "eps_p",
    "eps_ir",
    "detuning_mode",
];
pub const OPTIONAL_FIELDS: [&str; 1] = ["nu_p"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("config must be a JSON object")]
    NotAnObject,
    #[error("missing field '{0}'")]
    MissingField(String),
    #[error("unknown field '{0}'")]
    UnknownField(String),
    #[error("invalid value for '{field}': {message}")]
    InvalidField { field: String, message: String },
}

/// Parses a configuration document. Field presence is checked before
/// typing so errors name the offending key.
pub fn parse_config(text: &str) -> Result<SystemParams, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = value.as_object().ok_or(ConfigError::NotAnObject)?;
    if let Some(k) = obj
        .keys()
        .find(|k| !REQUIRED_FIELDS.contains(&k.as_str()) && !OPTIONAL_FIELDS.contains(&k.as_str()))
    {
        return Err(ConfigError::UnknownField(k.clone()));
    }
    if let Some(k) = REQUIRED_FIELDS.iter().find(|k| !obj.contains_key(**k)) {
        return Err(ConfigError::MissingField((*k).to_string()));
    }
    // Type errors are attributed to the first field that fails on its own.
    for (k, v) in obj {
        let check = if k == "detuning_mode" {
            serde_json::from_value::<crate::model::DetuningMode>(v.clone()).err()
        } else if k == "nu_p" && v.is_null() {
            None
        } else {
            serde_json::from_value::<f64>(v.clone()).err()
        };
        if let Some(e) = check {
            return Err(ConfigError::InvalidField {
                field: k.clone(),
                message: e.to_string(),
            });
        }
    }
    serde_json::from_value(value).map_err(|e| ConfigError::InvalidField {
        field: "<document>".into(),
        message: e.to_string(),
    })
}

pub fn load_config(path: &Path) -> Result<SystemParams, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}
