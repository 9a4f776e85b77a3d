use serde::Serialize;
use serde_json::Value;

use crate::model::SystemParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorCount {
    pub message: String,
    pub count: usize,
}

/// Sidecar describing how an output file was produced. Contains no
/// timestamps, so identical runs give identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Parameter set after config loading and flag overrides.
    pub params: SystemParams,
    pub warnings: Vec<String>,
    /// Command-specific settings (grid, probe frequency, preset name...).
    pub settings: Value,
    /// Output file names, relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub errors: Vec<ErrorCount>,
}

impl RunManifest {
    pub fn new(command: &str, params: SystemParams, warnings: Vec<String>, settings: Value) -> Self {
        Self {
            tool: "molopt",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            params,
            warnings,
            settings,
            outputs: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn with_errors(mut self, errors: &[(String, usize)]) -> Self {
        self.errors = errors
            .iter()
            .map(|(message, count)| ErrorCount { message: message.clone(), count: *count })
            .collect();
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
