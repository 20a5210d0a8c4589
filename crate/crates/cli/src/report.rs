use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub value: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, value: impl Serialize) -> Self {
        Check {
            name: name.into(),
            pass,
            value: serde_json::to_value(value).expect("report values serialize"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// sha256 over every input file, each prefixed by its byte length.
    pub inputs_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub pass: bool,
    pub results: Vec<Check>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub output: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub elapsed_ms: f64,
}

impl RunReport {
    pub fn new(command: &str, inputs: &Inputs) -> Self {
        RunReport {
            command: command.into(),
            inputs_digest: inputs.digest(),
            seed: None,
            pass: true,
            results: Vec::new(),
            output: Value::Null,
            warnings: Vec::new(),
            elapsed_ms: 0.0,
        }
    }

    pub fn check(&mut self, check: Check) {
        self.pass &= check.pass;
        self.results.push(check);
    }

    pub fn finish(mut self, elapsed: Duration) -> Self {
        self.elapsed_ms = elapsed.as_secs_f64() * 1000.0;
        self
    }
}

/// Input files read so far, in order.
#[derive(Default)]
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn digest(&self) -> String {
        hex::encode(self.hasher.clone().finalize())
    }
}
