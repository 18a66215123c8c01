use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use gmnl::Backend;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
}

impl Check {
    pub fn flag(name: &str, passed: bool) -> Self {
        Check { name: name.into(), passed, value: None, expected: None }
    }

    pub fn value(name: &str, value: impl ToString, passed: bool) -> Self {
        Check { name: name.into(), passed, value: Some(value.to_string()), expected: None }
    }

    pub fn compare(name: &str, value: impl ToString, expected: impl ToString, passed: bool) -> Self {
        Check { name: name.into(), passed, value: Some(value.to_string()), expected: Some(expected.to_string()) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the command line arguments and every input file.
    pub inputs_digest: String,
    pub backend: Backend,
    pub tolerance: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Default)]
pub struct Digest256 {
    h: Sha256,
}

impl Digest256 {
    pub fn feed(&mut self, part: &[u8]) {
        self.h.update((part.len() as u64).to_le_bytes());
        self.h.update(part);
    }

    pub fn finish(self) -> String {
        hex::encode(self.h.finalize())
    }
}

impl RunReport {
    pub fn new(command: &str, digest: String, backend: Backend, tolerance: f64, checks: Vec<Check>, data: Value) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        RunReport { command: command.into(), inputs_digest: digest, backend, tolerance, checks, passed, data, wall_time_ms: None }
    }
}
