//! Check records and verification reports.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Outcome of one named identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub samples: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckRecord {
    pub fn pass(name: impl Into<String>, anchor: impl Into<String>, samples: usize) -> Self {
        CheckRecord { name: name.into(), anchor: anchor.into(), samples, passed: true, detail: None, witness: None }
    }

    pub fn fail(name: impl Into<String>, anchor: impl Into<String>, samples: usize, witness: String) -> Self {
        CheckRecord { name: name.into(), anchor: anchor.into(), samples, passed: false, detail: None, witness: Some(witness) }
    }

    pub fn from_result(name: impl Into<String>, anchor: impl Into<String>, samples: usize, result: Result<(), String>) -> Self {
        match result {
            Ok(()) => CheckRecord::pass(name, anchor, samples),
            Err(w) => CheckRecord::fail(name, anchor, samples, w),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn renamed(mut self, name: impl Into<String>, anchor: impl Into<String>) -> Self {
        self.name = name.into();
        self.anchor = anchor.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub poly_degree: u32,
    pub truncation: u32,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    /// Assembles a report; checks are sorted by name.
    pub fn new(suite: &str, seed: u64, samples: usize, poly_degree: u32, truncation: u32, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().all(|c| c.passed);
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            suite: suite.to_string(),
            seed,
            samples,
            poly_degree,
            truncation,
            passed,
            wall_time_ms: None,
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
