use std::collections::BTreeMap;

use serde::Serialize;

/// One certificate: what was measured, against which tolerance, and the
/// property it stands for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub anchor: String,
    pub measured: BTreeMap<String, f64>,
    pub tolerance: f64,
    /// `None` for descriptive records that carry no verdict.
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(check: &str, anchor: &str, tolerance: f64) -> Self {
        Self { check: check.into(), anchor: anchor.into(), measured: BTreeMap::new(), tolerance, pass: None, note: None }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.measured.insert(key.into(), value);
        self
    }

    pub fn verdict(mut self, pass: bool) -> Self {
        self.pass = Some(pass);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.pass == Some(true)
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.measured.get(key).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    /// Always "closed truncation": nothing here certifies the infinite system.
    pub system: String,
    pub n_shells: usize,
    pub frame_scale: f64,
    pub records: Vec<CheckRecord>,
}

impl DiagnosticsReport {
    pub fn new(n_shells: usize, frame_scale: f64) -> Self {
        Self { system: "closed truncation".into(), n_shells, frame_scale, records: Vec::new() }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn get(&self, check: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check == check)
    }

    pub fn pass_count(&self) -> usize {
        self.records.iter().filter(|r| r.pass == Some(true)).count()
    }

    pub fn fail_count(&self) -> usize {
        self.records.iter().filter(|r| r.pass == Some(false)).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values serialize")
    }
}
