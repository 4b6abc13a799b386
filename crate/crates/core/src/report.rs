//! Structured check reports: per-identity pass/fail records with residual
//! witnesses and the computed invariants of a structure.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StructureId {
    pub name: String,
    pub hash: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// Location and canonical expression string of a residual witness.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Witness {
    pub location: String,
    pub expr: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub suite: String,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub elapsed_ms: u64,
}

/// Invariants of the structure, as canonical expression strings.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct ComputedValues {
    /// Tr N^k for k = 1..=kmax.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace_powers: Vec<String>,
    /// I_k = Tr(N^k)/k for k = 1..=kmax.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fundamental_functions: Vec<String>,
    /// X^(k) component tuples for k = 1..=kmax (admissible pairs only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modular_fields: Vec<String>,
    /// xi^(N) component tuple.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_form: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckReport {
    pub structure: StructureId,
    pub checks: Vec<CheckRecord>,
    pub computed: ComputedValues,
    pub summary: Summary,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn recompute_summary(&mut self) {
        let mut s = Summary::default();
        for c in &self.checks {
            match c.status {
                CheckStatus::Pass => s.passed += 1,
                CheckStatus::Fail => s.failed += 1,
                CheckStatus::Skipped => s.skipped += 1,
            }
        }
        self.summary = s;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<CheckReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Copy with all elapsed times zeroed, for golden-file comparison.
    pub fn normalized(&self) -> CheckReport {
        let mut out = self.clone();
        for c in &mut out.checks {
            c.elapsed_ms = 0;
        }
        out
    }

    /// Human-readable rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "structure {} (sha256:{})\n",
            self.structure.name, self.structure.hash
        ));
        let mut suite = String::new();
        for c in &self.checks {
            if c.suite != suite {
                suite = c.suite.clone();
                out.push_str(&format!("suite {suite}\n"));
            }
            let tag = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "skip",
            };
            out.push_str(&format!("  [{tag}] {:<28} ({} ms)", c.name, c.elapsed_ms));
            if let Some(reason) = &c.skip_reason {
                out.push_str(&format!("  requires: {reason}"));
            }
            if let Some(note) = &c.note {
                out.push_str(&format!("  [{note}]"));
            }
            out.push('\n');
            if let Some(w) = &c.witness {
                out.push_str(&format!("         witness: {} = {}\n", w.location, w.expr));
            }
        }
        if !self.computed.trace_powers.is_empty() {
            out.push_str("computed\n");
            for (k, v) in self.computed.trace_powers.iter().enumerate() {
                out.push_str(&format!("  Tr N^{} = {}\n", k + 1, v));
            }
            for (k, v) in self.computed.fundamental_functions.iter().enumerate() {
                out.push_str(&format!("  I_{} = {}\n", k + 1, v));
            }
            for (k, v) in self.computed.modular_fields.iter().enumerate() {
                out.push_str(&format!("  X^({}) = {}\n", k + 1, v));
            }
            if let Some(xi) = &self.computed.xi_form {
                out.push_str(&format!("  xi^(N) = {xi}\n"));
            }
        }
        out.push_str(&format!(
            "result: {} passed, {} failed, {} skipped\n",
            self.summary.passed, self.summary.failed, self.summary.skipped
        ));
        out
    }
}
