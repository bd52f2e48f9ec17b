//! Machine-readable reports.

use std::collections::BTreeMap;

use relift::lifting::{Counterexample, Verdict};
use serde::Serialize;
use serde_json::Value as Json;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleJson {
    pub note: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub sets: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub relations: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
}

impl From<&Counterexample> for CounterexampleJson {
    fn from(c: &Counterexample) -> Self {
        fn texts<T: ToString>(items: &[(String, T)]) -> BTreeMap<String, String> {
            items.iter().map(|(n, x)| (n.clone(), x.to_string())).collect()
        }
        CounterexampleJson {
            note: c.note.clone(),
            sets: texts(&c.sets),
            relations: texts(&c.relations),
            functions: texts(&c.functions),
            values: texts(&c.values),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    pub name: String,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleJson>,
}

impl CheckJson {
    pub fn new(name: impl Into<String>, verdict: &Verdict) -> Self {
        CheckJson {
            suite: None,
            name: name.into(),
            verdict: verdict.label(),
            informational: false,
            reason: match verdict {
                Verdict::Skipped(r) => Some(r.clone()),
                _ => None,
            },
            counterexample: verdict.counterexample().map(Into::into),
        }
    }

    pub fn suite(mut self, suite: impl Into<String>) -> Self {
        self.suite = Some(suite.into());
        self
    }

    pub fn informational(mut self, informational: bool) -> Self {
        self.informational = informational;
        self
    }

    pub fn is_failure(&self) -> bool {
        !self.informational && self.verdict == "fail"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub informational: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: u32,
    pub command: String,
    pub arguments: BTreeMap<String, Json>,
    pub outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckJson>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub results: BTreeMap<String, Json>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            version: REPORT_VERSION,
            command: command.to_string(),
            arguments: BTreeMap::new(),
            outcome: "pass",
            summary: None,
            checks: Vec::new(),
            results: BTreeMap::new(),
            elapsed_ms: None,
        }
    }

    pub fn arg(&mut self, key: &str, value: impl Serialize) {
        self.arguments.insert(key.to_string(), serde_json::to_value(value).expect("serializable argument"));
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_string(), serde_json::to_value(value).expect("serializable result"));
    }

    /// Sets the outcome and summary from the checks.
    pub fn finish(&mut self) {
        let count = |f: &dyn Fn(&CheckJson) -> bool| self.checks.iter().filter(|c| f(c)).count();
        let summary = Summary {
            passed: count(&|c| !c.informational && c.verdict == "pass"),
            failed: count(&|c| c.is_failure()),
            skipped: count(&|c| !c.informational && c.verdict == "skipped"),
            informational: count(&|c| c.informational),
        };
        if summary.failed > 0 {
            self.outcome = "fail";
        }
        if !self.checks.is_empty() {
            self.summary = Some(summary);
        }
    }

    pub fn failed(&self) -> bool {
        self.outcome == "fail"
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable report");
        s.push('\n');
        s
    }
}
