use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// How `measured` must compare with `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Le,
    Lt,
    Ge,
    Gt,
}

/// Outcome of one numerical check. `pass` follows from `measured`, `bound`,
/// `relation` and the `slack` tolerance alone, so it can be re-derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub name: String,
    pub measured: Vec<f64>,
    /// One bound per measured value, or a single bound shared by all.
    pub bound: Vec<f64>,
    pub relation: Relation,
    pub pass: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub context: BTreeMap<String, serde_json::Value>,
    /// Sweep variable for plot-ready output (one entry per measured value).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abscissa: Option<Vec<f64>>,
}

impl DiagnosticReport {
    pub fn check(name: impl Into<String>, measured: Vec<f64>, bound: Vec<f64>, relation: Relation, slack: f64) -> Self {
        let mut tolerances = BTreeMap::new();
        tolerances.insert("slack".to_string(), slack);
        let mut r = DiagnosticReport {
            name: name.into(),
            measured,
            bound,
            relation,
            pass: false,
            tolerances,
            context: BTreeMap::new(),
            abscissa: None,
        };
        r.pass = r.recheck();
        r
    }

    pub fn with_context(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.context.insert(key.to_string(), value.into());
        self
    }

    pub fn with_tolerance(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    pub fn with_abscissa(mut self, x: Vec<f64>) -> Self {
        self.abscissa = Some(x);
        self
    }

    /// Marks the report failed regardless of the comparison, e.g. when a
    /// precondition was not met. Recorded in the context.
    pub fn fail_because(mut self, reason: impl Into<String>) -> Self {
        self.pass = false;
        self.context.insert("failure".into(), serde_json::Value::String(reason.into()));
        self
    }

    /// Recomputes the verdict from the stored record.
    pub fn recheck(&self) -> bool {
        if self.context.contains_key("failure") {
            return false;
        }
        let slack = self.tolerances.get("slack").copied().unwrap_or(0.0);
        if self.measured.is_empty() || self.bound.is_empty() {
            return false;
        }
        if self.bound.len() != 1 && self.bound.len() != self.measured.len() {
            return false;
        }
        self.measured.iter().enumerate().all(|(i, &m)| {
            let b = if self.bound.len() == 1 { self.bound[0] } else { self.bound[i] };
            match self.relation {
                Relation::Le => m <= b + slack,
                Relation::Lt => m < b + slack,
                Relation::Ge => m >= b - slack,
                Relation::Gt => m > b - slack,
            }
        })
    }
}
