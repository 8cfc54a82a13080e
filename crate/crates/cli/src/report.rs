//! Verification report written by `verify`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// One checked property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    /// Human-readable name of the property.
    pub anchor: String,
    /// `None` when the computation itself failed.
    pub residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub params: Map<String, Value>,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(suite: &str, params: Map<String, Value>) -> Self {
        Self {
            suite: suite.to_string(),
            params,
            cases: Vec::new(),
            summary: Summary {
                total: 0,
                passed: 0,
            },
        }
    }

    /// Records a residual. Non-finite residuals always fail.
    pub fn check(
        &mut self,
        id: impl Into<String>,
        anchor: impl Into<String>,
        residual: f64,
        tol: f64,
    ) {
        let finite = residual.is_finite();
        self.push(Case {
            id: id.into(),
            anchor: anchor.into(),
            residual: finite.then_some(residual),
            tol,
            pass: finite && residual <= tol,
        });
    }

    /// Records the outcome of a fallible computation; an error is a failed
    /// case with no residual.
    pub fn check_result<E>(
        &mut self,
        id: impl Into<String>,
        anchor: impl Into<String>,
        residual: Result<f64, E>,
        tol: f64,
    ) {
        self.check(id, anchor, residual.unwrap_or(f64::NAN), tol);
    }

    pub fn push(&mut self, case: Case) {
        self.summary.total += 1;
        if case.pass {
            self.summary.passed += 1;
        }
        self.cases.push(case);
    }

    /// Appends `other`'s cases with ids prefixed by its suite name.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.params
            .insert(other.suite.clone(), Value::Object(other.params));
        for mut case in other.cases {
            case.id = format!("{}/{}", other.suite, case.id);
            self.push(case);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}
