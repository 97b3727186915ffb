//! Outcome records shared by every verification suite.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::coeffring::CoeffPoly;
use crate::qtorus::TorusElement;

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Calibrated,
    Reported,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Calibrated => "calibrated",
            Status::Reported => "reported",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A residual in serialized and printable form.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub text: String,
    pub json: Value,
    pub zero: bool,
}

impl Residual {
    pub fn zero() -> Residual {
        Residual { text: "0".into(), json: Value::Null, zero: true }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

impl From<&CoeffPoly> for Residual {
    fn from(p: &CoeffPoly) -> Residual {
        Residual { text: p.to_string(), json: p.to_json(), zero: p.is_zero() }
    }
}

impl From<&TorusElement> for Residual {
    fn from(t: &TorusElement) -> Residual {
        Residual { text: t.to_string(), json: t.to_json(), zero: t.is_zero() }
    }
}

/// Several named residuals, zero only when all of them are.
impl From<Vec<(String, Residual)>> for Residual {
    fn from(parts: Vec<(String, Residual)>) -> Residual {
        let zero = parts.iter().all(|(_, r)| r.zero);
        let text = parts
            .iter()
            .filter(|(_, r)| !r.zero)
            .map(|(k, r)| format!("{k}: {}", r.text))
            .collect::<Vec<_>>()
            .join("; ");
        let json = Value::Object(
            parts.into_iter().filter(|(_, r)| !r.zero).map(|(k, r)| (k, r.json)).collect(),
        );
        if zero {
            Residual::zero()
        } else {
            Residual { text, json, zero }
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub suite: String,
    pub label: String,
    pub check: String,
    pub status: Status,
    pub residual: Residual,
    pub payload: BTreeMap<String, Value>,
}

impl VerificationReport {
    /// `pass` when the residual vanishes, `fail` otherwise.
    pub fn from_residual(suite: &str, label: &str, check: &str, residual: Residual) -> VerificationReport {
        let status = if residual.is_zero() { Status::Pass } else { Status::Fail };
        VerificationReport {
            suite: suite.into(),
            label: label.into(),
            check: check.into(),
            status,
            residual,
            payload: BTreeMap::new(),
        }
    }

    /// An informational record; the residual, if any, is kept for audit.
    pub fn reported(suite: &str, label: &str, check: &str, residual: Residual) -> VerificationReport {
        let mut r = VerificationReport::from_residual(suite, label, check, residual);
        r.status = Status::Reported;
        r
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.payload.insert(key.into(), value.into());
        self
    }

    pub fn insert(&mut self, key: &str, value: impl Into<Value>) {
        self.payload.insert(key.into(), value.into());
    }

    /// Marks a failed identity as repaired by solved constants.
    pub fn calibrate(&mut self, key: &str, solved: impl Into<Value>) {
        self.payload.insert(key.into(), solved.into());
        if self.status == Status::Fail {
            self.status = Status::Calibrated;
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Sort key that gives a deterministic output order.
    pub fn key(&self) -> (String, String, String) {
        (self.suite.clone(), self.label.clone(), self.check.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "label": self.label,
            "check": self.check,
            "status": self.status,
            "residual": self.residual.json,
            "payload": self.payload,
        })
    }

    /// One line: status, identifiers and (unless passing) a short residual digest.
    pub fn text_line(&self) -> String {
        let head = format!("{:<10} {:<10} {:<11} {}", self.status, self.suite, self.label, self.check);
        if self.residual.is_zero() {
            head
        } else {
            format!(
                "{head}  residual: {}  [json: {}/{}/{}]",
                digest(&self.residual.text, 120),
                self.suite,
                self.label,
                self.check
            )
        }
    }
}

/// Truncates `s` to at most `max` characters, marking the cut with `...`.
pub fn digest(s: &str, max: usize) -> String {
    if s.chars().count() <= max {
        return s.to_string();
    }
    let keep: String = s.chars().take(max.saturating_sub(3)).collect();
    format!("{keep}...")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_respects_bound() {
        let long = "x".repeat(500);
        assert_eq!(digest(&long, 120).chars().count(), 120);
        assert_eq!(digest("abc", 120), "abc");
    }

    #[test]
    fn status_tracks_residual() {
        let r = VerificationReport::from_residual("s", "D4", "c", Residual::zero());
        assert!(r.passed());
        let bad = Residual::from(&CoeffPoly::std("g1"));
        let mut r = VerificationReport::from_residual("s", "D4", "c", bad);
        assert_eq!(r.status, Status::Fail);
        r.calibrate("constant", "1/1");
        assert_eq!(r.status, Status::Calibrated);
        assert!(r.text_line().contains("residual: g1"));
    }

    #[test]
    fn combined_residuals() {
        let parts = vec![
            ("a".to_string(), Residual::zero()),
            ("b".to_string(), Residual::from(&CoeffPoly::std("2"))),
        ];
        let r = Residual::from(parts);
        assert!(!r.is_zero());
        assert_eq!(r.text, "b: 2");
    }
}
