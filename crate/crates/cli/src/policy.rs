//! Acceptance policy: which statuses each check may end in.
//!
//! One rule per line, `suite label check status[|status...]`, with `*`
//! as a whole-field wildcard or a trailing `*` as a prefix wildcard.
//! The last matching rule decides. Text after `#` is a comment.

use std::fmt;

use pvc_core::{Status, VerificationReport};

pub const DEFAULT_POLICY: &str = include_str!("../policy/acceptance.policy");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub suite: String,
    pub label: String,
    pub check: String,
    pub allowed: Vec<Status>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for PolicyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "policy line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for PolicyError {}

#[derive(Clone, Debug, Default)]
pub struct Policy {
    pub rules: Vec<Rule>,
}

fn parse_status(s: &str) -> Option<Status> {
    match s {
        "pass" => Some(Status::Pass),
        "fail" => Some(Status::Fail),
        "calibrated" => Some(Status::Calibrated),
        "reported" => Some(Status::Reported),
        _ => None,
    }
}

fn matches(pattern: &str, value: &str) -> bool {
    match pattern.strip_suffix('*') {
        Some(prefix) => value.starts_with(prefix),
        None => pattern == value,
    }
}

/// A report whose status the policy does not allow.
#[derive(Clone, Debug)]
pub struct Violation {
    pub suite: String,
    pub label: String,
    pub check: String,
    pub status: Status,
    pub rule_line: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = self.rule_line.map_or("no matching rule".to_string(), |l| format!("rule at line {l}"));
        write!(f, "{} {} {} is {} ({rule})", self.suite, self.label, self.check, self.status)
    }
}

impl Policy {
    pub fn parse(src: &str) -> Result<Policy, PolicyError> {
        let mut rules = Vec::new();
        for (n, raw) in src.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            let [suite, label, check, statuses] = fields.as_slice() else {
                return Err(PolicyError { line, msg: format!("expected 4 fields, found {}", fields.len()) });
            };
            let allowed = statuses
                .split('|')
                .map(|s| parse_status(s).ok_or_else(|| PolicyError { line, msg: format!("unknown status `{s}`") }))
                .collect::<Result<Vec<_>, _>>()?;
            rules.push(Rule {
                suite: suite.to_string(),
                label: label.to_string(),
                check: check.to_string(),
                allowed,
                line,
            });
        }
        Ok(Policy { rules })
    }

    pub fn rule_for(&self, r: &VerificationReport) -> Option<&Rule> {
        self.rules
            .iter()
            .rev()
            .find(|rule| matches(&rule.suite, &r.suite) && matches(&rule.label, &r.label) && matches(&rule.check, &r.check))
    }

    pub fn violations(&self, reports: &[VerificationReport]) -> Vec<Violation> {
        reports
            .iter()
            .filter_map(|r| {
                let rule = self.rule_for(r);
                let ok = rule.is_some_and(|rule| rule.allowed.contains(&r.status));
                (!ok).then(|| Violation {
                    suite: r.suite.clone(),
                    label: r.label.clone(),
                    check: r.check.clone(),
                    status: r.status,
                    rule_line: rule.map(|x| x.line),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pvc_core::Residual;

    fn report(suite: &str, label: &str, check: &str, status: Status) -> VerificationReport {
        let mut r = VerificationReport::from_residual(suite, label, check, Residual::zero());
        r.status = status;
        r
    }

    #[test]
    fn last_rule_wins() {
        let p = Policy::parse("* * * pass\nquantum * qcubic pass|calibrated # documented\n").unwrap();
        assert!(p.violations(&[report("quantum", "D4", "qcubic", Status::Calibrated)]).is_empty());
        assert_eq!(p.violations(&[report("quantum", "D4", "qcomm", Status::Calibrated)]).len(), 1);
    }

    #[test]
    fn prefix_wildcard() {
        let p = Policy::parse("dynamics D4 laurent_* reported").unwrap();
        assert!(p.violations(&[report("dynamics", "D4", "laurent_word_12", Status::Reported)]).is_empty());
    }

    #[test]
    fn bad_lines() {
        assert_eq!(Policy::parse("a b c").unwrap_err().line, 1);
        assert!(Policy::parse("\n* * * great").is_err());
    }

    #[test]
    fn bundled_policy_parses() {
        assert!(!Policy::parse(DEFAULT_POLICY).unwrap().rules.is_empty());
    }
}
