//! Machine-checkable pass/fail evidence.

use std::fmt;

use serde::{Deserialize, Serialize};

/// One inequality `lhs <= rhs` evaluated numerically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `lhs <= rhs + tol`.
    pub fn le(label: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self { label: label.into(), lhs, rhs, passed: lhs <= rhs + tol }
    }

    /// Passes when `|lhs - rhs| <= tol`.
    pub fn eq(label: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self { label: label.into(), lhs, rhs, passed: (lhs - rhs).abs() <= tol }
    }

    pub fn flag(label: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self { label: label.into(), lhs: v, rhs: 1.0, passed: ok }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Human-readable descriptions of every failed check.
    pub violations: Vec<String>,
}

impl Certificate {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), passed: true, checks: Vec::new(), violations: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        if !check.passed {
            self.passed = false;
            self.violations.push(format!("{}: {:.6e} > {:.6e}", check.label, check.lhs, check.rhs));
        }
        self.checks.push(check);
    }

    /// Records a failure that is not a numeric comparison.
    pub fn fail(&mut self, message: impl Into<String>) {
        self.passed = false;
        self.violations.push(message.into());
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn merge(&mut self, other: Certificate) {
        for c in other.checks {
            self.checks.push(Check { label: format!("{}/{}", other.name, c.label), ..c });
        }
        if !other.passed {
            self.passed = false;
            self.violations.extend(other.violations.into_iter().map(|v| format!("{}/{v}", other.name)));
        }
    }

    pub fn min_slack(&self) -> f64 {
        self.checks.iter().map(Check::slack).fold(f64::INFINITY, f64::min)
    }

    pub fn find(&self, label: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.label == label)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.name, if self.passed { "PASS" } else { "FAIL" })?;
        for v in &self.violations {
            writeln!(f, "  violation: {v}")?;
        }
        Ok(())
    }
}
