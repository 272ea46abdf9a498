//! Verification reports with concrete witnesses.

use serde::Serialize;
use std::fmt;

const WITNESSES_PER_CONDITION: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: String,
    pub witness: String,
}

/// Outcome of an exhaustive check. Empty means the check passed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub subject: String,
    pub violations: Vec<Violation>,
    /// Checks that were not run, with the reason.
    pub skipped: Vec<String>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report { subject: subject.into(), ..Default::default() }
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Records a violation, keeping only the first few witnesses per condition.
    pub fn push(&mut self, condition: impl Into<String>, witness: impl Into<String>) {
        let condition = condition.into();
        let seen = self.violations.iter().filter(|v| v.condition == condition).count();
        if seen < WITNESSES_PER_CONDITION {
            self.violations.push(Violation { condition, witness: witness.into() });
        }
    }

    pub fn skip(&mut self, what: impl Into<String>) {
        self.skipped.push(what.into());
    }

    pub fn merge(&mut self, prefix: &str, other: Report) {
        for v in other.violations {
            self.push(format!("{prefix}{}", v.condition), v.witness);
        }
        for s in other.skipped {
            self.skipped.push(format!("{prefix}{s}"));
        }
    }

    pub fn has(&self, condition: &str) -> bool {
        self.violations.iter().any(|v| v.condition.contains(condition))
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "{}: ok", self.subject);
        }
        write!(f, "{}:", self.subject)?;
        for v in &self.violations {
            write!(f, " [{}: {}]", v.condition, v.witness)?;
        }
        Ok(())
    }
}
