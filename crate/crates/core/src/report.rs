use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationEntry {
    pub check: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Named invariant checks with the first violation of each.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn pass(&mut self, check: &str) {
        self.entries.push(ValidationEntry { check: check.into(), passed: true, witness: None });
    }

    pub fn fail(&mut self, check: &str, witness: impl Into<String>) {
        self.entries.push(ValidationEntry {
            check: check.into(),
            passed: false,
            witness: Some(witness.into()),
        });
    }

    pub fn record(&mut self, check: &str, witness: Option<String>) {
        match witness {
            None => self.pass(check),
            Some(w) => self.fail(check, w),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn entry(&self, check: &str) -> Option<&ValidationEntry> {
        self.entries.iter().find(|e| e.check == check)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match &e.witness {
                None => writeln!(f, "{}: pass", e.check)?,
                Some(w) => writeln!(f, "{}: FAIL ({w})", e.check)?,
            }
        }
        Ok(())
    }
}
