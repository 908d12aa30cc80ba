//! Pass/fail reports shared by every check suite.

use std::fmt;

/// Failures beyond this many are counted but not stored.
pub const MAX_STORED_FAILURES: usize = 50;

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: u64,
    pub failed: u64,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(name: impl Into<String>) -> SuiteReport {
        SuiteReport { name: name.into(), ..SuiteReport::default() }
    }

    pub fn is_ok(&self) -> bool {
        self.failed == 0
    }

    /// Record one check; `fail` is only called when `ok` is false.
    pub fn check(&mut self, ok: bool, fail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(fail());
        }
    }

    pub fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < MAX_STORED_FAILURES {
            self.failures.push(msg);
        }
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    pub fn absorb(&mut self, other: SuiteReport) {
        self.checked += other.checked;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < MAX_STORED_FAILURES {
                self.failures.push(format!("{}: {f}", other.name));
            }
        }
        self.notes.extend(other.notes.into_iter().map(|n| format!("{}: {n}", other.name)));
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.is_ok() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {} checks, {} failures", self.name, self.checked, self.failed)?;
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        for x in &self.failures {
            write!(f, "\n  failure: {x}")?;
        }
        Ok(())
    }
}
