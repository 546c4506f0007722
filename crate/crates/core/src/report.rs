//! Pass/fail records shared by the verification routines and the CLI suites.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn push(&mut self, id: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { id: id.into(), pass, detail: detail.into() });
    }

    /// Records an equality check, showing both sides on failure.
    pub fn push_eq<T: PartialEq + fmt::Display>(&mut self, id: impl Into<String>, got: &T, want: &T) {
        let pass = got == want;
        let detail = if pass { format!("{got}") } else { format!("got {got}, expected {want}") };
        self.push(id, pass, detail);
    }

    pub fn extend(&mut self, prefix: &str, other: VerificationReport) {
        for c in other.checks {
            self.checks.push(Check { id: format!("{prefix}{}", c.id), ..c });
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {} {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.detail)?;
        }
        Ok(())
    }
}
