//! Pass/fail bookkeeping shared by the verification sweeps.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Pass,
    Fail,
    /// A computed result that disagrees with a claim of the source material
    /// but is not a defect of this crate. Does not count as a failure.
    Discrepancy,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Discrepancy => "NOTE",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub section: String,
    pub name: String,
    pub outcome: Outcome,
    /// Worst observed residual (or the measured quantity).
    pub value: f64,
    pub tolerance: f64,
    pub note: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.outcome != Outcome::Fail
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Passes when `value <= tolerance` and `value` is finite.
    pub fn threshold(
        &mut self,
        section: &str,
        name: impl Into<String>,
        value: f64,
        tolerance: f64,
    ) -> &mut Check {
        let outcome = if value.is_finite() && value <= tolerance {
            Outcome::Pass
        } else {
            Outcome::Fail
        };
        self.push(section, name, outcome, value, tolerance)
    }

    /// Passes when `value > tolerance` (negative controls).
    pub fn exceeds(
        &mut self,
        section: &str,
        name: impl Into<String>,
        value: f64,
        tolerance: f64,
    ) -> &mut Check {
        let outcome = if value.is_finite() && value > tolerance {
            Outcome::Pass
        } else {
            Outcome::Fail
        };
        self.push(section, name, outcome, value, tolerance)
    }

    pub fn push(
        &mut self,
        section: &str,
        name: impl Into<String>,
        outcome: Outcome,
        value: f64,
        tolerance: f64,
    ) -> &mut Check {
        self.checks.push(Check {
            section: section.to_string(),
            name: name.into(),
            outcome,
            value,
            tolerance,
            note: String::new(),
        });
        self.checks.last_mut().unwrap()
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn count(&self, outcome: Outcome) -> usize {
        self.checks.iter().filter(|c| c.outcome == outcome).count()
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl Check {
    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.note = note.into();
        self
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(
                f,
                "[{}] {:<10} {:<44} value={:<10.3e} tol={:.1e}",
                c.outcome.label(),
                c.section,
                c.name,
                c.value,
                c.tolerance
            )?;
            if !c.note.is_empty() {
                write!(f, "  ({})", c.note)?;
            }
            writeln!(f)?;
        }
        writeln!(
            f,
            "summary: {} checks, {} passed, {} failed, {} notes",
            self.checks.len(),
            self.count(Outcome::Pass),
            self.count(Outcome::Fail),
            self.count(Outcome::Discrepancy)
        )
    }
}
