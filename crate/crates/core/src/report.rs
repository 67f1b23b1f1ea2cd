//! Pass/fail reports with witness assignments.

use std::fmt;

use serde::Serialize;

/// A variable assignment that violates some law. Values are element (or
/// point) indices; names are resolved when the report is rendered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub vars: Vec<(String, usize)>,
}

impl Witness {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = (S, usize)>) -> Self {
        Witness { vars: vars.into_iter().map(|(n, v)| (n.into(), v)).collect() }
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.vars.iter().find(|(n, _)| n == var).map(|&(_, v)| v)
    }

    pub fn render(&self, names: &[String]) -> String {
        self.vars
            .iter()
            .map(|(n, v)| format!("{}={}", n, names.get(*v).map(String::as_str).unwrap_or("?")))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail { witness: Witness },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub label: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Ordered list of checks. Validators stop at the first failure, the
/// axiom checkers run every item.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pass(&mut self, label: impl Into<String>) {
        self.checks.push(AxiomCheck { label: label.into(), outcome: Outcome::Pass });
    }

    pub fn fail(&mut self, label: impl Into<String>, witness: Witness) {
        self.checks.push(AxiomCheck { label: label.into(), outcome: Outcome::Fail { witness } });
    }

    pub fn record(&mut self, label: impl Into<String>, result: Option<Witness>) {
        match result {
            None => self.pass(label),
            Some(w) => self.fail(label, w),
        }
    }

    pub fn extend(&mut self, other: AxiomReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome == Outcome::Pass)
    }

    pub fn first_failure(&self) -> Option<(&str, &Witness)> {
        self.checks.iter().find_map(|c| match &c.outcome {
            Outcome::Fail { witness } => Some((c.label.as_str(), witness)),
            Outcome::Pass => None,
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &Witness)> {
        self.checks.iter().filter_map(|c| match &c.outcome {
            Outcome::Fail { witness } => Some((c.label.as_str(), witness)),
            Outcome::Pass => None,
        })
    }

    pub fn verdict_of(&self, label: &str) -> Option<&Outcome> {
        self.checks.iter().find(|c| c.label == label).map(|c| &c.outcome)
    }

    /// Human-readable listing using `names` for witness values.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for c in &self.checks {
            match &c.outcome {
                Outcome::Pass => out.push_str(&format!("  pass  {}\n", c.label)),
                Outcome::Fail { witness } => {
                    out.push_str(&format!("  FAIL  {}  [{}]\n", c.label, witness.render(names)))
                }
            }
        }
        out
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.outcome {
                Outcome::Pass => writeln!(f, "pass {}", c.label)?,
                Outcome::Fail { witness } => writeln!(f, "FAIL {} {:?}", c.label, witness.vars)?,
            }
        }
        Ok(())
    }
}
