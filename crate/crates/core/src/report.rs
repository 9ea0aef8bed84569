//! Pass/fail records shared by the verification operations and suites.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// Passes iff `|lhs - rhs| <= tol`.
    pub fn close(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let diff = (lhs - rhs).abs();
        Check {
            name: name.into(),
            lhs,
            rhs,
            diff,
            tol,
            pass: diff <= tol,
        }
    }

    /// Check with an externally computed difference, e.g. a max-norm.
    pub fn with_diff(name: impl Into<String>, lhs: f64, rhs: f64, diff: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            lhs,
            rhs,
            diff,
            tol,
            pass: diff <= tol,
        }
    }

    /// An exact (boolean) comparison, recorded as `diff = 0` or `1` with
    /// zero tolerance.
    pub fn exact(name: impl Into<String>, holds: bool) -> Self {
        let diff = if holds { 0.0 } else { 1.0 };
        Check {
            name: name.into(),
            lhs: diff,
            rhs: 0.0,
            diff,
            tol: 0.0,
            pass: holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub job: serde_json::Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            job: serde_json::Value::Null,
            checks: Vec::new(),
            pass: true,
            wall_time_s: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    /// Appends another report's checks, prefixing their names.
    pub fn absorb(&mut self, other: Report) {
        for mut c in other.checks {
            c.name = format!("{}/{}", other.name, c.name);
            self.push(c);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn max_diff(&self) -> f64 {
        self.checks.iter().map(|c| c.diff).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_is_conjunction() {
        let mut r = Report::new("r");
        r.push(Check::close("a", 1.0, 1.0 + 1e-13, 1e-12));
        assert!(r.pass);
        r.push(Check::exact("b", false));
        assert!(!r.pass);
        r.push(Check::close("c", 0.0, 0.0, 0.0));
        assert!(!r.pass);
        assert_eq!(r.failures().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["b"]);
    }

    #[test]
    fn absorb_prefixes_names() {
        let mut inner = Report::new("inner");
        inner.push(Check::exact("x", true));
        let mut outer = Report::new("outer");
        outer.absorb(inner);
        assert_eq!(outer.checks[0].name, "inner/x");
    }
}
