//! Scenario reports and their serialization. Reports are byte-stable for
//! fixed inputs (the wall-time line is excluded from that guarantee).

use std::fmt::Write as _;
use std::path::Path;

use semiq_core::grid::Grid1;
use semiq_core::inversion::SignedJointDistribution;

/// How a check compares its computed value against the expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// `|computed - expected| <= tol`
    Within,
    /// `computed >= expected - tol`
    AtLeast,
}

/// One verified claim in a scenario report.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub tol: f64,
    /// Where the expected value comes from: `closed-form`, `oracle`, or
    /// `exact`.
    pub basis: &'static str,
    pub kind: CheckKind,
}

impl CheckLine {
    pub fn passes(&self) -> bool {
        match self.kind {
            CheckKind::Within => (self.computed - self.expected).abs() <= self.tol,
            CheckKind::AtLeast => self.computed >= self.expected - self.tol,
        }
    }
}

/// Self-contained scenario outcome: inputs echo, observed values, checks.
#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub scenario: &'static str,
    pub inputs: Vec<(String, String)>,
    pub values: Vec<(String, f64)>,
    pub checks: Vec<CheckLine>,
    pub wall_ms: u128,
}

impl ScenarioReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(CheckLine::passes)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.scenario);
        for (key, value) in &self.inputs {
            let _ = writeln!(out, "input {key}: {value}");
        }
        for (key, value) in &self.values {
            let _ = writeln!(out, "value {key}: {value:.12e}");
        }
        for check in &self.checks {
            let rel = match check.kind {
                CheckKind::Within => "within",
                CheckKind::AtLeast => "at-least",
            };
            let _ = writeln!(
                out,
                "check {} expected {:.12e} computed {:.12e} tol {:.1e} ({rel}) basis {} status {}",
                check.name,
                check.expected,
                check.computed,
                check.tol,
                check.basis,
                if check.passes() { "pass" } else { "fail" }
            );
        }
        let _ = writeln!(
            out,
            "status: {}",
            if self.all_pass() { "pass" } else { "fail" }
        );
        let _ = writeln!(out, "wall_time_ms: {}", self.wall_ms);
        out
    }

    /// Delimited form: one row per input/value/check, comma separated.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "section,name,expected,computed,tol,basis,status");
        let _ = writeln!(out, "scenario,{},,,,,", self.scenario);
        for (key, value) in &self.inputs {
            let _ = writeln!(out, "input,{key},{value},,,,");
        }
        for (key, value) in &self.values {
            let _ = writeln!(out, "value,{key},,{value:.12e},,,");
        }
        for check in &self.checks {
            let _ = writeln!(
                out,
                "check,{},{:.12e},{:.12e},{:.1e},{},{}",
                check.name,
                check.expected,
                check.computed,
                check.tol,
                check.basis,
                if check.passes() { "pass" } else { "fail" }
            );
        }
        let _ = writeln!(
            out,
            "status,,,,,,{}",
            if self.all_pass() { "pass" } else { "fail" }
        );
        let _ = writeln!(out, "wall_time_ms,{},,,,,", self.wall_ms);
        out
    }
}

fn grid_header(x: &Grid1<f64>, y: &Grid1<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# x_range,{:.12e},{:.12e}", x.min(), x.max());
    let _ = writeln!(out, "# y_range,{:.12e},{:.12e}", y.min(), y.max());
    let _ = writeln!(out, "# nx,{}", x.len());
    let _ = writeln!(out, "# ny,{}", y.len());
    out
}

/// Sampled 2-D field as a delimited matrix with a 4-line metadata header
/// (rows follow x, columns follow y).
pub fn field_to_table(dist: &SignedJointDistribution<f64>) -> String {
    let mut out = grid_header(dist.x_grid(), dist.y_grid());
    for i in 0..dist.x_grid().len() {
        let row: Vec<String> = (0..dist.y_grid().len())
            .map(|j| format!("{:.12e}", dist.at(i, j)))
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Writes `contents`, creating parent directories as needed.
pub fn write_output(path: &Path, contents: &str) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}
