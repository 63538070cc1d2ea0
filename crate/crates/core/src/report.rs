//! Named residuals aggregated over sample points.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub max: f64,
    pub mean: f64,
    pub tol: f64,
    pub pass: bool,
    pub worst_point: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub scenario: String,
    pub seed: u64,
    pub entries: Vec<CheckEntry>,
    pub pass: bool,
}

/// Running max/mean of a residual, in sample order. Non-finite residuals
/// and evaluation errors count as +∞.
#[derive(Clone, Debug)]
pub struct ResidualStats {
    name: String,
    tol: f64,
    max: f64,
    sum: f64,
    count: usize,
    worst: Vec<f64>,
}

impl ResidualStats {
    pub fn new(name: impl Into<String>, tol: f64) -> Self {
        ResidualStats {
            name: name.into(),
            tol,
            max: 0.0,
            sum: 0.0,
            count: 0,
            worst: Vec::new(),
        }
    }

    pub fn push(&mut self, residual: f64, p: &[f64]) {
        let r = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual.abs()
        };
        if self.count == 0 || r > self.max {
            self.max = r;
            self.worst = p.to_vec();
        }
        self.sum += r;
        self.count += 1;
    }

    pub fn push_result(&mut self, residual: Result<f64, Error>, p: &[f64]) {
        self.push(residual.unwrap_or(f64::INFINITY), p);
    }

    pub fn finish(self) -> CheckEntry {
        let mean = if self.count == 0 {
            0.0
        } else {
            // Keep mean ≤ max under rounding.
            (self.sum / self.count as f64).min(self.max)
        };
        CheckEntry {
            pass: self.max <= self.tol,
            name: self.name,
            max: self.max,
            mean,
            tol: self.tol,
            worst_point: self.worst,
        }
    }
}

impl CheckReport {
    pub fn new(scenario: impl Into<String>, seed: u64) -> Self {
        CheckReport {
            scenario: scenario.into(),
            seed,
            entries: Vec::new(),
            pass: true,
        }
    }

    pub fn from_stats(stats: impl IntoIterator<Item = ResidualStats>) -> Self {
        let mut report = CheckReport::new("", 0);
        for s in stats {
            report.push(s.finish());
        }
        report
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.pass &= entry.pass;
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: CheckReport) {
        for e in other.entries {
            self.push(e);
        }
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn first_failure(&self) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| !e.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width table for terminals.
    pub fn table(&self) -> String {
        let width = self
            .entries
            .iter()
            .map(|e| e.name.chars().count())
            .max()
            .unwrap_or(5)
            .max(5);
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}  seed: {}", self.scenario, self.seed);
        let _ = writeln!(
            out,
            "{:<width$}  {:>12}  {:>12}  {:>8}  result",
            "check", "max", "mean", "tol"
        );
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{:<width$}  {:>12.3e}  {:>12.3e}  {:>8.0e}  {}",
                e.name,
                e.max,
                e.mean,
                e.tol,
                if e.pass { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(out, "overall: {}", if self.pass { "pass" } else { "FAIL" });
        out
    }
}
