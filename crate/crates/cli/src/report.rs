//! Check records and their serialization.
//!
//! A JSON report is one object per line: an environment header, one record
//! per check in id order, and a summary. Everything after the header is the
//! *body*, which is byte-identical across runs with the same configuration.
//! CSV mirrors the records, with the header and summary as `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::config::Format;

/// Topic tag for checks that test the harness rather than the geometry.
pub const PLUMBING: &str = "plumbing";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub id: String,
    /// What the check is about, e.g. "constant-curvature line element".
    #[serde(rename = "paper_ref")]
    pub topic: String,
    pub value: f64,
    pub expected: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Record {
    /// `|value - expected| ≤ tol`.
    pub fn within(id: impl Into<String>, topic: &str, value: f64, expected: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            topic: topic.into(),
            value,
            expected,
            tol,
            pass: (value - expected).abs() <= tol,
        }
    }

    /// `value ≤ tol`, for residuals.
    pub fn at_most(id: impl Into<String>, topic: &str, value: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            topic: topic.into(),
            value,
            expected: 0.0,
            tol,
            pass: value <= tol,
        }
    }

    /// `value ≥ bound`; recorded with `expected = bound` and zero tolerance.
    pub fn at_least(id: impl Into<String>, topic: &str, value: f64, bound: f64) -> Self {
        Self {
            id: id.into(),
            topic: topic.into(),
            value,
            expected: bound,
            tol: 0.0,
            pass: value >= bound,
        }
    }

    /// Exact equality, for counts and rational arithmetic.
    pub fn exact(id: impl Into<String>, topic: &str, value: f64, expected: f64) -> Self {
        Self {
            id: id.into(),
            topic: topic.into(),
            value,
            expected,
            tol: 0.0,
            pass: value == expected,
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(id: impl Into<String>, topic: &str, expected: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            topic: topic.into(),
            value: f64::NAN,
            expected,
            tol,
            pass: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Header<'a> {
    kind: &'static str,
    suite: &'a str,
    version: &'a str,
    seed: u64,
    steps: &'a BTreeMap<String, f64>,
    timestamp: u64,
}

#[derive(Debug, Clone, Serialize)]
struct Line<'a> {
    kind: &'static str,
    #[serde(flatten)]
    record: &'a Record,
}

#[derive(Debug, Clone, Serialize)]
struct Summary {
    kind: &'static str,
    checks: usize,
    passed: usize,
    failed: usize,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    /// Step sizes the suite ran with.
    pub steps: BTreeMap<String, f64>,
    /// Seconds since the Unix epoch; the only field allowed to differ
    /// between identical runs.
    pub timestamp: u64,
    pub records: Vec<Record>,
}

impl Report {
    /// Sorts records by id.
    pub fn new(suite: &str, seed: u64, steps: BTreeMap<String, f64>, mut records: Vec<Record>) -> Self {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            suite: suite.into(),
            seed,
            steps,
            timestamp,
            records,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    fn header_json(&self) -> String {
        serde_json::to_string(&Header {
            kind: "environment",
            suite: &self.suite,
            version: env!("CARGO_PKG_VERSION"),
            seed: self.seed,
            steps: &self.steps,
            timestamp: self.timestamp,
        })
        .expect("header serializes")
    }

    fn summary(&self) -> Summary {
        let passed = self.records.iter().filter(|r| r.pass).count();
        Summary {
            kind: "summary",
            checks: self.records.len(),
            passed,
            failed: self.records.len() - passed,
        }
    }

    /// The report without its environment header.
    pub fn body(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Json => {
                for r in &self.records {
                    out += &serde_json::to_string(&Line { kind: "check", record: r }).expect("record serializes");
                    out.push('\n');
                }
                out += &serde_json::to_string(&self.summary()).expect("summary serializes");
                out.push('\n');
            }
            Format::Csv => {
                out += "id,paper_ref,value,expected,tol,pass\n";
                for r in &self.records {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        csv_field(&r.id),
                        csv_field(&r.topic),
                        r.value,
                        r.expected,
                        r.tol,
                        r.pass
                    );
                }
                let s = self.summary();
                let _ = writeln!(out, "# checks={} passed={} failed={}", s.checks, s.passed, s.failed);
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        let header = match format {
            Format::Json => self.header_json(),
            Format::Csv => format!("# {}", self.header_json()),
        };
        format!("{header}\n{}", self.body(format))
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report::new(
            "demo",
            1,
            BTreeMap::from([("step".to_string(), 1e-3)]),
            vec![
                Record::at_most("b", "residual", 1e-14, 1e-12),
                Record::within("a", PLUMBING, 1.0, 1.5, 0.1),
            ],
        )
    }

    #[test]
    fn records_are_sorted_and_judged() {
        let r = sample();
        assert_eq!(r.records[0].id, "a");
        assert!(!r.all_pass());
        assert_eq!(r.failures().count(), 1);
        assert!(Record::at_least("s", "slope", 3.9, 3.7).pass);
        assert!(!Record::failed("f", "x", 0.0, 1.0).pass);
    }

    #[test]
    fn json_lines_layout() {
        let text = sample().render(Format::Json);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        let head: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(head["kind"], "environment");
        let rec: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        for key in ["id", "paper_ref", "value", "expected", "tol", "pass"] {
            assert!(rec.get(key).is_some(), "{key}");
        }
        let sum: serde_json::Value = serde_json::from_str(lines[3]).unwrap();
        assert_eq!(sum["failed"], 1);
    }

    #[test]
    fn csv_layout() {
        let text = sample().render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# {"));
        assert_eq!(lines[1], "id,paper_ref,value,expected,tol,pass");
        assert_eq!(lines[2], "a,plumbing,1,1.5,0.1,false");
        assert_eq!(csv_field("x,y"), "\"x,y\"");
    }
}
