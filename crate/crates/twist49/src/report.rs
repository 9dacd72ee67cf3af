//! Machine-readable verification reports.
//!
//! Every check performed by the command line front end is recorded as one
//! JSON object per line with the fields family, label, claim, measured,
//! expected, tol and pass.  Reports are deterministic: before emission the
//! lines are canonicalized by (family, numeric label value, label, claim),
//! so two runs with identical flags produce byte-identical output no matter
//! how a work pool interleaved the instances.

use serde::Serialize;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportLine {
    pub family: String,
    pub label: String,
    pub claim: String,
    pub measured: String,
    pub expected: String,
    pub tol: f64,
    pub pass: bool,
}

impl ReportLine {
    pub fn new(
        family: &str,
        label: impl fmt::Display,
        claim: &str,
        measured: impl fmt::Display,
        expected: impl fmt::Display,
        tol: f64,
        pass: bool,
    ) -> ReportLine {
        ReportLine {
            family: family.to_string(),
            label: label.to_string(),
            claim: claim.to_string(),
            measured: measured.to_string(),
            expected: expected.to_string(),
            tol,
            pass,
        }
    }
}

/// Collects report lines from (possibly concurrent) sweeps and emits them in
/// canonical order.
#[derive(Debug, Default)]
pub struct Reporter {
    lines: Vec<ReportLine>,
}

// Labels are usually integers ("53", "-46") or tuples ("(13,53)"); sort the
// integer ones by value and everything else lexicographically after them.
fn label_key(label: &str) -> (i64, String) {
    match label.parse::<i64>() {
        Ok(v) => (v, String::new()),
        Err(_) => (i64::MAX, label.to_string()),
    }
}

impl Reporter {
    pub fn new() -> Reporter {
        Reporter { lines: Vec::new() }
    }

    pub fn push(&mut self, line: ReportLine) {
        self.lines.push(line);
    }

    pub fn extend(&mut self, lines: Vec<ReportLine>) {
        self.lines.extend(lines);
    }

    pub fn record(
        &mut self,
        family: &str,
        label: impl fmt::Display,
        claim: &str,
        measured: impl fmt::Display,
        expected: impl fmt::Display,
        tol: f64,
        pass: bool,
    ) {
        self.push(ReportLine::new(
            family, label, claim, measured, expected, tol, pass,
        ));
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn canonicalize(&mut self) {
        self.lines.sort_by(|a, b| {
            (&a.family, label_key(&a.label), &a.claim).cmp(&(
                &b.family,
                label_key(&b.label),
                &b.claim,
            ))
        });
    }

    /// One JSON object per line, canonical order.
    pub fn render(&mut self) -> String {
        self.canonicalize();
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(&serde_json::to_string(line).expect("report lines are plain data"));
            out.push('\n');
        }
        out
    }

    /// Writes the JSON-lines report to stdout (and to `path` when given),
    /// followed by a plain-text summary on stderr.  Returns whether every
    /// line passed.
    pub fn finish(&mut self, path: Option<&Path>) -> io::Result<bool> {
        let rendered = self.render();
        io::stdout().write_all(rendered.as_bytes())?;
        if let Some(p) = path {
            fs::write(p, &rendered)?;
        }
        let failed = self.lines.iter().filter(|l| !l.pass).count();
        eprintln!(
            "{} checks, {} failed{}",
            self.lines.len(),
            failed,
            if failed == 0 { ": all pass" } else { "" }
        );
        Ok(failed == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(label: &str, pass: bool) -> ReportLine {
        ReportLine::new("t", label, "c", 1, 1, 0.0, pass)
    }

    #[test]
    fn render_is_canonical_and_deterministic() {
        let mut a = Reporter::new();
        a.push(sample("53", true));
        a.push(sample("-19", true));
        a.push(sample("(13,53)", true));
        a.push(sample("5", true));
        let mut b = Reporter::new();
        b.push(sample("5", true));
        b.push(sample("(13,53)", true));
        b.push(sample("53", true));
        b.push(sample("-19", true));
        let ra = a.render();
        assert_eq!(ra, b.render());
        let order: Vec<&str> = a.lines.iter().map(|l| l.label.as_str()).collect();
        assert_eq!(order, ["-19", "5", "53", "(13,53)"]);
        assert_eq!(ra.lines().count(), 4);
    }

    #[test]
    fn json_fields_and_pass_tracking() {
        let mut r = Reporter::new();
        r.record("lvalue", 1, "snap", 0.5, 0.5, 1e-9, true);
        assert!(r.all_pass());
        r.record("lvalue", 2, "snap", 0.3, 0.5, 1e-9, false);
        assert!(!r.all_pass());
        let text = r.render();
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        for key in ["family", "label", "claim", "measured", "expected", "tol", "pass"] {
            assert!(first.get(key).is_some(), "missing field {key}");
        }
        assert_eq!(first["family"], "lvalue");
        assert_eq!(first["pass"], true);
    }
}
