//! Structured verification reports: one per verified statement, with a
//! machine-readable JSON form and an aligned text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// One tested instance: the parameter point, both sides of the inequality (or
/// target and measurement), and the margin (positive means the claim holds
/// with room).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub point: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub statement_id: String,
    pub status: Status,
    /// Constants measured along the way (best uniform C, decay rates, ...).
    pub measured_constants: BTreeMap<String, f64>,
    pub evidence: Vec<EvidenceRow>,
    /// Run configuration echoed for reproducibility.
    pub config: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn new(statement_id: &str) -> Self {
        VerificationReport {
            statement_id: statement_id.to_string(),
            status: Status::Inconclusive,
            measured_constants: BTreeMap::new(),
            evidence: Vec::new(),
            config: BTreeMap::new(),
        }
    }

    pub fn constant(&mut self, name: &str, value: f64) -> &mut Self {
        self.measured_constants.insert(name.to_string(), value);
        self
    }

    pub fn config_entry(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push_row(&mut self, point: impl ToString, lhs: f64, rhs: f64, margin: f64) {
        self.evidence.push(EvidenceRow {
            point: point.to_string(),
            lhs,
            rhs,
            margin,
        });
    }

    /// Push an inequality instance `lhs <= rhs`; the margin is `rhs - lhs`.
    pub fn push_leq(&mut self, point: impl ToString, lhs: f64, rhs: f64) {
        self.push_row(point, lhs, rhs, rhs - lhs);
    }

    /// Holds iff every evidence row has nonnegative margin (and there is
    /// evidence at all).
    pub fn finish_by_margins(&mut self) -> Status {
        self.status = if self.evidence.is_empty() {
            Status::Inconclusive
        } else if self.evidence.iter().all(|r| r.margin >= 0.0 && r.margin.is_finite()) {
            Status::Holds
        } else {
            Status::Fails
        };
        self.status
    }

    pub fn worst_margin(&self) -> f64 {
        self.evidence
            .iter()
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Aligned-column text rendering for terminal output.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "statement: {}", self.statement_id);
        let _ = writeln!(out, "status:    {}", self.status.as_str());
        if !self.measured_constants.is_empty() {
            let _ = writeln!(out, "constants:");
            let w = self
                .measured_constants
                .keys()
                .map(|k| k.len())
                .max()
                .unwrap_or(0);
            for (k, v) in &self.measured_constants {
                let _ = writeln!(out, "  {k:w$}  {v:.6e}");
            }
        }
        if !self.evidence.is_empty() {
            let pw = self
                .evidence
                .iter()
                .map(|r| r.point.len())
                .max()
                .unwrap_or(5)
                .max("point".len());
            let _ = writeln!(
                out,
                "  {:pw$}  {:>13}  {:>13}  {:>13}",
                "point", "lhs", "rhs", "margin"
            );
            for r in &self.evidence {
                let _ = writeln!(
                    out,
                    "  {:pw$}  {:>13.6e}  {:>13.6e}  {:>13.6e}",
                    r.point, r.lhs, r.rhs, r.margin
                );
            }
        }
        if !self.config.is_empty() {
            let _ = writeln!(out, "config:");
            for (k, v) in &self.config {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_drive_status() {
        let mut r = VerificationReport::new("demo");
        r.push_leq("a", 1.0, 2.0);
        r.push_leq("b", 3.0, 3.0);
        assert_eq!(r.finish_by_margins(), Status::Holds);
        r.push_leq("c", 5.0, 4.0);
        assert_eq!(r.finish_by_margins(), Status::Fails);
        assert_eq!(r.worst_margin(), -1.0);
    }

    #[test]
    fn empty_report_is_inconclusive() {
        let mut r = VerificationReport::new("empty");
        assert_eq!(r.finish_by_margins(), Status::Inconclusive);
    }

    #[test]
    fn json_round_trip() {
        let mut r = VerificationReport::new("rt");
        r.constant("c_best", 1.25);
        r.config_entry("seed", 7);
        r.push_leq("x=0.5", 0.1, 0.2);
        r.finish_by_margins();
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.statement_id, "rt");
        assert_eq!(back.status, Status::Holds);
        assert_eq!(back.measured_constants["c_best"], 1.25);
        assert_eq!(back.evidence.len(), 1);
    }

    #[test]
    fn text_rendering_mentions_all_parts() {
        let mut r = VerificationReport::new("txt");
        r.constant("rate", 0.5);
        r.push_leq("p=2", 1.0, 4.0);
        r.finish_by_margins();
        let s = r.render_text();
        assert!(s.contains("statement: txt"));
        assert!(s.contains("holds"));
        assert!(s.contains("rate"));
        assert!(s.contains("margin"));
    }
}
