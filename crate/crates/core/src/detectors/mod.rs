//! The eight defect detectors and the shared finding type.

mod br;
mod gvr;
mod id;
mod ifm;
mod lep;
mod pl;
mod ubm;
mod ur;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::Span;
use crate::pipeline::UnitAnalysis;

pub use ubm::{handled_bounced_ops, HandledOps};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DetectorId {
    #[serde(rename = "BR")]
    Br,
    #[serde(rename = "PL")]
    Pl,
    #[serde(rename = "UR")]
    Ur,
    #[serde(rename = "GVR")]
    Gvr,
    #[serde(rename = "IFM")]
    Ifm,
    #[serde(rename = "UBM")]
    Ubm,
    #[serde(rename = "ID")]
    Id,
    #[serde(rename = "LEP")]
    Lep,
}

impl DetectorId {
    pub const ALL: [DetectorId; 8] = [
        DetectorId::Br,
        DetectorId::Pl,
        DetectorId::Ur,
        DetectorId::Gvr,
        DetectorId::Ifm,
        DetectorId::Ubm,
        DetectorId::Id,
        DetectorId::Lep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorId::Br => "BR",
            DetectorId::Pl => "PL",
            DetectorId::Ur => "UR",
            DetectorId::Gvr => "GVR",
            DetectorId::Ifm => "IFM",
            DetectorId::Ubm => "UBM",
            DetectorId::Id => "ID",
            DetectorId::Lep => "LEP",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            DetectorId::Br | DetectorId::Ubm | DetectorId::Id => Severity::High,
            DetectorId::Pl | DetectorId::Ifm | DetectorId::Gvr => Severity::Medium,
            DetectorId::Ur | DetectorId::Lep => Severity::Low,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            DetectorId::Br => "bad randomness",
            DetectorId::Pl => "precision loss",
            DetectorId::Ur => "unchecked return",
            DetectorId::Gvr => "global variable redefinition",
            DetectorId::Ifm => "improper function modifier",
            DetectorId::Ubm => "unhandled bounced message",
            DetectorId::Id => "inconsistent data",
            DetectorId::Lep => "lack of end_parse",
        }
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown detector `{0}`")]
pub struct UnknownDetector(pub String);

impl FromStr for DetectorId {
    type Err = UnknownDetector;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DetectorId::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownDetector(s.trim().to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    High,
    Medium,
    Low,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::High => "high",
            Severity::Medium => "medium",
            Severity::Low => "low",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub detector: DetectorId,
    pub severity: Severity,
    pub function: String,
    pub span: Span,
    pub message: String,
    pub evidence: String,
}

impl Finding {
    pub fn new(detector: DetectorId, function: &str, span: Span, message: String, evidence: String) -> Self {
        Finding { detector, severity: detector.severity(), function: function.to_string(), span, message, evidence }
    }
}

/// The set of detectors to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorSet(Vec<DetectorId>);

impl Default for DetectorSet {
    fn default() -> Self {
        DetectorSet::all()
    }
}

impl DetectorSet {
    pub fn all() -> Self {
        DetectorSet(DetectorId::ALL.to_vec())
    }

    pub fn only(ids: impl IntoIterator<Item = DetectorId>) -> Self {
        let mut v: Vec<DetectorId> = ids.into_iter().collect();
        v.sort();
        v.dedup();
        DetectorSet(v)
    }

    pub fn contains(&self, d: DetectorId) -> bool {
        self.0.contains(&d)
    }

    pub fn ids(&self) -> &[DetectorId] {
        &self.0
    }
}

impl FromStr for DetectorSet {
    type Err = UnknownDetector;

    /// Comma-separated detector IDs, or `all`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(DetectorSet::all());
        }
        s.split(',').filter(|p| !p.trim().is_empty()).map(DetectorId::from_str).collect::<Result<Vec<_>, _>>().map(DetectorSet::only)
    }
}

/// Run the enabled detectors, drop duplicates (same detector and span) and
/// sort by position, then detector.
pub fn run_all(ua: &UnitAnalysis, enabled: &DetectorSet) -> Vec<Finding> {
    let mut out = Vec::new();
    for &d in enabled.ids() {
        out.extend(match d {
            DetectorId::Br => br::detect(ua),
            DetectorId::Pl => pl::detect(ua),
            DetectorId::Ur => ur::detect(ua),
            DetectorId::Gvr => gvr::detect(ua),
            DetectorId::Ifm => ifm::detect(ua),
            DetectorId::Ubm => ubm::detect(ua),
            DetectorId::Id => id::detect(ua),
            DetectorId::Lep => lep::detect(ua),
        });
    }
    normalize(out)
}

pub fn normalize(mut findings: Vec<Finding>) -> Vec<Finding> {
    let mut seen = HashSet::new();
    findings.retain(|f| seen.insert((f.detector, f.span)));
    findings.sort_by(|a, b| (a.span.sort_key(), a.detector).cmp(&(b.span.sort_key(), b.detector)));
    findings
}

/// `line:col` for messages.
fn at(span: Span) -> String {
    format!("{}:{}", span.start_line, span.start_col)
}
