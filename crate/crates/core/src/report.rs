//! Text and JSON rendering of findings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::detectors::{DetectorId, Finding};
use crate::frontend::SourceUnit;
use crate::pipeline::FileAnalysis;

pub const TOOL_NAME: &str = "tonscanner";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub files: Vec<FileReport>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileReport {
    pub path: String,
    pub findings: Vec<FindingRecord>,
    pub errors: Vec<ErrorRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FindingRecord {
    pub detector: String,
    pub severity: String,
    pub message: String,
    pub function: String,
    pub line: u32,
    pub column: u32,
    pub end_line: u32,
    pub end_column: u32,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub message: String,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub br: u64,
    pub pl: u64,
    pub ur: u64,
    pub gvr: u64,
    pub ifm: u64,
    pub ubm: u64,
    pub id: u64,
    pub lep: u64,
    pub total: u64,
}

impl Summary {
    pub fn get(&self, d: DetectorId) -> u64 {
        match d {
            DetectorId::Br => self.br,
            DetectorId::Pl => self.pl,
            DetectorId::Ur => self.ur,
            DetectorId::Gvr => self.gvr,
            DetectorId::Ifm => self.ifm,
            DetectorId::Ubm => self.ubm,
            DetectorId::Id => self.id,
            DetectorId::Lep => self.lep,
        }
    }

    fn bump(&mut self, d: DetectorId) {
        let slot = match d {
            DetectorId::Br => &mut self.br,
            DetectorId::Pl => &mut self.pl,
            DetectorId::Ur => &mut self.ur,
            DetectorId::Gvr => &mut self.gvr,
            DetectorId::Ifm => &mut self.ifm,
            DetectorId::Ubm => &mut self.ubm,
            DetectorId::Id => &mut self.id,
            DetectorId::Lep => &mut self.lep,
        };
        *slot += 1;
        self.total += 1;
    }
}

impl FindingRecord {
    fn key(&self) -> (u32, u32, String, u32, u32) {
        (self.line, self.column, self.detector.clone(), self.end_line, self.end_column)
    }
}

fn record(f: &Finding) -> FindingRecord {
    FindingRecord {
        detector: f.detector.as_str().to_string(),
        severity: f.severity.as_str().to_string(),
        message: f.message.clone(),
        function: f.function.clone(),
        line: f.span.start_line,
        column: f.span.start_col,
        end_line: f.span.end_line,
        end_column: f.span.end_col,
        evidence: f.evidence.clone(),
    }
}

#[derive(Default)]
struct Builder {
    files: BTreeMap<String, (Vec<FindingRecord>, Vec<ErrorRecord>)>,
}

impl Builder {
    fn file(&mut self, path: String) -> &mut (Vec<FindingRecord>, Vec<ErrorRecord>) {
        self.files.entry(path).or_default()
    }

    fn add(&mut self, entry: &str, unit: &SourceUnit, findings: &[Finding]) {
        self.file(entry.to_string());
        let path_of = |fid| unit.sources.get(fid).path().display().to_string();
        for f in findings {
            self.file(path_of(f.span.file)).0.push(record(f));
        }
        for e in &unit.errors {
            let (path, line, column) = match e.span() {
                Some(s) => (path_of(s.file), s.start_line, s.start_col),
                None => (entry.to_string(), 0, 0),
            };
            self.file(path).1.push(ErrorRecord { message: e.to_string(), line, column });
        }
    }

    fn finish(self) -> Report {
        let mut summary = Summary::default();
        let files = self
            .files
            .into_iter()
            .map(|(path, (mut findings, mut errors))| {
                // A file included from several entry points is analysed once
                // per entry; keep one copy of each finding.
                findings.sort_by_key(FindingRecord::key);
                findings.dedup_by(|a, b| a.key() == b.key());
                errors.sort_by(|a, b| (a.line, a.column, &a.message).cmp(&(b.line, b.column, &b.message)));
                errors.dedup();
                for f in &findings {
                    if let Ok(d) = f.detector.parse::<DetectorId>() {
                        summary.bump(d);
                    }
                }
                FileReport { path, findings, errors }
            })
            .collect();
        Report { tool: TOOL_NAME.into(), version: TOOL_VERSION.into(), files, summary }
    }
}

impl Report {
    pub fn from_analyses<'a>(analyses: impl IntoIterator<Item = &'a FileAnalysis>) -> Report {
        let mut b = Builder::default();
        for a in analyses {
            b.add(&a.path.display().to_string(), &a.unit, &a.findings);
        }
        b.finish()
    }

    /// A report for a file that could not be read at all.
    pub fn add_unreadable(&mut self, path: &str, message: String) {
        let entry = FileReport { path: path.into(), findings: Vec::new(), errors: vec![ErrorRecord { message, line: 0, column: 0 }] };
        match self.files.binary_search_by(|f| f.path.as_str().cmp(path)) {
            Ok(i) => self.files[i].errors.push(entry.errors[0].clone()),
            Err(i) => self.files.insert(i, entry),
        }
    }

    pub fn total(&self) -> u64 {
        self.summary.total
    }

    pub fn has_errors(&self) -> bool {
        self.files.iter().any(|f| !f.errors.is_empty())
    }
}

/// Source text of every file that contributed to a report, for snippets.
#[derive(Debug, Clone, Default)]
pub struct Sources(BTreeMap<String, String>);

impl Sources {
    pub fn from_analyses<'a>(analyses: impl IntoIterator<Item = &'a FileAnalysis>) -> Self {
        let mut m = BTreeMap::new();
        for a in analyses {
            for f in a.unit.sources.files() {
                m.entry(f.path().display().to_string()).or_insert_with(|| f.text.clone());
            }
        }
        Sources(m)
    }

    pub fn insert(&mut self, path: impl Into<String>, text: impl Into<String>) {
        self.0.insert(path.into(), text.into());
    }

    pub fn line(&self, path: &str, line: u32) -> Option<&str> {
        let text = self.0.get(path)?;
        text.split('\n').nth(line.checked_sub(1)? as usize).map(|l| l.trim_end_matches('\r'))
    }
}

const RED: &str = "\x1b[31m";
const YELLOW: &str = "\x1b[33m";
const CYAN: &str = "\x1b[36m";
const BOLD: &str = "\x1b[1m";
const RESET: &str = "\x1b[0m";

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

/// Underline columns `[start, end)` of `line`. Tabs in the prefix are kept
/// so the caret lines up however the terminal expands them.
fn underline(line: &str, start: u32, end: u32) -> String {
    let mut out = String::new();
    let chars: Vec<char> = line.chars().collect();
    let start = start.max(1) as usize - 1;
    for i in 0..start {
        out.push(if chars.get(i) == Some(&'\t') { '\t' } else { ' ' });
    }
    let width = (end as usize).saturating_sub(start + 1).max(1);
    out.push('^');
    out.extend(std::iter::repeat('~').take(width - 1));
    out
}

/// `path:line:col: [ID] severity: message`, then the source line and a caret
/// under the finding, and a closing count.
pub fn render_text(report: &Report, sources: &Sources, color: bool) -> String {
    let paint = |code: &str, s: &str| if color { format!("{code}{s}{RESET}") } else { s.to_string() };
    let mut out = String::new();
    for file in &report.files {
        for e in &file.errors {
            let _ = writeln!(out, "{}:{}:{}: {}: {}", file.path, e.line, e.column, paint(RED, "error"), e.message);
        }
        for f in &file.findings {
            let sev = match f.severity.as_str() {
                "high" => paint(RED, "high"),
                "medium" => paint(YELLOW, "medium"),
                s => paint(CYAN, s),
            };
            let head = paint(BOLD, &format!("{}:{}:{}:", file.path, f.line, f.column));
            let _ = writeln!(out, "{head} [{}] {sev}: {}", f.detector, f.message);
            if let Some(src) = sources.line(&file.path, f.line) {
                let end = if f.end_line == f.line { f.end_column } else { src.chars().count() as u32 + 1 };
                let _ = writeln!(out, "    {src}");
                let _ = writeln!(out, "    {}", paint(RED, &underline(src, f.column, end)));
            }
        }
    }
    let _ = writeln!(out, "{} in {}", plural(report.total() as usize, "finding"), plural(report.files.len(), "file"));
    out
}

pub fn render_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

/// Detectors that produced at least one finding.
pub fn detectors_hit(report: &Report) -> BTreeSet<String> {
    report.files.iter().flat_map(|f| f.findings.iter().map(|x| x.detector.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caret_under_start_column() {
        assert_eq!(underline("int x = f();", 9, 12), "        ^~~");
        assert_eq!(underline("\tx();", 2, 3), "\t^");
        assert_eq!(underline("a", 1, 1), "^");
    }

    #[test]
    fn empty_report_prints_only_the_footer() {
        let r = Builder::default().finish();
        assert_eq!(render_text(&r, &Sources::default(), false), "0 findings in 0 files\n");
    }

    #[test]
    fn json_keys_in_schema_order() {
        let mut b = Builder::default();
        b.file("a.fc".into()).0.push(FindingRecord {
            detector: "UR".into(),
            severity: "low".into(),
            message: "m".into(),
            function: "f".into(),
            line: 1,
            column: 2,
            end_line: 1,
            end_column: 3,
            evidence: "e".into(),
        });
        let r = b.finish();
        let json = render_json(&r);
        // Keys must appear in schema order in the serialized text.
        let in_order = |keys: &[&str]| {
            let pos: Vec<usize> = keys.iter().map(|k| json.find(&format!("\"{k}\":")).unwrap()).collect();
            pos.windows(2).all(|w| w[0] < w[1])
        };
        assert!(in_order(&["tool", "version", "files", "path", "findings", "detector", "severity", "message", "function"]));
        assert!(in_order(&["line", "column", "endLine", "endColumn", "evidence", "errors", "summary"]));
        assert!(in_order(&["br", "pl", "ur", "gvr", "ifm", "ubm", "id", "lep", "total"]));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["summary"]["ur"], 1);
        assert_eq!(parse_json(&render_json(&r)).unwrap(), r);
    }
}
