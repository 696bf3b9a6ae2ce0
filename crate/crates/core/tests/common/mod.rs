#![allow(dead_code)]

use std::path::{Path, PathBuf};

use tonscanner_core::analysis::Catalog;
use tonscanner_core::detectors::{DetectorSet, Finding};
use tonscanner_core::pipeline::{analyze_file, analyze_source, FileAnalysis};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// `.fc` files under `fixtures/<sub>`, sorted.
pub fn fixture_files(sub: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(fixtures().join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "fc"))
        .collect();
    v.sort();
    v
}

pub fn all_fixture_files() -> Vec<PathBuf> {
    ["listings", "fixed", "corpus"].iter().flat_map(|s| fixture_files(s)).collect()
}

pub fn analyze(path: &Path) -> FileAnalysis {
    analyze_file(path, &[], &Catalog::builtin(), &DetectorSet::all())
}

pub fn analyze_text(text: &str) -> FileAnalysis {
    analyze_source("test.fc", text, &Catalog::builtin(), &DetectorSet::all())
}

/// `line:col ID` per finding.
pub fn keys(findings: &[Finding]) -> Vec<String> {
    findings.iter().map(|f| format!("{}:{} {}", f.span.start_line, f.span.start_col, f.detector)).collect()
}

pub mod cell_oracle;
pub mod dom_oracle;
pub mod ssa_oracle;
pub mod taint_oracle;
pub mod criteria;
