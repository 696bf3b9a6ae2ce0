//! Command-line driver for the FunC defect scanner.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use walkdir::WalkDir;

use tonscanner_core::analysis::Catalog;
use tonscanner_core::detectors::DetectorSet;
use tonscanner_core::pipeline::{analyze_file, FileAnalysis};
use tonscanner_core::report::{render_json, render_text, Report, Sources};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Scan FunC smart contracts for common defects.
#[derive(Debug, Parser)]
#[command(name = "tonscanner", version)]
pub struct Cli {
    /// Files or directories to scan; directories are searched for .fc and .func files.
    #[arg(required = true, value_name = "PATH")]
    pub inputs: Vec<PathBuf>,

    /// Comma-separated detector IDs (br, pl, ur, gvr, ifm, ubm, id, lep) or `all`.
    #[arg(long, value_name = "LIST", default_value = "all")]
    pub detectors: DetectorSet,

    /// Skip files whose path matches this glob. Repeatable.
    #[arg(long = "exclude", value_name = "GLOB")]
    pub exclude: Vec<String>,

    /// Extra directory to search for #include targets. Repeatable.
    #[arg(long = "include-path", value_name = "DIR")]
    pub include_path: Vec<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// JSON file whose entries replace or extend the builtin function catalog.
    #[arg(long, value_name = "FILE")]
    pub catalog: Option<PathBuf>,

    /// Exit with status 1 when anything is found.
    #[arg(long)]
    pub fail_on_findings: bool,
}

fn is_source(p: &Path) -> bool {
    matches!(p.extension().and_then(|e| e.to_str()), Some("fc" | "func"))
}

fn excludes(globs: &[String]) -> Result<GlobSet, globset::Error> {
    let mut b = GlobSetBuilder::new();
    for g in globs {
        b.add(Glob::new(g)?);
    }
    b.build()
}

/// Expand inputs into a sorted, duplicate-free file list. Explicitly named
/// files are taken whatever their extension.
pub fn collect_inputs(inputs: &[PathBuf], exclude: &GlobSet) -> Result<Vec<PathBuf>, String> {
    let mut files = BTreeSet::new();
    for input in inputs {
        let skip = |p: &Path, root: &Path| {
            exclude.is_match(p) || p.strip_prefix(root).is_ok_and(|rel| !rel.as_os_str().is_empty() && exclude.is_match(rel))
        };
        if input.is_dir() {
            for entry in WalkDir::new(input).sort_by_file_name() {
                let entry = entry.map_err(|e| format!("{}: {e}", input.display()))?;
                let p = entry.path();
                if entry.file_type().is_file() && is_source(p) && !skip(p, input) {
                    files.insert(p.to_path_buf());
                }
            }
        } else if input.is_file() {
            if !skip(input, Path::new("")) {
                files.insert(input.clone());
            }
        } else {
            return Err(format!("{}: no such file or directory", input.display()));
        }
    }
    Ok(files.into_iter().collect())
}

/// Findings for every file, in path order whatever the scheduling.
pub fn analyze_all(files: &[PathBuf], include_dirs: &[PathBuf], catalog: &Catalog, enabled: &DetectorSet) -> Vec<FileAnalysis> {
    files.par_iter().map(|f| analyze_file(f, include_dirs, catalog, enabled)).collect()
}

fn load_catalog(path: Option<&Path>) -> Result<Catalog, String> {
    let mut catalog = Catalog::builtin();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
        catalog.apply_overrides(&text).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(catalog)
}

/// Run with the given arguments (including the program name). Returns the
/// process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_CLEAN };
            let text = if color { e.render().ansi().to_string() } else { e.render().to_string() };
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let fail = |err: &mut dyn Write, msg: String| {
        let _ = writeln!(err, "tonscanner: {msg}");
        EXIT_ERROR
    };
    let catalog = match load_catalog(cli.catalog.as_deref()) {
        Ok(c) => c,
        Err(m) => return fail(err, m),
    };
    let exclude = match excludes(&cli.exclude) {
        Ok(g) => g,
        Err(e) => return fail(err, format!("bad --exclude pattern: {e}")),
    };
    let files = match collect_inputs(&cli.inputs, &exclude) {
        Ok(f) => f,
        Err(m) => return fail(err, m),
    };

    let analyses = analyze_all(&files, &cli.include_path, &catalog, &cli.detectors);
    let report = Report::from_analyses(&analyses);
    let rendered = match cli.format {
        Format::Json => render_json(&report),
        Format::Text => render_text(&report, &Sources::from_analyses(&analyses), color),
    };
    if out.write_all(rendered.as_bytes()).is_err() {
        return EXIT_ERROR;
    }

    let fatal: Vec<_> = analyses
        .iter()
        .flat_map(|a| a.errors().iter().filter(|e| !e.is_recovered()).map(move |e| (a, e)))
        .collect();
    for (a, e) in &fatal {
        let _ = writeln!(err, "tonscanner: {}: {e}", a.path.display());
    }
    if !fatal.is_empty() {
        EXIT_ERROR
    } else if cli.fail_on_findings && report.total() > 0 {
        EXIT_FINDINGS
    } else {
        EXIT_CLEAN
    }
}
