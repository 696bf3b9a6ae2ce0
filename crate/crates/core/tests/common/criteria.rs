//! Checks shared by the golden tests and the acceptance runner.

use tonscanner_core::detectors::DetectorId;

use super::{analyze, fixture_files, fixtures, keys};

/// The detector each listing illustrates, in listing order.
pub const PER_LISTING: [DetectorId; 8] = [
    DetectorId::Br,
    DetectorId::Pl,
    DetectorId::Ur,
    DetectorId::Gvr,
    DetectorId::Ifm,
    DetectorId::Ubm,
    DetectorId::Id,
    DetectorId::Lep,
];

/// Every `.fc` under `fixtures/<sub>` against its `.expected` file. Returns
/// the number of files compared.
pub fn golden(sub: &str) -> Result<usize, String> {
    let mut failures = Vec::new();
    let files = fixture_files(sub);
    for path in &files {
        let a = analyze(path);
        if !a.errors().is_empty() {
            failures.push(format!("{}: {:?}", path.display(), a.errors()));
            continue;
        }
        let got = keys(&a.findings);
        let text = std::fs::read_to_string(path.with_extension("expected")).map_err(|e| format!("{}: {e}", path.display()))?;
        let want: Vec<String> = text.lines().filter(|l| !l.trim().is_empty()).map(str::to_string).collect();
        if got != want {
            failures.push(format!("{}: expected {want:?}, got {got:?}", path.display()));
        }
    }
    if failures.is_empty() {
        Ok(files.len())
    } else {
        Err(failures.join("\n"))
    }
}

fn lines_of(path: &std::path::Path, d: DetectorId) -> Vec<u32> {
    analyze(path).findings.iter().filter(|f| f.detector == d).map(|f| f.span.start_line).collect()
}

/// The named defect of each listing on the line that exhibits it.
pub fn defect_lines() -> Result<(), String> {
    let listing = |n: usize| fixtures().join(format!("listings/listing{n}.fc"));
    let mut bad = Vec::new();
    let mut exact = |n: usize, want: &[u32]| {
        let got = lines_of(&listing(n), PER_LISTING[n - 1]);
        if got != want {
            bad.push(format!("listing{n}: {} at lines {got:?}, want {want:?}", PER_LISTING[n - 1]));
        }
    };
    exact(1, &[3]);
    exact(2, &[5, 6]);
    exact(5, &[1]);
    exact(6, &[9]);
    exact(7, &[9]);
    exact(8, &[4]);
    for (n, line) in [(3, 3), (4, 5)] {
        let got = lines_of(&listing(n), PER_LISTING[n - 1]);
        if !got.contains(&line) {
            bad.push(format!("listing{n}: {} at lines {got:?}, want one at {line}", PER_LISTING[n - 1]));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join("; "))
    }
}

/// Fixed listing `n` has no finding of listing `n`'s detector, while the
/// original does.
pub fn fixes_are_clean() -> Result<(), String> {
    let mut bad = Vec::new();
    for (i, d) in PER_LISTING.iter().enumerate() {
        let n = i + 1;
        let after = lines_of(&fixtures().join(format!("fixed/listing{n}.fc")), *d);
        let before = lines_of(&fixtures().join(format!("listings/listing{n}.fc")), *d);
        if !after.is_empty() {
            bad.push(format!("fixed/listing{n}: {d} still at lines {after:?}"));
        }
        if before.is_empty() {
            bad.push(format!("listing{n}: no {d} to fix"));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join("; "))
    }
}
