//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{all_fixture_files, analyze, cell_oracle, criteria, dom_oracle, ssa_oracle, taint_oracle};
use tonscanner_core::report::{render_json, Report};

fn listings() -> Result<String, String> {
    let start = Instant::now();
    let n = criteria::golden("listings")?;
    criteria::defect_lines()?;
    let t = start.elapsed().as_secs_f64();
    if t >= 1.0 {
        return Err(format!("took {t:.2} s"));
    }
    Ok(format!("{n} listings match their expected findings exactly, each defect on its expected line, {t:.3} s"))
}

fn fixed() -> Result<String, String> {
    let n = criteria::golden("fixed")?;
    criteria::fixes_are_clean()?;
    Ok(format!("{n} fixed listings free of their detector's findings"))
}

fn properties() -> Result<String, String> {
    let fx = ssa_oracle::fixture_functions()?;
    let rnd = ssa_oracle::random_programs(500)?;
    let start = Instant::now();
    let nodes = dom_oracle::check(1000)?;
    let dom_t = start.elapsed().as_secs_f64();
    if dom_t >= 10.0 {
        return Err(format!("dominator oracle took {dom_t:.2} s"));
    }
    let cells = cell_oracle::check(500)?;
    let (tf, _) = taint_oracle::check()?;
    Ok(format!(
        "SSA: {fx} fixture functions + 500 random programs ({} runs agree pre/post SSA); \
         dominators: 1000 graphs, {nodes} nodes, 0 mismatches, {dom_t:.3} s; \
         cells: 500 programs ({} compatible, {} diverged, {} exhausted), 0 mismatches; \
         taint: {tf} functions monotone and idempotent",
        rnd.runs, cells.faithful, cells.diverged, cells.exhausted
    ))
}

fn tree_json() -> String {
    let analyses: Vec<_> = all_fixture_files().iter().map(|p| analyze(p)).collect();
    render_json(&Report::from_analyses(&analyses))
}

fn determinism() -> Result<String, String> {
    let (a, b) = (tree_json(), tree_json());
    if a != b {
        return Err("two runs differ".into());
    }
    Ok(format!("two runs over {} files give identical JSON ({} bytes)", all_fixture_files().len(), a.len()))
}

fn throughput() -> Result<String, String> {
    let files: Vec<_> = common::fixture_files("corpus");
    let longest = files.iter().map(|f| std::fs::read_to_string(f).map(|t| t.lines().count()).unwrap_or(usize::MAX)).max().unwrap_or(0);
    if files.len() < 50 || longest > 300 {
        return Err(format!("{} contracts, longest {longest} lines", files.len()));
    }
    let start = Instant::now();
    for f in &files {
        analyze(f);
    }
    let t = start.elapsed().as_secs_f64();
    if t >= 5.0 {
        return Err(format!("{} contracts took {t:.2} s", files.len()));
    }
    Ok(format!("{} contracts (at most {longest} lines) in {t:.3} s", files.len()))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Result<String, String>); 5] = [
        ("1 listing corpus detection", listings),
        ("2 fixed-corpus cleanliness", fixed),
        ("3 property suite", properties),
        ("4 determinism", determinism),
        ("5 throughput", throughput),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
