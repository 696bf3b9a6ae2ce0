use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tonscanner::{run, EXIT_CLEAN, EXIT_ERROR, EXIT_FINDINGS};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn fx(rel: &str) -> String {
    fixtures().join(rel).display().to_string()
}

/// Run in-process without color; returns (exit code, stdout, stderr).
fn scan(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("tonscanner").chain(args.iter().copied()), &mut out, &mut err, false);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, out, err) = scan(&full);
    assert!(code == EXIT_CLEAN || code == EXIT_FINDINGS, "exit {code}: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn single_detector_json_on_listing1() {
    let l1 = fx("listings/listing1.fc");
    let v = json(&["--detectors", "br", &l1]);
    let findings = v["files"][0]["findings"].as_array().unwrap();
    assert_eq!(findings.len(), 1);
    assert_eq!(findings[0]["detector"], "BR");
    assert_eq!(findings[0]["severity"], "high");
    assert_eq!(findings[0]["line"], 3);
    assert_eq!(v["summary"]["br"], 1);
    assert_eq!(v["summary"]["total"], 1);

    let (code, _, _) = scan(&["--detectors", "br", "--fail-on-findings", &l1]);
    assert_eq!(code, EXIT_FINDINGS);
    let (code, _, _) = scan(&["--detectors", "br", &l1]);
    assert_eq!(code, EXIT_CLEAN);
    let (code, _, _) = scan(&["--detectors", "lep", "--fail-on-findings", &l1]);
    assert_eq!(code, EXIT_CLEAN);
}

#[test]
fn usage_errors_exit_2() {
    let l1 = fx("listings/listing1.fc");
    let (code, out, err) = scan(&["--detectors", "nosuch", &l1]);
    assert_eq!(code, EXIT_ERROR);
    assert!(out.is_empty());
    assert!(err.contains("nosuch"), "{err}");
    assert_eq!(scan(&[]).0, EXIT_ERROR);
    assert_eq!(scan(&["--format", "xml", &l1]).0, EXIT_ERROR);
    assert_eq!(scan(&["--exclude", "[", &l1]).0, EXIT_ERROR);
    let (code, _, err) = scan(&["/definitely/not/here.fc"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("no such file"), "{err}");
}

#[test]
fn help_and_version_exit_0() {
    let (code, out, _) = scan(&["--help"]);
    assert_eq!(code, EXIT_CLEAN);
    assert!(out.contains("--detectors") && out.contains("--fail-on-findings"));
    let (code, out, _) = scan(&["--version"]);
    assert_eq!(code, EXIT_CLEAN);
    assert!(out.starts_with("tonscanner "));
}

#[test]
fn directory_run_is_the_merge_of_file_runs() {
    let dir = fx("corpus");
    let whole = json(&[&dir]);
    let files = whole["files"].as_array().unwrap();
    assert_eq!(files.len(), 50);
    let mut total = 0;
    for f in files {
        let single = json(&[f["path"].as_str().unwrap()]);
        assert_eq!(single["files"].as_array().unwrap().len(), 1);
        assert_eq!(&single["files"][0], f);
        total += single["summary"]["total"].as_u64().unwrap();
    }
    assert_eq!(whole["summary"]["total"].as_u64().unwrap(), total);
}

#[test]
fn whole_tree_is_deterministic() {
    let root = fixtures().display().to_string();
    let (c1, a, _) = scan(&["--format", "json", &root]);
    let (c2, b, _) = scan(&["--format", "json", &root]);
    assert_eq!((c1, c2), (EXIT_CLEAN, EXIT_CLEAN));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["files"].as_array().unwrap().len(), 66);
}

#[test]
fn excludes_match_relative_and_full_paths() {
    let root = fixtures().display().to_string();
    let n = |args: &[&str]| json(args)["files"].as_array().unwrap().len();
    assert_eq!(n(&[&root]), 66);
    assert_eq!(n(&["--exclude", "corpus/**", &root]), 16);
    assert_eq!(n(&["--exclude", "**/listing*.fc", &root]), 50);
    assert_eq!(n(&["--exclude", "fixed/*", "--exclude", "listings/*", &root]), 50);
}

#[test]
fn directories_pick_up_only_func_sources() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.fc"), "int f() { return 1; }\n").unwrap();
    std::fs::write(dir.path().join("b.func"), "int g() { return 2; }\n").unwrap();
    std::fs::write(dir.path().join("notes.txt"), "not code").unwrap();
    std::fs::write(dir.path().join("a.expected"), "").unwrap();
    let v = json(&[dir.path().to_str().unwrap()]);
    let paths: Vec<&str> = v["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    assert_eq!(paths.len(), 2);
    assert!(paths[0].ends_with("a.fc") && paths[1].ends_with("b.func"));
}

#[test]
fn catalog_override_changes_sources() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("c.fc");
    std::fs::write(&src, "() recv_internal(slice in_msg_body) impure {\n    randomize(now());\n}\n").unwrap();
    let cat = dir.path().join("cat.json");
    std::fs::write(&cat, r#"{"now": {"args": 0, "rets": 1, "effects": ["EnvRead", "LogicalTimeSource"]}}"#).unwrap();
    let s = src.to_str().unwrap();
    assert_eq!(json(&["--detectors", "br", s])["summary"]["br"], 0);
    assert_eq!(json(&["--detectors", "br", "--catalog", cat.to_str().unwrap(), s])["summary"]["br"], 1);

    std::fs::write(&cat, "{ not json").unwrap();
    assert_eq!(scan(&["--catalog", cat.to_str().unwrap(), s]).0, EXIT_ERROR);
    assert_eq!(scan(&["--catalog", "/no/such/catalog.json", s]).0, EXIT_ERROR);
}

#[test]
fn includes_are_followed_and_findings_land_in_the_included_file() {
    let dir = tempfile::tempdir().unwrap();
    let lib = dir.path().join("lib");
    std::fs::create_dir(&lib).unwrap();
    std::fs::write(lib.join("helpers.fc"), "int pick() {\n    randomize(cur_lt());\n    return rand(10);\n}\n").unwrap();
    let main = dir.path().join("main.fc");
    std::fs::write(&main, "#include \"helpers.fc\";\n() recv_internal(slice in_msg_body) impure {\n    pick();\n}\n").unwrap();
    let m = main.to_str().unwrap();

    let (code, out, err) = scan(&["--format", "json", m]);
    assert_eq!(code, EXIT_ERROR, "missing include must be fatal: {out}");
    assert!(err.contains("helpers.fc"), "{err}");

    let v = json(&["--include-path", lib.to_str().unwrap(), m]);
    let files = v["files"].as_array().unwrap();
    let helper = files.iter().find(|f| f["path"].as_str().unwrap().ends_with("helpers.fc")).unwrap();
    assert!(helper["findings"].as_array().unwrap().iter().any(|f| f["detector"] == "BR"));
}

fn errors_of(out: &str) -> Vec<Value> {
    let v: Value = serde_json::from_str(out).unwrap();
    v["files"][0]["errors"].as_array().unwrap().clone()
}

#[test]
fn statement_errors_are_reported_but_recovered() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.fc");
    std::fs::write(&bad, "int f() { return 1 }\n() g(cell c) { set_data(c); }\n").unwrap();
    let (code, out, _) = scan(&["--format", "json", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_CLEAN);
    let errors = errors_of(&out);
    assert_eq!(errors.len(), 1);
    assert_eq!(errors[0]["line"], 1);
    // The rest of the file is still analysed.
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["files"][0]["findings"].as_array().unwrap().iter().any(|f| f["detector"] == "IFM"));
}

#[test]
fn declaration_and_lexical_errors_are_fatal() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [("decl.fc", "int f( {\n"), ("lex.fc", "int f() { return \"open; }\n")] {
        let bad = dir.path().join(name);
        std::fs::write(&bad, text).unwrap();
        let (code, out, err) = scan(&["--format", "json", bad.to_str().unwrap()]);
        assert_eq!(code, EXIT_ERROR, "{name}");
        assert!(!errors_of(&out).is_empty(), "{name}");
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn text_output_shows_location_snippet_and_footer() {
    let (_, out, _) = scan(&[&fx("listings/listing7.fc")]);
    let path = fx("listings/listing7.fc");
    assert!(out.contains(&format!("{path}:9:18: [ID] high: stored Uint:2 but loaded Uint:32 for field #0\n")), "{out}");
    assert!(out.ends_with("2 findings in 1 file\n"), "{out}");
    let (_, out, _) = scan(&[&fx("listings/listing1.fc")]);
    assert!(out.ends_with("1 finding in 1 file\n"), "{out}");
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[1].starts_with("    "));
    assert!(lines[2].trim_start().starts_with('^'));
}

fn binary(args: &[&str], no_color: Option<&str>) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tonscanner"));
    cmd.args(args);
    match no_color {
        Some(v) => cmd.env("NO_COLOR", v),
        None => cmd.env_remove("NO_COLOR"),
    };
    cmd.output().unwrap()
}

#[test]
fn binary_output_is_plain_when_piped_or_no_color() {
    let l = fx("listings/listing2.fc");
    for nc in [None, Some("1")] {
        let o = binary(&[&l], nc);
        assert_eq!(o.status.code(), Some(EXIT_CLEAN));
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(!text.contains('\x1b'), "{text}");
        assert!(text.contains("[PL] medium"));
    }
    assert_eq!(binary(&["--fail-on-findings", &l], None).status.code(), Some(EXIT_FINDINGS));
    assert_eq!(binary(&["--detectors", "bogus", &l], None).status.code(), Some(EXIT_ERROR));
}

#[test]
fn in_process_color_paints_severities() {
    let mut out = Vec::new();
    let code = run(["tonscanner", &fx("listings/listing2.fc")], &mut out, &mut Vec::new(), true);
    assert_eq!(code, EXIT_CLEAN);
    assert!(String::from_utf8(out).unwrap().contains("\x1b[33mmedium\x1b[0m"));
}
