//! The command-line surface: outputs, exit codes and file formats.

use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use supertask::cli::{run_from, EXIT_OK, EXIT_USAGE, EXIT_VERIFY};
use supertask::experiment::{read_chain, write_chain};
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["supertask"];
    argv.extend_from_slice(args);
    let code = run_from(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

const EVENS: &str = r#"{"kind":"residue","mod":2,"res":0}"#;

fn greedy_chain(dir: &TempDir) -> String {
    let chain = path(dir, "chain.json");
    let (code, _) = run(&["construct", "--target", EVENS, "--p", "1/3", "--steps", "8", "--mode", "greedy", "--out", &chain]);
    assert_eq!(code, EXIT_OK);
    chain
}

#[test]
fn construct_writes_chain_and_trace() {
    let dir = TempDir::new().unwrap();
    let chain = path(&dir, "c.json");
    let trace = path(&dir, "t.csv");
    let (code, out) =
        run(&["construct", "--target", EVENS, "--p", "1/3", "--steps", "8", "--mode", "greedy", "--out", &chain, "--trace", &trace]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["final_density"]["exact"], "1/3");
    let c = read_chain(Path::new(&chain)).unwrap();
    assert_eq!(c.added(), &[1, 2, 3, 4, 5, 7, 6, 9, 11]);
    let csv = fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,count,density_num,density_den"));
    assert_eq!(lines.next(), Some("1,0,0,1"));
    assert_eq!(lines.last(), Some("9,3,1,3"));
}

#[test]
fn chain_file_round_trips_byte_identically() {
    let dir = TempDir::new().unwrap();
    let chain = path(&dir, "c.json");
    let (code, _) = run(&["construct", "--target", r#"{"kind":"periodic","prefix":"","block":"110"}"#, "--p", "0.9", "--steps", "500", "--out", &chain]);
    assert_eq!(code, EXIT_OK);
    let again = dir.path().join("again.json");
    write_chain(&again, &read_chain(Path::new(&chain)).unwrap()).unwrap();
    assert_eq!(fs::read(&chain).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn construct_refuses_finite_and_cofinite_targets() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "c.json");
    for target in [r#"{"kind":"periodic","prefix":"0101","block":"0"}"#, r#"{"kind":"periodic","prefix":"0","block":"1"}"#] {
        let (code, _) = run(&["construct", "--target", target, "--p", "1/2", "--steps", "10", "--out", &out]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!Path::new(&out).exists());
    }
}

#[test]
fn malformed_inputs_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let chain = greedy_chain(&dir);
    assert_eq!(run(&["construct", "--target", EVENS, "--p", "3/2", "--steps", "5", "--out", &chain]).0, EXIT_USAGE);
    assert_eq!(run(&["construct", "--target", EVENS, "--p", "x", "--steps", "5", "--out", &chain]).0, EXIT_USAGE);
    assert_eq!(run(&["construct", "--target", "{\"kind\":\"nope\"}", "--p", "1/2", "--steps", "5", "--out", &chain]).0, EXIT_USAGE);
    assert_eq!(run(&["density", "--chain", &path(&dir, "missing.json"), "--event", "{}", "--n", "3"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    let bad = path(&dir, "bad.json");
    fs::write(&bad, r#"{"added":[1,2,2]}"#).unwrap();
    let final_one = r#"{"level":1,"horizon":1,"predicate":{"op":"atom","atom":"final_is","ball":1}}"#;
    assert_eq!(run(&["density", "--chain", &bad, "--event", final_one, "--n", "2"]).0, EXIT_USAGE);
}

#[test]
fn density_reports_exact_fraction() {
    let dir = TempDir::new().unwrap();
    let chain = greedy_chain(&dir);
    let event = format!(r#"{{"level":1,"horizon":1,"predicate":{{"op":"atom","atom":"final_in_target","target":{EVENS}}}}}"#);
    let (code, out) = run(&["density", "--chain", &chain, "--event", &event, "--n", "9"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["value"], "1/3");
    assert_eq!(v["total"], "362880");
    assert_eq!(v["hits"], "120960");
}

#[test]
fn density_respects_the_cap() {
    let dir = TempDir::new().unwrap();
    let chain = path(&dir, "c.json");
    run(&["construct", "--target", EVENS, "--p", "1/2", "--steps", "20", "--out", &chain]);
    let event = r#"{"level":1,"horizon":1,"predicate":{"op":"atom","atom":"final_is","ball":1}}"#;
    assert_eq!(run(&["density", "--chain", &chain, "--event", event, "--n", "11"]).0, EXIT_USAGE);
}

#[test]
fn verify_and_survival_pass_and_mismatches_are_rejected() {
    let dir = TempDir::new().unwrap();
    let chain = path(&dir, "z5.json");
    fs::write(&chain, r#"{"added":[1,2,3,4,5]}"#).unwrap();
    let event = r#"{"level":2,"horizon":2,"predicate":{"op":"atom","atom":"equals","level":2,"set":[1,2]}}"#;
    let (code, out) = run(&["verify", "--chain", &chain, "--event", event, "--k", "2", "--n", "5", "--full"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["histories"], 20);
    assert_eq!(v["per_history"].as_array().unwrap().len(), 20);
    assert!(v["failures"].as_array().unwrap().is_empty());
    assert_eq!(run(&["verify", "--chain", &chain, "--event", event, "--k", "1", "--n", "5"]).0, EXIT_USAGE);

    let (code, out) = run(&["survival", "--chain", &chain, "--ball", "3", "--k", "1", "--n", "5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["value"]["exact"], "1/5");
    assert_eq!(run(&["survival", "--chain", &chain, "--ball", "9", "--k", "1", "--n", "5"]).0, EXIT_USAGE);
}

#[test]
fn simulate_is_reproducible_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let chain = greedy_chain(&dir);
    let csv1 = path(&dir, "a.csv");
    let csv8 = path(&dir, "b.csv");
    let (c1, o1) = run(&["--workers", "1", "simulate", "--chain", &chain, "--trials", "20000", "--seed", "7", "--target", EVENS, "--csv", &csv1]);
    let (c8, o8) = run(&["--workers", "8", "simulate", "--chain", &chain, "--trials", "20000", "--seed", "7", "--target", EVENS, "--csv", &csv8]);
    assert_eq!((c1, c8), (EXIT_OK, EXIT_OK));
    assert_eq!(o1, o8);
    assert_eq!(fs::read(&csv1).unwrap(), fs::read(&csv8).unwrap());
    let v = json(&o1);
    assert_eq!(v["provenance"], "sampled");
    assert_eq!(v["counts"].as_array().unwrap().len(), 9);
    let (_, other) = run(&["simulate", "--chain", &chain, "--trials", "20000", "--seed", "8"]);
    assert_ne!(json(&other)["counts"], v["counts"]);
}

#[test]
fn crosscheck_passes_on_small_chain() {
    let dir = TempDir::new().unwrap();
    let chain = greedy_chain(&dir);
    let (code, out) = run(&["crosscheck", "--chain", &chain, "--n", "5", "--trials", "100000"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn limits_reads_a_trace() {
    let dir = TempDir::new().unwrap();
    let chain = path(&dir, "c.json");
    let trace = path(&dir, "t.csv");
    run(&["construct", "--target", EVENS, "--p", "1/3", "--steps", "10000", "--out", &chain, "--trace", &trace]);
    let (code, out) = run(&["limits", "--trace", &trace]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["verdict"]["status"], "converged");
    assert!(v["note"].as_str().unwrap().contains("finite"));
}

fn write_manifest(dir: &TempDir, body: &str) -> String {
    let m = path(dir, "manifest.json");
    fs::write(&m, body).unwrap();
    m
}

#[test]
fn run_writes_report_with_every_section() {
    let dir = TempDir::new().unwrap();
    let manifest = write_manifest(
        &dir,
        r#"{
          "format_version": 1,
          "name": "mixed",
          "targets": [
            {"target": {"kind":"residue","mod":2,"res":0}, "p": ["1/2"]},
            {"target": {"kind":"periodic","prefix":"1011","block":"0"}, "p": ["1/2"]}
          ],
          "steps": 10000,
          "n": 6,
          "trials": 20000,
          "finite_sets": [[7]],
          "out_dir": "out"
        }"#,
    );
    let (code, out) = run(&["run", "--manifest", &manifest]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v = json(&out);
    let on_disk = json(&fs::read_to_string(dir.path().join("out/report.json")).unwrap());
    assert_eq!(v, on_disk);
    assert_eq!(v["steering"]["status"], "ok");
    let steer = &v["steering"]["entries"][0];
    assert_eq!(steer["enumerated"]["provenance"], "exact");
    assert_eq!(steer["sampled"]["provenance"], "sampled");
    assert_eq!(steer["diagnostics"]["converged_to_p"], true);
    assert_eq!(v["refused"]["status"], "ok");
    assert_eq!(v["refused"]["entries"][0]["size_class"], "finite");
    assert_eq!(v["finite"]["status"], "ok");
    assert_eq!(v["cofinite"]["status"], "skipped");
    assert!(v["cofinite"]["reason"].as_str().is_some());
    assert!(v["limit_note"].as_str().is_some());
    assert!(dir.path().join("out/chain-0.json").exists());
    assert!(dir.path().join("out/trace-0.csv").exists());
}

#[test]
fn run_rejects_bad_manifests() {
    let dir = TempDir::new().unwrap();
    let unknown = write_manifest(&dir, r#"{"format_version":1,"name":"x","steps":10,"out_dir":"o","bogus":1}"#);
    assert_eq!(run(&["run", "--manifest", &unknown]).0, EXIT_USAGE);
    let version = write_manifest(&dir, r#"{"format_version":9,"name":"x","steps":10,"out_dir":"o"}"#);
    assert_eq!(run(&["run", "--manifest", &version]).0, EXIT_USAGE);
    let bad_p = write_manifest(
        &dir,
        r#"{"format_version":1,"name":"x","steps":10,"out_dir":"o","targets":[{"target":{"kind":"residue","mod":2,"res":0},"p":["5/4"]}]}"#,
    );
    assert_eq!(run(&["run", "--manifest", &bad_p]).0, EXIT_USAGE);
    assert_eq!(run(&["run", "--manifest", &path(&dir, "absent.json")]).0, EXIT_USAGE);
}

#[test]
fn run_exits_nonzero_when_steering_misses() {
    // At p = 1 the square exceptions keep the density about 1/sqrt(k) short
    // of the target, so the convergence check fails.
    let dir = TempDir::new().unwrap();
    let manifest = write_manifest(
        &dir,
        r#"{"format_version":1,"name":"edge","steps":10000,"n":5,"trials":10000,"out_dir":"o",
            "targets":[{"target":{"kind":"residue","mod":2,"res":0},"p":["1"]}]}"#,
    );
    let (code, out) = run(&["run", "--manifest", &manifest]);
    assert_eq!(code, EXIT_VERIFY);
    assert_eq!(json(&out)["checks"]["exact_failed"], 0);
}

#[test]
fn residue_demo_converges_for_one_class() {
    let dir = TempDir::new().unwrap();
    let out_dir = path(&dir, "demo");
    let (code, out) = run(&["residue-demo", "--m", "3", "--class", "0", "--p", "0.9", "--trials", "20000", "--out-dir", &out_dir]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v = json(&out);
    let entries = v["steering"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0]["p"], "9/10");
    assert_eq!(entries[0]["diagnostics"]["verdict"]["status"], "converged");
    assert!(Path::new(&out_dir).join("report.json").exists());
}

#[test]
fn binary_honours_a_lowered_cap_only() {
    let dir = TempDir::new().unwrap();
    let chain = path(&dir, "z.json");
    fs::write(&chain, r#"{"added":[1,2,3,4,5,6,7,8,9,10,11,12]}"#).unwrap();
    let event = r#"{"level":1,"horizon":1,"predicate":{"op":"atom","atom":"final_is","ball":1}}"#;
    let exe = env!("CARGO_BIN_EXE_supertask");
    let status = |cap: &str, n: &str| {
        Command::new(exe)
            .args(["density", "--chain", &chain, "--event", event, "--n", n])
            .env("SUPERTASK_CAP", cap)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(status("5", "5"), Some(EXIT_OK));
    assert_eq!(status("5", "6"), Some(EXIT_USAGE));
    assert_eq!(status("99", "11"), Some(EXIT_USAGE));
    let out = Command::new(exe).args(["density", "--chain", &chain, "--event", event, "--n", "4"]).output().unwrap();
    assert_eq!(json(&String::from_utf8(out.stdout).unwrap())["value"], "1/4");
}
