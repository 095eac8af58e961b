//! End-to-end checks of the `confstress` binary.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_confstress"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("confstress-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn csv_column(text: &str, col: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == col).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn list_names_every_scenario() {
    let out = run(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["example1-gct", "void-linear", "shock-energy-balance", "phase-boundary", "pohozaev"] {
        assert!(text.lines().any(|l| l.split('\t').next() == Some(name)), "{name} missing");
    }
}

#[test]
fn report_has_the_documented_keys() {
    let out = run(&["run", "example1-gct", "--deterministic"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(keys, ["identities", "params", "pass", "runtime_ms", "scenario", "version"]);
    for id in v["identities"].as_array().unwrap() {
        let mut k: Vec<_> = id.as_object().unwrap().keys().cloned().collect();
        k.sort();
        assert_eq!(k, ["abs_err", "lhs", "name", "paper_anchor", "pass", "rel_err", "rhs", "tol"]);
    }
    assert_eq!(v["runtime_ms"], 0);
    assert_eq!(v["pass"], true);
    let lhs = num(&v["identities"][0]["lhs"]);
    assert!((lhs - 4.0 * PI / 27.0).abs() < 1e-8, "{lhs}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["run", "example1-gct"]).status.code(), Some(0));
    assert_eq!(run(&["run", "example1-gct", "--tol", "1e-300"]).status.code(), Some(1));
    let unknown = run(&["run", "no-such-scenario"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("example1-gct"));
    assert_eq!(run(&["run", "example1-gct", "--set", "bogus=1"]).status.code(), Some(2));
    assert_eq!(run(&["run", "pohozaev", "--set", "q=7"]).status.code(), Some(2));
    let solver = run(&["run", "phase-boundary", "--set", "bias=5"]);
    assert_eq!(solver.status.code(), Some(3));
    assert_eq!(json(&solver)["pass"], false);
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let a = run(&["run", "void-linear", "--deterministic"]);
    let b = run(&["run", "void-linear", "--deterministic"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn set_overrides_config_file() {
    let dir = scratch("config");
    let cfg = dir.join("void.toml");
    std::fs::write(&cfg, "p = 2.0\nlambda = 1.0\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = json(&run(&["run", "void-linear", "--config", cfg]));
    assert_eq!(num(&from_file["params"]["p"]), 2.0);
    let both = json(&run(&["run", "void-linear", "--config", cfg, "--set", "p=3"]));
    assert_eq!(num(&both["params"]["p"]), 3.0);
}

#[test]
fn void_sweep_scales_quadratically_in_p() {
    let dir = scratch("void");
    let out = dir.join("sweep.csv");
    let table = dir.join("table.csv");
    let status = run(&[
        "sweep",
        "void-linear",
        "--param",
        "p",
        "--values",
        "0.5,1,2",
        "--out",
        out.to_str().unwrap(),
        "--void-table",
        table.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    let lhs = csv_column(&std::fs::read_to_string(&out).unwrap(), "lhs");
    assert!((lhs[1] / lhs[0] - 4.0).abs() < 1e-8 && (lhs[2] / lhs[0] - 16.0).abs() < 1e-8, "{lhs:?}");
    let t = std::fs::read_to_string(&table).unwrap();
    let de = csv_column(&t, "dE_linear");
    let g = csv_column(&t, "G");
    assert!((de[2] / de[0] - 16.0).abs() < 1e-8 && (g[2] / g[0] - 16.0).abs() < 1e-8);
}

#[test]
fn example1_sweep_scales_with_prestrain_squared() {
    let out = scratch("a").join("a.csv");
    let status = run(&["sweep", "gct-example1", "--param", "a", "--values", "1,2,3", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lhs = csv_column(&text, "lhs");
    for (k, a) in [1.0, 2.0, 3.0].iter().enumerate() {
        assert!((lhs[k] / lhs[0] - a * a).abs() < 1e-8, "{lhs:?}");
    }
    assert!(text.lines().skip(1).all(|l| l.ends_with("true")));
}

#[test]
fn empty_sweep_writes_header_only() {
    let out = scratch("empty").join("e.csv");
    let status = run(&["sweep", "void-linear", "--param", "p", "--values", "", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "value,lhs,rhs,rel_err,pass\n");
}

#[test]
fn sweep_rejects_unknown_parameter() {
    let out = scratch("bad").join("b.csv");
    let status = run(&["sweep", "void-linear", "--param", "zeta", "--values", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn tsv_export_and_json_file() {
    let dir = scratch("tsv");
    let json_path = dir.join("pb.json");
    let status = run(&[
        "run",
        "phase-boundary",
        "--tsv",
        dir.to_str().unwrap(),
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(v["scenario"], "phase-boundary");
    let tsv = std::fs::read_to_string(dir.join("phase-boundary-profile.tsv")).unwrap();
    let mut lines = tsv.lines();
    assert_eq!(lines.next().unwrap().split('\t').next(), Some("r"));
    let first: Vec<f64> = lines.next().unwrap().split('\t').map(|s| s.parse().unwrap()).collect();
    assert_eq!(first[..3], [1.0, 1.0, 2.0]);
}

#[test]
fn shock_energy_balance_passes() {
    let out = run(&["run", "shock-energy-balance"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["identities"].as_array().unwrap().iter().all(|i| i["pass"] == true));
}

#[test]
fn every_scenario_passes_with_defaults() {
    let listing = String::from_utf8(run(&["list"]).stdout).unwrap();
    for line in listing.lines() {
        let name = line.split('\t').next().unwrap();
        let out = run(&["run", name, "--deterministic"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
