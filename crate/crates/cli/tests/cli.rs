use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_z2flow"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not a report ({e}):\n{}\nstderr:\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("z2flow-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn kitaev_flux_reports_one() {
    let out = run(&["kitaev-flux", "--mu", "0", "--sites", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["command"], "kitaev-flux");
    assert_eq!(r["value"]["sf2"], 1);
    for key in ["config", "segments", "diagnostics", "timings"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn linear_generator_reports_one() {
    let out = run(&["sf2-path", "--generator", "linear-2x2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["value"]["sf2"], 1);
    let out = run(&["sf2-path", "--generator", "abs-2x2", "--method", "all"]);
    let r = report(&out);
    assert_eq!(r["value"]["sf2"], 0);
    assert_eq!(r["value"]["methods"]["crossings"], Value::Null);
}

#[test]
fn validate_is_green() {
    let out = run(&["validate", "--seed", "7"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.contains("11 of 11 suites passed"), "{text}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["kitaev-flux", "--sites", "many"]).status.code(), Some(1));
    assert_eq!(run(&["kitaev-flux", "--sites", "0"]).status.code(), Some(1));
    assert_eq!(run(&["--epsilon", "0.5", "toeplitz"]).status.code(), Some(1));
    assert_eq!(run(&["jmap", "--dim", "3"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let bad = bin().env("Z2FLOW_THREADS", "lots").args(["toeplitz", "--sites", "3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn refusals_exit_two_with_diagnostics() {
    let out = run(&["kitaev-flux", "--boundary", "open", "--sites", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "GapClosed");
    assert!(r["error"]["message"].as_str().unwrap().contains("<="));

    // a path whose endpoint has a kernel
    let csv = scratch("kernel.csv");
    std::fs::write(&csv, "0,0,0\n0,0,0\n1,0,-1\n1,1,0\n").unwrap();
    std::fs::write(csv.with_extension("json"), r#"{"schema": 1, "dim": 2}"#).unwrap();
    let out = run(&["sf2-path", "--samples", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "NonMinimalKernel");
}

#[test]
fn sampled_paths() {
    let csv = scratch("linear.csv");
    // t ↦ (2t-1)σ sampled at three times
    std::fs::write(&csv, "# t, row\n0,0,1\n0,-1,0\n0.5,0,0\n0.5,0,0\n1,0,-1\n1,1,0\n").unwrap();
    let side = scratch("linear-meta.json");
    std::fs::write(&side, r#"{"schema": 1, "dim": 2, "loop": false}"#).unwrap();
    let out = run(&["sf2-path", "--samples", csv.to_str().unwrap(), "--sidecar", side.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["value"]["sf2"], 1);

    std::fs::write(&side, r#"{"schema": 2, "dim": 2}"#).unwrap();
    let out = run(&["sf2-path", "--samples", csv.to_str().unwrap(), "--sidecar", side.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_file_round_trips() {
    let path = scratch("flux.json");
    let out = run(&["toeplitz", "--sites", "5", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: Value = serde_json::from_str(&text).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(again, parsed);
    assert_eq!(parsed, report(&out));
    assert_eq!(parsed["value"]["sf2"], 1);
    assert_eq!(parsed["value"]["toeplitz_index"], 1);
}

fn without_timings(out: &Output) -> String {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let cut = text.find("\"timings\"").expect("timings field");
    text[..cut].to_string()
}

#[test]
fn identical_runs_give_identical_reports() {
    let args = ["sf2-path", "--generator", "planted", "--seed", "5", "--dim", "12", "--method", "all"];
    let a = run(&args);
    let b = bin().env("Z2FLOW_THREADS", "1").args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_timings(&a), without_timings(&b));
    let p = ["polarization", "--cells", "8", "--lambda", "0.02", "--seed", "4"];
    assert_eq!(without_timings(&run(&p)), without_timings(&run(&p)));
}

#[test]
fn csv_spectra() {
    let path = scratch("spectra.csv");
    let out = run(&["kitaev-flux", "--sites", "6", "--mu", "0.3", "--points", "11", "--csv", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# schema: 1\nt_or_alpha,eigenvalue_index,value\n"));
    let spectra = z2flow_models::io::read_spectra(text.as_bytes()).unwrap();
    assert_eq!(spectra.len(), 11);
    assert!(spectra.iter().all(|(_, v)| v.len() == 26));
    // particle-hole symmetric spectra
    for (_, v) in &spectra {
        let n = v.len();
        assert!((0..n).all(|k| (v[k] + v[n - 1 - k]).abs() < 1e-10));
    }
}

#[test]
fn model_config_files() {
    let path = scratch("kitaev.json");
    std::fs::write(&path, r#"{"model": "kitaev", "sites": 12, "mu": 1.5, "boundary": "periodic"}"#).unwrap();
    let out = run(&["kitaev-flux", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["value"]["sf2"], 0);
    assert_eq!(r["diagnostics"]["model"]["sites"], 12);
    let out = run(&["polarization", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
