use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use htorsion_cli::{REGISTRY, SETUP};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_htorsion"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// A directory holding the checked-in data files plus the outputs of the
/// setup commands.
fn fixture_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    for entry in std::fs::read_dir(data).unwrap() {
        let p = entry.unwrap().path();
        std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    for (name, args) in SETUP {
        let out = run(args);
        assert!(out.status.success(), "setup {name}: {}", String::from_utf8_lossy(&out.stderr));
        std::fs::write(dir.path().join(format!("{name}.json")), &out.stdout).unwrap();
    }
    dir
}

fn expand(args: &[&str], dir: &Path) -> Vec<String> {
    let d = dir.display().to_string();
    args.iter().map(|a| a.replace("{dir}", &d)).collect()
}

#[test]
fn every_registered_operation_runs() {
    let dir = fixture_dir();
    for entry in REGISTRY {
        let args = expand(entry.args, dir.path());
        let out = bin().args(&args).output().unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}: {}",
            entry.operation,
            String::from_utf8_lossy(&out.stderr)
        );
        json(&out);
    }
}

#[test]
fn registry_names_are_unique() {
    let mut names: Vec<_> = REGISTRY.iter().map(|e| e.operation).collect();
    names.sort_unstable();
    let n = names.len();
    names.dedup();
    assert_eq!(names.len(), n);
}

#[test]
fn lens_example_is_minus_three_zeta3() {
    let out = run(&["torsion", "lens", "--rank", "2", "--m", "2", "--z", "-1", "--k", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    let zeta3 = 1.202_056_903_159_594_3;
    let got = v["ch_multiple"].as_f64().unwrap();
    assert!((got + 3.0 * zeta3).abs() < 1e-12, "{got}");
    assert_eq!(v["provenance"], "lens_bundle");
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["torsion", "projective", "--rank", "2", "--k", "1", "--m", "3", "--z", "1/3", "--complex"][..],
        &["verify", "--suite", "newton"],
        &["verify", "--order", "8", "kt", "--family", "random_smooth", "--params", r#"{"seed":3,"n":2}"#],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_the_same_document() {
    let dir = tempfile::tempdir().unwrap();
    let path: PathBuf = dir.path().join("r.json");
    let args = ["torsion", "circle", "--k", "1", "--m", "2", "--z", "-1"];
    let direct = run(&args);
    let out = bin().args(args).arg("--out").arg(&path).output().unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn malformed_json_is_a_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"base\": [").unwrap();
    let out = bin().args(["twisted", "validate", "--file"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("line 1"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["torsion", "lens", "--k"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["torsion", "lens", "--k", "1", "--z", "1/0"]).status.code(), Some(2));
    // z = 1 needs the upper-triangular flag
    assert_eq!(run(&["torsion", "lens", "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn newton_suite_passes() {
    let out = run(&["verify", "--suite", "newton"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["job"]["suite"], "newton");
    assert!(v.get("wall_time_s").is_none());
}

#[test]
fn perturbed_suite_fails_with_a_named_record() {
    let out = run(&["verify", "--suite", "framing", "--perturb"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(!failed.is_empty() && failed.iter().all(|n| n.contains("perturbed/")), "{failed:?}");
}

#[test]
fn report_replays_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = bin()
        .args(["verify", "--suite", "newton", "--perturb", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let replay = bin().args(["report", "--file"]).arg(&path).output().unwrap();
    assert_eq!(replay.status.code(), Some(1));
}

#[test]
fn timing_adds_wall_time() {
    let v = json(&run(&["verify", "--suite", "newton", "--timing"]));
    assert!(v["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn pullback_then_transfer_doubles_on_the_double_cover() {
    let dir = fixture_dir();
    let d = dir.path();
    let up = bin()
        .args(["transfer", "cochain", "--pullback", "--file"])
        .arg(d.join("covering.json"))
        .arg("--cochain")
        .arg(d.join("base_cochain.json"))
        .output()
        .unwrap();
    assert!(up.status.success());
    std::fs::write(d.join("up.json"), &up.stdout).unwrap();
    let down = bin()
        .args(["transfer", "cochain", "--file"])
        .arg(d.join("covering.json"))
        .arg("--cochain")
        .arg(d.join("up.json"))
        .output()
        .unwrap();
    let v = json(&down);
    let values: Vec<(i64, String)> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["value"] != "0")
        .map(|e| (e["simplex"][0].as_i64().unwrap(), e["value"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(values, vec![(0, "2".to_string()), (4, "6".to_string())]);
}
