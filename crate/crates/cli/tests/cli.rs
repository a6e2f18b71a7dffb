use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_unitint"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn out_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("unitint-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], files: &[PathBuf], out: &Path) -> Output {
    bin().arg("run").args(files).arg("--out").arg(out).args(args).output().unwrap()
}

fn report(out: &Path, id: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join(format!("{id}_report.json"))).unwrap()).unwrap()
}

#[test]
fn spin_z_matches_closed_form() {
    let out = out_dir("spin-z");
    let o = run(&[], &[scenario("spin_z.json")], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out, "spin_z");
    assert_eq!(r["pass"], true);

    // U(2) = diag(e^{iB₃}, e^{−iB₃}) for H = −½B₃σ_z
    let end = &r["paths"][0]["endpoint"];
    let b3: f64 = 1.7;
    assert!((end[0][0][0].as_f64().unwrap() - b3.cos()).abs() < 1e-12);
    assert!((end[0][0][1].as_f64().unwrap() - b3.sin()).abs() < 1e-12);
    assert!((end[1][1][1].as_f64().unwrap() + b3.sin()).abs() < 1e-12);

    let phases = r["phases"].as_array().unwrap();
    let top = phases.iter().find(|p| p["path"] == "hierarchical" && p["level"] == 2).unwrap();
    assert!((top["mu_total"].as_f64().unwrap() + b3).abs() < 1e-10);
    assert!(top["geometric"].as_f64().unwrap().abs() < 1e-12);

    let csv = fs::read_to_string(out.join("spin_z_trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,z_0_0_re,z_0_0_im,m1,m2,m3,mu_total,geometric,dynamical");
    assert_eq!(lines.count(), 1001);
}

#[test]
fn spin_half_phase_example() {
    let out = out_dir("spin-example");
    let file = out.join("example.json");
    fs::write(
        &file,
        r#"{"id": "example", "N": 2, "n": 1, "family": "spin_half", "B": [0, 0, 1], "t_end": 1, "steps": 100,
            "paths": ["factorized", "oracle"], "tolerances": {"distance": 1e-9}}"#,
    )
    .unwrap();
    let o = run(&[], &[file], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out, "example");
    assert!((r["phases"][0]["mu_total"].as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert_eq!(r["verdicts"][0]["name"], "distance");
    assert_eq!(r["verdicts"][0]["pass"], true);
}

#[test]
fn so5_crosses_the_pole_with_one_restart() {
    let out = out_dir("so5");
    let o = run(&[], &[scenario("so5_pole.json")], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out, "so5_pole");
    let restarts = r["restarts"].as_array().unwrap();
    assert_eq!(restarts.len(), 1);
    let t = restarts[0]["time"].as_f64().unwrap();
    assert!(t < std::f64::consts::FRAC_PI_2 && (t - (10.0 / 2f64.sqrt()).atan()).abs() < 2e-3, "{t}");
    assert_eq!(r["bloch"]["restarts"], 1);
    assert!(r["distances"][0]["plain"].as_f64().unwrap() < 1e-6);
}

#[test]
fn zero_hamiltonian_is_exact() {
    let out = out_dir("zero");
    let o = run(&[], &[scenario("zero.json")], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out, "zero");
    for p in r["paths"].as_array().unwrap() {
        assert_eq!(p["unitarity_residual"], 0.0);
    }
}

#[test]
fn runs_are_byte_identical() {
    let files = [scenario("spin_tilted.json"), scenario("trig_su4.json"), scenario("so5_pole.json")];
    let (a, b) = (out_dir("det-a"), out_dir("det-b"));
    let code = run(&["--steps", "400"], &files, &a).status.code();
    assert_eq!(run(&["--steps", "400"], &files, &b).status.code(), code);
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn tolerance_failure_exits_one() {
    let out = out_dir("tight");
    let text = fs::read_to_string(scenario("spin_tilted.json")).unwrap();
    let tight = text.replace("\"distance\": 1e-6", "\"distance\": 1e-15");
    let file = out.join("tight.json");
    fs::write(&file, tight).unwrap();
    let o = run(&[], &[file], &out);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&out, "spin_tilted");
    assert_eq!(r["pass"], false);
    let failed: Vec<_> = r["verdicts"].as_array().unwrap().iter().filter(|v| v["pass"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "distance");
}

#[test]
fn path_override() {
    let out = out_dir("paths");
    let o = run(&["--paths", "hierarchical,oracle"], &[scenario("spin_z.json")], &out);
    // bloch_deviation no longer has a path to measure it
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bloch_deviation"));

    let o = run(&["--paths", "hierarchical,oracle"], &[scenario("trig_su4.json")], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out, "trig_su4");
    let paths: Vec<_> = r["paths"].as_array().unwrap().iter().map(|p| p["path"].clone()).collect();
    assert_eq!(paths, ["hierarchical", "oracle"]);
}

#[test]
fn malformed_input_exits_two_with_location() {
    let out = out_dir("bad");
    let file = out.join("bad.json");
    fs::write(&file, "{\n  \"id\": \"bad\",\n  \"N\": 2,\n  \"n\": \n}").unwrap();
    let o = run(&[], std::slice::from_ref(&file), &out);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json") && err.contains("line 5"), "{err}");

    fs::write(&file, r#"{"id": "bad", "N": 3, "n": 2, "family": "trig_random", "t_end": 1, "steps": 10}"#).unwrap();
    let o = run(&[], &[file], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n"));
}

#[test]
fn worst_exit_code_wins() {
    let out = out_dir("mixed");
    let bad = out.join("bad.json");
    fs::write(&bad, "not json").unwrap();
    let o = run(&[], &[scenario("zero.json"), bad], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(out.join("zero_report.json").exists());
}

#[test]
fn verify_passes_and_is_deterministic() {
    let args = ["verify", "--seed", "7", "--count", "6", "--max-dim", "5"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let table = String::from_utf8(a.stdout).unwrap();
    for name in ["closure", "gamma_roots", "hermiticity", "trace_identity", "gamma_dot", "phase_split", "unitarity", "picture_crosscheck"] {
        assert!(table.lines().any(|l| l.starts_with(name) && l.ends_with("ok")), "{name}\n{table}");
    }
}

#[test]
fn verify_reports_injected_failures() {
    let o = bin()
        .args(["verify", "--seed", "3", "--count", "4", "--tolerance", "unitarity=1e-30"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("unitarity failed for seeds 3 4 5 6"), "{table}");
    assert!(table.lines().filter(|l| l.ends_with("FAIL")).count() == 1);

    let o = bin().args(["verify", "--seed", "42", "--count", "3", "--tolerance", "0"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("closure failed for seeds 42 43 44"), "{table}");

    let o = bin().args(["verify", "--tolerance", "nonsense=1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
