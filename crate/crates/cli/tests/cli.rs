use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_transport-fem"))
}

fn run_config(dir: &Path, text: &str, extra: &[&str]) -> Output {
    let config = dir.join("run.toml");
    fs::write(&config, text).unwrap();
    bin()
        .arg("run")
        .arg(&config)
        .arg("--output-dir")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMOOTH: &str = "[case]\nname = \"smooth\"\nvelocity = 1\n\n[method]\nname = \"cip\"\nformulation = \"primal-dual\"\n\n[study]\nlevels = [2, 3]\n";

#[test]
fn list_cases_prints_catalog() {
    let out = bin().arg("list-cases").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in [
        "beta1",
        "beta3(eps)",
        "smooth",
        "discontinuous",
        "gamma_CIP",
    ] {
        assert!(text.contains(needle), "{needle} missing");
    }
}

#[test]
fn zero_case_gives_zero_errors() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMOOTH.replace("\"smooth\"", "\"zero\"");
    let out = run_config(dir.path(), &text, &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = fs::read_to_string(dir.path().join("out/table.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,h,dofs,l2_error,sd_error,l2_rate,sd_rate,z_l2,sp_seminorm"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        let l2: f64 = cells[3].parse().unwrap();
        let z: f64 = cells[7].parse().unwrap();
        assert_eq!(l2, 0.0, "{row}");
        assert_eq!(z, 0.0, "{row}");
    }
}

#[test]
fn incompatible_space_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMOOTH.replace("\"cip\"", "\"gls\"\nspace = \"discontinuous\"");
    let out = run_config(dir.path(), &text, &[]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("GLS") && err.contains("continuous"), "{err}");
    assert!(!dir.path().join("out/table.csv").exists());
}

#[test]
fn unknown_key_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMOOTH.replace("formulation", "formulaton");
    let out = run_config(dir.path(), &text, &[]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(
        err.contains("formulaton") && err.contains("line 7"),
        "{err}"
    );
}

#[test]
fn vtk_and_level_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), SMOOTH, &["--vtk", "--levels", "1,2,3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = fs::read_to_string(dir.path().join("out/table.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    for n in 1..=3 {
        let vtk = fs::read_to_string(dir.path().join(format!("out/field_{n}.vtk"))).unwrap();
        assert!(vtk.starts_with("# vtk DataFile Version"));
        assert!(vtk.contains("SCALARS u "));
    }
}

#[test]
fn seed_without_perturbation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), SMOOTH, &["--seed", "3"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("perturbation"), "{}", stderr(&out));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[case]\nname = \"smooth\"\nvelocity = 3\n\n[method]\nname = \"cip\"\nformulation = \"primal-dual\"\n\n[sweep]\neps = [0.05]\ngamma = [0.01]\nn = 8\nexpect_failures = true\n";
    let out = run_config(dir.path(), text, &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "eps,gamma,formulation,sd_error,l2_error,status"
    );
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn repeated_runs_are_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let text = format!("{SMOOTH}\n[perturbation]\namplitude = 0.1\nseed = 9\n");
    for d in [&a, &b] {
        let out = run_config(d.path(), &text, &[]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let ta = fs::read(a.path().join("out/table.csv")).unwrap();
    let tb = fs::read(b.path().join("out/table.csv")).unwrap();
    assert_eq!(ta, tb);
}
