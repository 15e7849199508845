use std::path::Path;
use std::process::{Command, Output};

fn trapsim(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapsim"))
        .args(args)
        .env("TRAPSIM_OUT", out)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_names_bundled_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let o = trapsim(&["list"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l == "toffoli3"));
    assert!(text.lines().any(|l| l == "select3_zz"));
}

#[test]
fn run_bundled_scenario_honors_output_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = trapsim(&["run", "toffoli2_static", "--plot"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in [
        "report.txt",
        "report.csv",
        "config.txt",
        "trace_mm.csv",
        "trace_mp.csv",
        "traces.svg",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("|−,−⟩"));
}

#[test]
fn run_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.cfg");
    std::fs::write(
        &path,
        "n_ions = 2\nexchange = static\nfield_scope = target\nsamples = 5\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = trapsim(&["run", path.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let trace = std::fs::read_to_string(out.join("trace_m.csv")).unwrap();
    assert_eq!(trace.lines().count(), 7);
}

#[test]
fn missing_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = trapsim(&["run", "no_such_scenario"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_value_exits_one_and_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "n_ions = 3\neta_cm = lots\n").unwrap();
    let o = trapsim(&["run", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("eta_cm"), "{}", stderr(&o));
}

#[test]
fn usage_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = trapsim(&["run"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unstable_crystal_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loose.cfg");
    std::fs::write(&path, "n_ions = 6\nanisotropy = 0.9\n").unwrap();
    let o = trapsim(&["modes", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn modes_prints_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let o = trapsim(&["modes", "toffoli2_static"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("0.987927"));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = trapsim(
        &["sweep", "toffoli2_static", "--key", "by_hz", "--values"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("sweep_by_hz.csv")).unwrap();
    assert_eq!(csv, "by_hz,controls,p_flip,p_no_flip\n");
}

#[test]
fn sweep_rejects_non_numeric_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = trapsim(
        &[
            "sweep",
            "toffoli2_static",
            "--key",
            "gate",
            "--values",
            "select",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gate"));
}
