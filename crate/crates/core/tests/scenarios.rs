use trapsim::reference::bundled;
use trapsim::scenario::{run_in, simulate, sweep_values, trace_csv, Scenario, ScenarioConfig};
use trapsim::spin::{ControlPattern, Spin};
use trapsim::Error;

fn config(name: &str) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::parse(bundled(name).unwrap().text).unwrap();
    cfg.name = name.to_string();
    cfg
}

fn flips(cfg: &ScenarioConfig) -> Vec<(ControlPattern, f64)> {
    let report = simulate(cfg).unwrap().report;
    report
        .rows
        .iter()
        .map(|r| (r.pattern.clone(), r.p_flip))
        .collect()
}

#[test]
fn halving_tolerances_leaves_probabilities_unchanged() {
    let mut cfg = config("toffoli2_by759");
    cfg.samples = 1;
    let coarse = flips(&cfg);
    cfg.rtol /= 2.0;
    cfg.atol /= 2.0;
    let fine = flips(&cfg);
    for ((p, a), (_, b)) in coarse.iter().zip(&fine) {
        assert!((a - b).abs() < 1e-7, "{p}: {a} vs {b}");
    }
}

#[test]
fn wrong_branches_grow_with_transverse_field() {
    let names = ["toffoli2_td", "toffoli2_by759", "toffoli2_by7598"];
    let runs: Vec<_> = names
        .iter()
        .map(|n| {
            let mut cfg = config(n);
            cfg.samples = 1;
            simulate(&cfg).unwrap().report
        })
        .collect();
    for pattern in ControlPattern::all(2) {
        if pattern == runs[0].selected {
            continue;
        }
        let p: Vec<f64> = runs
            .iter()
            .map(|r| r.row(&pattern).unwrap().p_flip)
            .collect();
        assert!(p[0] < p[1] && p[1] < p[2], "{pattern}: {p:?}");
    }
}

#[test]
fn report_matches_trajectories() {
    let cfg = config("toffoli2_static");
    let scenario = Scenario::build(&cfg).unwrap();
    let sim = scenario.simulate().unwrap();
    for (pattern, traj) in &sim.trajectories {
        let (plus, minus) =
            trapsim::dynamics::target_probabilities(traj.final_state(), scenario.spec.target)
                .unwrap();
        let row = sim.report.row(pattern).unwrap();
        let stay = match sim.report.initial_target {
            Spin::Plus => plus,
            Spin::Minus => minus,
        };
        assert!((row.p_flip - (1.0 - stay)).abs() <= 1e-12);
        assert!((row.p_flip + row.p_no_flip - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn runs_are_bitwise_deterministic() {
    let mut cfg = config("toffoli2_static");
    cfg.samples = 50;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_in(&cfg, a.path()).unwrap();
    run_in(&cfg, b.path()).unwrap();
    for file in &first.files {
        let name = file.file_name().unwrap();
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name:?} differs");
    }
}

#[test]
fn run_writes_traces_and_plot() {
    let mut cfg = config("toffoli2_static");
    cfg.samples = 20;
    cfg.plot = true;
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(&cfg, dir.path()).unwrap();
    for name in [
        "config.txt",
        "report.txt",
        "report.csv",
        "trace_mm.csv",
        "trace_pp.csv",
        "traces.svg",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let trace = std::fs::read_to_string(dir.path().join("trace_mm.csv")).unwrap();
    assert!(trace.starts_with("t_seconds,p_target_plus,p_target_minus,norm_drift\n"));
    assert_eq!(trace.lines().count(), 22);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(
        csv.starts_with("controls,p_flip,p_no_flip,accepted_steps,rejected_steps,max_norm_drift\n")
    );
    let traj = &out.simulation.trajectories[0].1;
    assert_eq!(trace_csv(traj, 0).unwrap().lines().count(), 22);
}

#[test]
fn config_round_trips_through_display() {
    for b in trapsim::reference::BUNDLED {
        let cfg = ScenarioConfig::parse(b.text).unwrap();
        assert_eq!(
            ScenarioConfig::parse(&cfg.to_string()).unwrap(),
            cfg,
            "{}",
            b.name
        );
    }
}

#[test]
fn config_errors_name_the_key() {
    let err = ScenarioConfig::parse("n_ions = 3\nby_hz = fast\n").unwrap_err();
    assert!(
        matches!(&err, Error::Config { key, line: Some(2), .. } if key == "by_hz"),
        "{err}"
    );
    assert!(err.to_string().contains("by_hz"));
    let err = ScenarioConfig::parse("detuning = 1.01\n").unwrap_err();
    assert!(err.to_string().contains("detuning"));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn unstable_crystal_is_a_physics_error() {
    let cfg = ScenarioConfig {
        n_ions: 6,
        anisotropy: Some(0.9),
        ..ScenarioConfig::default()
    };
    let err = Scenario::build(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
}

#[test]
fn sweep_over_by() {
    let mut cfg = config("toffoli2_static");
    cfg.samples = 1;
    let summary = sweep_values(&cfg, "by_hz", &["75.98".into(), "759.8".into()]).unwrap();
    assert_eq!(summary.rows.len(), 8);
    assert!(summary
        .to_csv()
        .starts_with("by_hz,controls,p_flip,p_no_flip\n"));
    let empty = sweep_values(&cfg, "by_hz", &[]).unwrap();
    assert!(empty.rows.is_empty());
    assert_eq!(empty.to_csv(), "by_hz,controls,p_flip,p_no_flip\n");
    assert!(sweep_values(&cfg, "gate", &["select".into()])
        .unwrap_err()
        .is_config());
}
