//! Config-driven experiments: build the crystal, couplings and schedule, run
//! one evolution per control pattern and write reports and traces.

mod config;
mod plot;
mod tables;

use std::f64::consts::TAU;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::{BxMode, ExchangeKind, ScenarioConfig, ScopeChoice, NUMERIC_KEYS};
pub use plot::probability_svg;
pub use tables::{
    compare_table, detuning_trend, scope_summary, tables, DetuningPoint, TableComparison, TableRow,
    TablesOutput,
};

use crate::crystal::{IonCrystal, TrapConfig};
use crate::dynamics::{
    evolve, ExchangeSource, FieldSchedule, FieldScope, SpinState, Tolerances, Trajectory,
};
use crate::error::{Error, Result};
use crate::exchange::{ExchangeModel, LaserParams, ModeReference};
use crate::gate::{design_gate, design_gate_with_bx, gate_report, GateReport, GateSpec};
use crate::spin::ControlPattern;

/// Environment variable overriding `out_dir`.
pub const OUT_ENV: &str = "TRAPSIM_OUT";

/// Everything derived from a config before any evolution.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub crystal: IonCrystal<f64>,
    pub model: ExchangeModel<f64>,
    pub spec: GateSpec<f64>,
    pub field: FieldSchedule<f64>,
}

impl Scenario {
    pub fn build(config: &ScenarioConfig) -> Result<Self> {
        let trap = TrapConfig::new(config.n_ions, TAU * config.omega_cm_hz, config.anisotropy())?;
        let crystal = IonCrystal::build(&trap)?;
        if config.mode_reference == ModeReference::Zigzag && config.n_ions < 2 {
            return Err(Error::config(
                None,
                "mode_reference",
                "zigzag needs at least two ions",
            ));
        }
        let laser = LaserParams::detuned_from(
            &crystal,
            config.mode_reference,
            config.detuning_ratio,
            TAU * config.rabi_hz,
            config.eta_cm,
        )
        .with_selection(config.exchange_modes);
        let model = ExchangeModel::new(&crystal, &laser)?;
        let spec = GateSpec::new(
            config.gate,
            config.target(),
            config.selected(),
            TAU * config.by_hz,
            config.mode_reference,
            config.detuning_ratio,
        )?
        .with_pulse_multiple(config.pulse_multiple)?;
        let field = match config.bx_mode {
            BxMode::Auto => design_gate(&spec, &model)?,
            BxMode::Explicit => {
                let bx = config.bx_hz.expect("validated at parse time");
                design_gate_with_bx(&spec, &model, TAU * bx)?
            }
        };
        let field = match config.field_scope {
            ScopeChoice::All => field,
            ScopeChoice::Target => field.with_scope(FieldScope::Ion(config.target())),
        };
        Ok(Self {
            config: config.clone(),
            crystal,
            model,
            spec,
            field,
        })
    }

    pub fn tolerances(&self) -> Tolerances<f64> {
        Tolerances {
            rtol: self.config.rtol,
            atol: self.config.atol,
            ..Tolerances::default()
        }
    }

    /// Evolution from `|target, controls⟩` for one control pattern.
    pub fn evolve_pattern(&self, pattern: &ControlPattern) -> Result<Trajectory<f64>> {
        let initial = SpinState::gate_input(self.spec.target, self.spec.initial_target, pattern)?;
        let source = match self.config.exchange {
            ExchangeKind::Static => ExchangeSource::Static(self.model.j0()),
            ExchangeKind::TimeDependent => ExchangeSource::TimeDependent(&self.model),
        };
        evolve(
            &initial,
            source,
            &self.field,
            &self.tolerances(),
            self.config.samples,
        )
    }

    /// Runs every control pattern concurrently and assembles the report.
    pub fn simulate(&self) -> Result<Simulation> {
        let patterns = ControlPattern::all(self.config.n_ions - 1);
        let trajectories = patterns
            .into_par_iter()
            .map(|p| self.evolve_pattern(&p).map(|t| (p, t)))
            .collect::<Result<Vec<_>>>()?;
        let mut report = gate_report(&self.model, &self.spec, &self.field, &trajectories)?;
        report.notes = self.notes();
        Ok(Simulation {
            report,
            trajectories,
        })
    }

    fn notes(&self) -> Vec<String> {
        let c = &self.config;
        let exchange = match c.exchange {
            ExchangeKind::Static => "time-averaged couplings J0",
            ExchangeKind::TimeDependent => "oscillating couplings J(t)",
        };
        let mode = match c.mode_reference {
            ModeReference::CenterOfMass => "center-of-mass",
            ModeReference::Zigzag => "zigzag",
        };
        let mut notes = vec![format!(
            "{exchange}, beatnote at {} × the {mode} mode, pulse area {}·π/2",
            c.detuning_ratio, c.pulse_multiple
        )];
        if c.field_scope == ScopeChoice::Target {
            notes.push(
                "field applied to the target ion only; the all-ions field gives different flip tables \
                 (`tables` reports both)"
                    .into(),
            );
        }
        notes
    }
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub report: GateReport<f64>,
    /// In [`ControlPattern::all`] order.
    pub trajectories: Vec<(ControlPattern, Trajectory<f64>)>,
}

/// Builds and simulates without writing anything.
pub fn simulate(config: &ScenarioConfig) -> Result<Simulation> {
    Scenario::build(config)?.simulate()
}

/// `out_dir`, unless [`OUT_ENV`] is set.
pub fn output_dir(config: &ScenarioConfig) -> PathBuf {
    std::env::var_os(OUT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| config.out_dir.clone())
}

fn write(path: &Path, contents: &str) -> Result<PathBuf> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Trace CSV for one trajectory.
pub fn trace_csv(trajectory: &Trajectory<f64>, target: usize) -> Result<String> {
    let mut out = String::from("t_seconds,p_target_plus,p_target_minus,norm_drift\n");
    for (t, p, m, drift) in trajectory.target_series(target)? {
        let _ = writeln!(out, "{t:e},{p:e},{m:e},{drift:e}");
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub simulation: Simulation,
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Simulates `config` and writes into [`output_dir`].
pub fn run(config: &ScenarioConfig) -> Result<RunOutput> {
    run_in(config, &output_dir(config))
}

/// Simulates `config` and writes `report.txt`, `report.csv`, `config.txt`,
/// one `trace_<pattern>.csv` per control pattern and, if enabled, `traces.svg`.
pub fn run_in(config: &ScenarioConfig, dir: &Path) -> Result<RunOutput> {
    let scenario = Scenario::build(config)?;
    let simulation = scenario.simulate()?;
    create_dir(dir)?;
    let mut files = vec![
        write(&dir.join("config.txt"), &config.to_string())?,
        write(&dir.join("report.txt"), &simulation.report.to_table())?,
        write(&dir.join("report.csv"), &simulation.report.to_csv())?,
    ];
    let target = scenario.spec.target;
    for (pattern, traj) in &simulation.trajectories {
        let path = dir.join(format!("trace_{}.csv", pattern.pm_code()));
        files.push(write(&path, &trace_csv(traj, target)?)?);
    }
    if config.plot {
        let svg = probability_svg(&simulation, target, &config.name)?;
        files.push(write(&dir.join("traces.svg"), &svg)?);
    }
    Ok(RunOutput {
        simulation,
        dir: dir.to_path_buf(),
        files,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub pattern: ControlPattern,
    pub p_flip: f64,
    pub p_no_flip: f64,
}

#[derive(Clone, Debug)]
pub struct SweepSummary {
    pub key: String,
    pub rows: Vec<SweepRow>,
    pub reports: Vec<(String, GateReport<f64>)>,
}

impl SweepSummary {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},controls,p_flip,p_no_flip\n", self.key);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e}",
                r.value,
                r.pattern.pm_code(),
                r.p_flip,
                r.p_no_flip
            );
        }
        out
    }
}

/// Reruns `config` with `key` set to each of `values`.
pub fn sweep_values(config: &ScenarioConfig, key: &str, values: &[String]) -> Result<SweepSummary> {
    if !NUMERIC_KEYS.contains(&key) {
        return Err(Error::config(
            None,
            key,
            format!(
                "not a sweepable numeric key (expected one of {})",
                NUMERIC_KEYS.join(", ")
            ),
        ));
    }
    let mut summary = SweepSummary {
        key: key.to_string(),
        rows: Vec::new(),
        reports: Vec::new(),
    };
    for value in values {
        let value = value.trim();
        if value.parse::<f64>().is_err() {
            return Err(Error::config(
                None,
                key,
                format!("sweep value `{value}` is not numeric"),
            ));
        }
        let mut cfg = config.clone();
        cfg.set(key, value)?;
        let report = simulate(&cfg)?.report;
        summary.rows.extend(report.rows.iter().map(|r| SweepRow {
            value: value.to_string(),
            pattern: r.pattern.clone(),
            p_flip: r.p_flip,
            p_no_flip: r.p_no_flip,
        }));
        summary.reports.push((value.to_string(), report));
    }
    Ok(summary)
}

/// [`sweep_values`] followed by writing `sweep_<key>.csv` into [`output_dir`].
pub fn sweep(
    config: &ScenarioConfig,
    key: &str,
    values: &[String],
) -> Result<(SweepSummary, PathBuf)> {
    let summary = sweep_values(config, key, values)?;
    let dir = output_dir(config);
    create_dir(&dir)?;
    let path = write(&dir.join(format!("sweep_{key}.csv")), &summary.to_csv())?;
    Ok((summary, path))
}

/// Equilibrium positions and normal modes of the configured crystal.
#[derive(Clone, Debug)]
pub struct ModeTable {
    pub crystal: IonCrystal<f64>,
}

pub fn modes(config: &ScenarioConfig) -> Result<ModeTable> {
    let trap = TrapConfig::new(config.n_ions, TAU * config.omega_cm_hz, config.anisotropy())?;
    Ok(ModeTable {
        crystal: IonCrystal::build(&trap)?,
    })
}

impl fmt::Display for ModeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.crystal;
        let vec = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:>8.4}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(
            f,
            "{} ions, anisotropy {}, ω_CM/2π = {:.6} MHz",
            c.n_ions(),
            c.trap.anisotropy,
            c.trap.omega_cm / TAU / 1e6
        )?;
        writeln!(
            f,
            "equilibrium positions (units of the length scale): {}",
            vec(&c.positions)
        )?;
        writeln!(f, "transverse modes (ω/ω_CM, frequency, eigenvector):")?;
        for (nu, m) in c.transverse.iter().enumerate() {
            writeln!(
                f,
                "  {nu:>2}  {:.6}  {:>12.3} Hz  [{}]",
                m.ratio,
                c.transverse_omega(nu) / TAU,
                vec(&m.vector)
            )?;
        }
        writeln!(f, "longitudinal modes (ω/ω_CM,L, eigenvector):")?;
        for (nu, m) in c.longitudinal.iter().enumerate() {
            writeln!(f, "  {nu:>2}  {:.6}  [{}]", m.ratio, vec(&m.vector))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::bundled;

    fn bundled_config(name: &str) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::parse(bundled(name).unwrap().text).unwrap();
        cfg.samples = 20;
        cfg
    }

    #[test]
    fn mode_table_lists_zigzag() {
        let cfg = ScenarioConfig::parse("n_ions = 3\nanisotropy = 0.1").unwrap();
        let text = modes(&cfg).unwrap().to_string();
        assert!(text.contains("0.987"), "{text}");
        assert!(text.contains("2.408"), "{text}");
    }

    #[test]
    fn static_toffoli_report() {
        let sim = simulate(&bundled_config("toffoli2_static")).unwrap();
        let r = &sim.report;
        assert_eq!(r.rows.len(), 4);
        assert!(r.on_branch().unwrap().p_flip > 0.999);
        assert!(r.worst_false_flip().unwrap().p_flip < 0.04);
        assert!((r.duration - 1.0 / (4.0 * 75.98)).abs() < 1e-15);
        for row in &r.rows {
            assert!((row.p_flip + row.p_no_flip - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_rejects_non_numeric_key() {
        let cfg = bundled_config("toffoli2_static");
        let e = sweep_values(&cfg, "exchange", &["1".into()]).unwrap_err();
        assert!(e.is_config());
        let empty = sweep_values(&cfg, "by_hz", &[]).unwrap();
        assert!(empty.rows.is_empty());
        assert_eq!(empty.to_csv(), "by_hz,controls,p_flip,p_no_flip\n");
        assert!(sweep_values(&cfg, "by_hz", &["x".into()])
            .unwrap_err()
            .is_config());
    }

    #[test]
    fn ambiguous_branch_surfaces() {
        let mut cfg = bundled_config("toffoli2_static");
        cfg.selected_controls = Some("-+".parse().unwrap());
        assert!(matches!(
            Scenario::build(&cfg),
            Err(Error::AmbiguousBranch { .. })
        ));
    }
}
