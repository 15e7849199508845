//! Flat `key = value` scenario files.
//!
//! Blank lines and text after `#` are ignored. Frequencies are cyclic Hz.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::crystal::TrapConfig;
use crate::error::{Error, Result};
use crate::exchange::{ModeReference, ModeSelection};
use crate::gate::GateKind;
use crate::spin::{ControlPattern, Spin};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExchangeKind {
    /// Time-averaged couplings J⁰.
    Static,
    /// Full oscillating couplings J(t).
    TimeDependent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BxMode {
    /// `bx` equals Δ of the selected branch.
    Auto,
    /// `bx` taken from `bx_hz`.
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScopeChoice {
    All,
    Target,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub gate: GateKind,
    pub n_ions: usize,
    /// One-based.
    pub target_index: usize,
    pub omega_cm_hz: f64,
    /// `None` picks the parity default.
    pub anisotropy: Option<f64>,
    pub eta_cm: f64,
    pub rabi_hz: f64,
    pub mode_reference: ModeReference,
    pub detuning_ratio: f64,
    pub by_hz: f64,
    pub bx_mode: BxMode,
    pub bx_hz: Option<f64>,
    /// `None` selects the all-`−` branch.
    pub selected_controls: Option<ControlPattern>,
    pub exchange: ExchangeKind,
    pub exchange_modes: ModeSelection,
    pub field_scope: ScopeChoice,
    pub pulse_multiple: u32,
    pub samples: usize,
    pub rtol: f64,
    pub atol: f64,
    pub out_dir: PathBuf,
    pub plot: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            gate: GateKind::Toffoli,
            n_ions: 3,
            target_index: 1,
            omega_cm_hz: 4.63975e6,
            anisotropy: None,
            eta_cm: 0.06,
            rabi_hz: 369.7e3,
            mode_reference: ModeReference::CenterOfMass,
            detuning_ratio: 1.0095,
            by_hz: 75.98,
            bx_mode: BxMode::Auto,
            bx_hz: None,
            selected_controls: None,
            exchange: ExchangeKind::Static,
            exchange_modes: ModeSelection::Referenced,
            field_scope: ScopeChoice::All,
            pulse_multiple: 1,
            samples: 200,
            rtol: 1e-8,
            atol: 1e-10,
            out_dir: PathBuf::from("out"),
            plot: false,
        }
    }
}

/// Keys accepted by [`ScenarioConfig::set`] with a numeric value.
pub const NUMERIC_KEYS: &[&str] = &[
    "n_ions",
    "target_index",
    "omega_cm_hz",
    "anisotropy",
    "eta_cm",
    "rabi_hz",
    "detuning_ratio",
    "by_hz",
    "bx_hz",
    "pulse_multiple",
    "samples",
    "rtol",
    "atol",
];

const KEYS: &[&str] = &[
    "name",
    "gate",
    "n_ions",
    "target_index",
    "omega_cm_hz",
    "anisotropy",
    "eta_cm",
    "rabi_hz",
    "mode_reference",
    "detuning_ratio",
    "by_hz",
    "bx_mode",
    "bx_hz",
    "selected_controls",
    "exchange",
    "exchange_modes",
    "field_scope",
    "pulse_multiple",
    "samples",
    "rtol",
    "atol",
    "out_dir",
    "plot",
];

fn number<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("expected a number, got `{value}`"))
}

fn choice<T: Copy>(value: &str, options: &[(&str, T)]) -> std::result::Result<T, String> {
    options
        .iter()
        .find(|(name, _)| name.eq_ignore_ascii_case(value))
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            format!("expected one of {}, got `{value}`", names.join("|"))
        })
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<(&str, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(Some(line_no), line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some((_, first)) = seen.iter().find(|(k, _)| *k == key) {
                return Err(Error::config(
                    Some(line_no),
                    key,
                    format!("duplicate key (first set on line {first})"),
                ));
            }
            cfg.assign(key, value)
                .map_err(|m| Error::config(Some(line_no), key, m))?;
            if let Some(k) = KEYS.iter().find(|k| **k == key) {
                seen.push((k, line_no));
            }
        }
        let line_of = |key: &str| seen.iter().find(|(k, _)| *k == key).map(|(_, l)| *l);
        cfg.validate_with(line_of)?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        if cfg.name == Self::default().name {
            if let Some(stem) = path.file_stem() {
                cfg.name = stem.to_string_lossy().into_owned();
            }
        }
        Ok(cfg)
    }

    /// Overrides one key and revalidates.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let mut next = self.clone();
        next.assign(key, value)
            .map_err(|m| Error::config(None, key, m))?;
        next.validate_with(|_| None)?;
        *self = next;
        Ok(())
    }

    fn assign(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "name" => self.name = value.to_string(),
            "gate" => {
                self.gate = choice(
                    value,
                    &[("toffoli", GateKind::Toffoli), ("select", GateKind::Select)],
                )?
            }
            "n_ions" => self.n_ions = number(value)?,
            "target_index" => self.target_index = number(value)?,
            "omega_cm_hz" => self.omega_cm_hz = number(value)?,
            "anisotropy" => {
                self.anisotropy = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(number(value)?)
                }
            }
            "eta_cm" => self.eta_cm = number(value)?,
            "rabi_hz" => self.rabi_hz = number(value)?,
            "mode_reference" => {
                self.mode_reference = choice(
                    value,
                    &[
                        ("cm", ModeReference::CenterOfMass),
                        ("zigzag", ModeReference::Zigzag),
                    ],
                )?
            }
            "detuning_ratio" => self.detuning_ratio = number(value)?,
            "by_hz" => self.by_hz = number(value)?,
            "bx_mode" => {
                self.bx_mode = choice(
                    value,
                    &[("auto", BxMode::Auto), ("explicit", BxMode::Explicit)],
                )?
            }
            "bx_hz" => self.bx_hz = Some(number(value)?),
            "selected_controls" => self.selected_controls = Some(value.parse()?),
            "exchange" => {
                self.exchange = choice(
                    value,
                    &[
                        ("static", ExchangeKind::Static),
                        ("time_dependent", ExchangeKind::TimeDependent),
                    ],
                )?
            }
            "exchange_modes" => {
                self.exchange_modes = choice(
                    value,
                    &[
                        ("referenced", ModeSelection::Referenced),
                        ("all", ModeSelection::All),
                    ],
                )?
            }
            "field_scope" => {
                self.field_scope = choice(
                    value,
                    &[("all", ScopeChoice::All), ("target", ScopeChoice::Target)],
                )?
            }
            "pulse_multiple" => self.pulse_multiple = number(value)?,
            "samples" => self.samples = number(value)?,
            "rtol" => self.rtol = number(value)?,
            "atol" => self.atol = number(value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "plot" => {
                self.plot = choice(
                    value,
                    &[
                        ("true", true),
                        ("false", false),
                        ("yes", true),
                        ("no", false),
                    ],
                )?
            }
            _ => return Err(format!("unknown key (expected one of {})", KEYS.join(", "))),
        }
        Ok(())
    }

    fn validate_with(&self, line_of: impl Fn(&str) -> Option<usize>) -> Result<()> {
        let fail = |key: &str, msg: String| Err(Error::config(line_of(key), key, msg));
        if self.n_ions == 0 {
            return fail("n_ions", "must be at least 1".into());
        }
        if self.n_ions > 16 {
            return fail(
                "n_ions",
                format!(
                    "{} ions exceed the supported register size of 16",
                    self.n_ions
                ),
            );
        }
        if self.target_index == 0 || self.target_index > self.n_ions {
            return fail(
                "target_index",
                format!("must lie in 1..={}, got {}", self.n_ions, self.target_index),
            );
        }
        for (key, v) in [
            ("omega_cm_hz", self.omega_cm_hz),
            ("rabi_hz", self.rabi_hz),
            ("by_hz", self.by_hz),
            ("detuning_ratio", self.detuning_ratio),
            ("eta_cm", self.eta_cm),
            ("rtol", self.rtol),
            ("atol", self.atol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return fail(key, format!("must be positive and finite, got {v}"));
            }
        }
        if self.detuning_ratio == 1.0 {
            return fail("detuning_ratio", "must differ from 1".into());
        }
        if let Some(a) = self.anisotropy {
            if !(a > 0.0) || !a.is_finite() {
                return fail(
                    "anisotropy",
                    format!("must be positive and finite, got {a}"),
                );
            }
        }
        if let Some(sel) = &self.selected_controls {
            if sel.len() + 1 != self.n_ions {
                return fail(
                    "selected_controls",
                    format!(
                        "has {} entries but n_ions − 1 = {}",
                        sel.len(),
                        self.n_ions - 1
                    ),
                );
            }
        }
        if self.pulse_multiple.is_multiple_of(2) {
            return fail(
                "pulse_multiple",
                format!("must be odd, got {}", self.pulse_multiple),
            );
        }
        if self.samples == 0 {
            return fail("samples", "must be at least 1".into());
        }
        if self.bx_mode == BxMode::Explicit && self.bx_hz.is_none() {
            return fail("bx_hz", "required when bx_mode = explicit".into());
        }
        Ok(())
    }

    pub fn anisotropy(&self) -> f64 {
        self.anisotropy
            .unwrap_or_else(|| TrapConfig::<f64>::default_anisotropy(self.n_ions))
    }

    pub fn selected(&self) -> ControlPattern {
        self.selected_controls
            .clone()
            .unwrap_or_else(|| ControlPattern::uniform(self.n_ions - 1, Spin::Minus))
    }

    /// Zero-based target index.
    pub fn target(&self) -> usize {
        self.target_index - 1
    }
}

impl fmt::Display for ScenarioConfig {
    /// Canonical text form; parsing it yields the same configuration.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gate = match self.gate {
            GateKind::Toffoli => "toffoli",
            GateKind::Select => "select",
        };
        writeln!(f, "name = {}", self.name)?;
        writeln!(f, "gate = {gate}")?;
        writeln!(f, "n_ions = {}", self.n_ions)?;
        writeln!(f, "target_index = {}", self.target_index)?;
        writeln!(f, "omega_cm_hz = {:?}", self.omega_cm_hz)?;
        match self.anisotropy {
            Some(a) => writeln!(f, "anisotropy = {a:?}")?,
            None => writeln!(f, "anisotropy = auto")?,
        }
        writeln!(f, "eta_cm = {:?}", self.eta_cm)?;
        writeln!(f, "rabi_hz = {:?}", self.rabi_hz)?;
        let reference = match self.mode_reference {
            ModeReference::CenterOfMass => "cm",
            ModeReference::Zigzag => "zigzag",
        };
        writeln!(f, "mode_reference = {reference}")?;
        writeln!(f, "detuning_ratio = {:?}", self.detuning_ratio)?;
        writeln!(f, "by_hz = {:?}", self.by_hz)?;
        let bx_mode = match self.bx_mode {
            BxMode::Auto => "auto",
            BxMode::Explicit => "explicit",
        };
        writeln!(f, "bx_mode = {bx_mode}")?;
        if let Some(bx) = self.bx_hz {
            writeln!(f, "bx_hz = {bx:?}")?;
        }
        writeln!(f, "selected_controls = {}", self.selected())?;
        let exchange = match self.exchange {
            ExchangeKind::Static => "static",
            ExchangeKind::TimeDependent => "time_dependent",
        };
        writeln!(f, "exchange = {exchange}")?;
        let modes = match self.exchange_modes {
            ModeSelection::Referenced => "referenced",
            ModeSelection::All => "all",
        };
        writeln!(f, "exchange_modes = {modes}")?;
        let scope = match self.field_scope {
            ScopeChoice::All => "all",
            ScopeChoice::Target => "target",
        };
        writeln!(f, "field_scope = {scope}")?;
        writeln!(f, "pulse_multiple = {}", self.pulse_multiple)?;
        writeln!(f, "samples = {}", self.samples)?;
        writeln!(f, "rtol = {:?}", self.rtol)?;
        writeln!(f, "atol = {:?}", self.atol)?;
        writeln!(f, "out_dir = {}", self.out_dir.display())?;
        writeln!(f, "plot = {}", self.plot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_comments() {
        let cfg = ScenarioConfig::parse(
            "n_ions = 4  # four ions\n\n# comment\nexchange = time_dependent\n",
        )
        .unwrap();
        assert_eq!(cfg.n_ions, 4);
        assert_eq!(cfg.anisotropy(), 0.2092);
        assert_eq!(cfg.selected().to_string(), "---");
        assert_eq!(cfg.exchange, ExchangeKind::TimeDependent);
        assert_eq!(cfg.field_scope, ScopeChoice::All);
    }

    #[test]
    fn errors_name_key_and_line() {
        let e = ScenarioConfig::parse("n_ions = 3\nselected_controls = -+-\n").unwrap_err();
        match e {
            Error::Config { line, key, .. } => {
                assert_eq!(line, Some(2));
                assert_eq!(key, "selected_controls");
            }
            other => panic!("{other:?}"),
        }
        let e = ScenarioConfig::parse("n_ions = 3\nby_hz = fast\n").unwrap_err();
        assert!(
            e.to_string().contains("line 2") && e.to_string().contains("by_hz"),
            "{e}"
        );
        assert!(ScenarioConfig::parse("bogus = 1")
            .unwrap_err()
            .to_string()
            .contains("bogus"));
        assert!(ScenarioConfig::parse("n_ions 3").is_err());
        assert!(ScenarioConfig::parse("pulse_multiple = 4").is_err());
        assert!(ScenarioConfig::parse("by_hz = -1").is_err());
        assert!(ScenarioConfig::parse("n_ions = 3\nn_ions = 4")
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
        assert!(ScenarioConfig::parse("bx_mode = explicit").is_err());
    }

    #[test]
    fn display_round_trips() {
        let text = "name = x\nn_ions = 5\nmode_reference = zigzag\nselected_controls = +-+-\nbx_mode = explicit\nbx_hz = -1234.5\nfield_scope = target\nplot = yes\n";
        let cfg = ScenarioConfig::parse(text).unwrap();
        let again = ScenarioConfig::parse(&cfg.to_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn set_revalidates() {
        let mut cfg = ScenarioConfig::default();
        cfg.set("by_hz", "759.8").unwrap();
        assert_eq!(cfg.by_hz, 759.8);
        assert!(cfg.set("by_hz", "0").is_err());
        assert_eq!(cfg.by_hz, 759.8);
    }
}
