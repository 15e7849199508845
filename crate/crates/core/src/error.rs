use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the simulator can report.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Error)]
pub enum Error {
    #[error("equilibrium root solve did not converge after {iterations} iterations (residual {residual:e})")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("crystal is unstable: transverse mode {mode} has eigenvalue {eigenvalue:e} <= 0")]
    Unstable { mode: usize, eigenvalue: f64 },

    #[error("invalid mode {index}: frequency ratio {ratio} must be positive")]
    InvalidMode { index: usize, ratio: f64 },

    #[error("beatnote {mu:e} rad/s is resonant with mode {mode} at {omega:e} rad/s")]
    NearResonance { mode: usize, omega: f64, mu: f64 },

    #[error("{0}")]
    Undefined(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} ions")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("step size underflow at t = {t:e} s (h = {h:e} s)")]
    StepUnderflow { t: f64, h: f64 },

    #[error("norm drift {drift:e} exceeds budget {budget:e} at t = {t:e} s")]
    NormDrift { t: f64, drift: f64, budget: f64 },

    #[error("selected control branch {selected} is degenerate with {clashing} (|ΔΔ| = {gap:e} rad/s < 2·by)")]
    AmbiguousBranch {
        selected: String,
        clashing: String,
        gap: f64,
    },

    #[error("gate report is missing control pattern(s): {}", missing.join(", "))]
    IncompleteReport { missing: Vec<String> },

    #[error("{}", match line { Some(l) => format!("config line {l}: `{key}`: {message}"), None => format!("config key `{key}`: {message}") })]
    Config {
        line: Option<usize>,
        key: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(
        line: Option<usize>,
        key: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::Config {
            line,
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }

    /// Process exit code used by the CLI: 1 for configuration problems,
    /// 2 for physics or integration failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io { .. } => 1,
            _ => 2,
        }
    }
}
