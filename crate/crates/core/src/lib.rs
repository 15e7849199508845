//! Simulation of native multiqubit i-Toffoli and i-select gates in a linear
//! trapped-ion crystal.
//!
//! The pipeline runs from the crystal's equilibrium and normal modes
//! ([`crystal`]) through laser-mediated Ising couplings ([`exchange`]) to the
//! spin-register Schrödinger evolution ([`dynamics`]) under schedules chosen by
//! [`gate`]. [`scenario`] drives complete experiments from flat config files.
//!
//! All numerics are generic over [`Real`]; the `*64` and `*32` aliases fix the
//! scalar type. Frequencies are angular (rad/s) unless a name ends in `_hz`.

pub mod crystal;
pub mod dynamics;
pub mod error;
pub mod exchange;
pub mod gate;
pub mod linalg;
pub mod reference;
pub mod scalar;
pub mod scenario;
pub mod spin;

pub use crystal::{IonCrystal, NormalMode, TrapConfig};
pub use dynamics::{
    evolve, ExchangeSource, FieldSchedule, FieldScope, SpinState, Tolerances, Trajectory,
};
pub use error::{Error, Result};
pub use exchange::{ExchangeModel, LaserParams, ModeReference, ModeSelection};
pub use gate::{GateKind, GateReport, GateSpec, SubspaceEvolution};
pub use linalg::Matrix;
pub use scalar::Real;
pub use spin::{ControlPattern, Spin};

pub type TrapConfig64 = TrapConfig<f64>;
pub type IonCrystal64 = IonCrystal<f64>;
pub type LaserParams64 = LaserParams<f64>;
pub type ExchangeModel64 = ExchangeModel<f64>;
pub type FieldSchedule64 = FieldSchedule<f64>;
pub type SpinState64 = SpinState<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type GateSpec64 = GateSpec<f64>;
pub type GateReport64 = GateReport<f64>;
pub type Matrix64 = Matrix<f64>;

pub type IonCrystal32 = IonCrystal<f32>;
pub type ExchangeModel32 = ExchangeModel<f32>;
pub type SpinState32 = SpinState<f32>;
pub type Trajectory32 = Trajectory<f32>;
