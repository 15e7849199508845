//! Schrödinger evolution of the spin register.

mod hamiltonian;
mod integrator;
mod state;

pub use hamiltonian::{apply_hamiltonian, FieldSchedule, FieldScope, SpinHamiltonian};
pub use integrator::{integrate, IntegratorStats, Tolerances};
pub use state::{target_probabilities, SpinState, NORM_TOLERANCE};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::exchange::ExchangeModel;
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Couplings driving the evolution.
#[derive(Clone, Copy, Debug)]
pub enum ExchangeSource<'a, T> {
    /// Fixed couplings, typically the time average J⁰.
    Static(&'a Matrix<T>),
    /// Full oscillating couplings J(t).
    TimeDependent(&'a ExchangeModel<T>),
}

impl<'a, T: Real> ExchangeSource<'a, T> {
    pub fn n_ions(&self) -> usize {
        match self {
            ExchangeSource::Static(j) => j.dim(),
            ExchangeSource::TimeDependent(m) => m.n_ions(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<SpinState<T>>,
    pub stats: IntegratorStats,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &SpinState<T> {
        self.states
            .last()
            .expect("trajectory has at least the initial sample")
    }

    pub fn final_time(&self) -> T {
        *self
            .times
            .last()
            .expect("trajectory has at least the initial sample")
    }

    /// `(t, P₊, P₋, ‖ψ‖² − 1)` for every sample.
    pub fn target_series(&self, target: usize) -> Result<Vec<(T, T, T, T)>> {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| {
                let (p, m) = target_probabilities(s, target)?;
                Ok((t, p, m, s.norm_sqr() - T::one()))
            })
            .collect()
    }
}

/// `n_samples` uniform sample times on `[0, duration)` followed by `duration` itself.
pub fn sample_times<T: Real>(duration: T, n_samples: usize) -> Vec<T> {
    let mut times: Vec<T> = (0..n_samples.max(1))
        .map(|k| duration * T::from_count(k) / T::from_count(n_samples.max(1)))
        .collect();
    times.push(duration);
    times
}

/// Integrates the register from `initial` under `source` and `field` for
/// `field.duration` seconds.
pub fn evolve<T: Real>(
    initial: &SpinState<T>,
    source: ExchangeSource<'_, T>,
    field: &FieldSchedule<T>,
    tolerances: &Tolerances<T>,
    n_samples: usize,
) -> Result<Trajectory<T>> {
    let n = initial.n_ions();
    if source.n_ions() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: source.n_ions(),
        });
    }
    let drift = (initial.norm_sqr() - T::one()).abs();
    if drift > T::lit(NORM_TOLERANCE).max(T::epsilon() * T::lit(64.0)) {
        return Err(Error::InvalidParameter {
            name: "initial",
            reason: format!("state is not normalized (|‖ψ‖² − 1| = {drift:e})"),
        });
    }
    let mut h = match source {
        ExchangeSource::Static(j) => SpinHamiltonian::with_static(j, field)?,
        ExchangeSource::TimeDependent(m) => SpinHamiltonian::with_time_dependent(m, field)?,
    };
    let times = sample_times(field.duration, n_samples);
    // Integrate in the interaction picture of the diagonal terms, whose
    // phases are known exactly; only the transverse coupling is stepped.
    let (ys, stats) = integrate(
        |t, y, dy| h.interaction_derivative(t, y, dy),
        initial.amplitudes(),
        &times,
        tolerances,
    )?;
    let mut phases = vec![T::zero(); initial.dim()];
    let states = times
        .iter()
        .zip(ys)
        .map(|(&t, mut y)| {
            h.diagonal_phases(t, &mut phases);
            for (a, &p) in y.iter_mut().zip(&phases) {
                *a = *a * Complex::new(p.cos(), -p.sin());
            }
            SpinState::from_raw(n, y)
        })
        .collect();
    Ok(Trajectory {
        times,
        states,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::Spin::*;

    #[test]
    fn samples_end_exactly_at_duration() {
        let t = sample_times(3.3e-3, 7);
        assert_eq!(t.len(), 8);
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 3.3e-3);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }

    // Single spin, no coupling: P_flip(t) = sin²(by t).
    #[test]
    fn single_spin_rabi() {
        let j = Matrix::zeros(1);
        let by: f64 = 2.0;
        let field = FieldSchedule::new(0.0, by, FieldScope::All, 2.0).unwrap();
        let traj = evolve(
            &SpinState::basis(&[Plus]),
            ExchangeSource::Static(&j),
            &field,
            &Tolerances::default(),
            40,
        )
        .unwrap();
        for (&t, s) in traj.times.iter().zip(&traj.states) {
            let (_, m) = target_probabilities(s, 0).unwrap();
            assert!((m - (by * t).sin().powi(2)).abs() < 1e-7, "t = {t}");
        }
        // Quarter period: amplitude i on |−⟩.
        let field =
            FieldSchedule::new(0.0, by, FieldScope::All, std::f64::consts::FRAC_PI_2 / by).unwrap();
        let traj = evolve(
            &SpinState::basis(&[Plus]),
            ExchangeSource::Static(&j),
            &field,
            &Tolerances::default(),
            1,
        )
        .unwrap();
        let a = traj.final_state().amplitude(&[Minus]);
        assert!((a - Complex::new(0.0, 1.0)).norm() < 1e-7);
    }

    #[test]
    fn diagonal_limit_keeps_populations() {
        let j = Matrix::from_fn(3, |a, b| {
            if a == b {
                0.0
            } else {
                5.0e3 * (1.0 + a as f64 + b as f64)
            }
        });
        let field = FieldSchedule::new(-2.0e4, 0.0, FieldScope::All, 3e-3).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex::new(0.0, 0.0); 8];
        amps[1] = Complex::new(h, 0.0);
        amps[6] = Complex::new(0.0, h);
        let psi = SpinState::from_amplitudes(3, amps).unwrap();
        let traj = evolve(
            &psi,
            ExchangeSource::Static(&j),
            &field,
            &Tolerances::default(),
            50,
        )
        .unwrap();
        for s in &traj.states {
            for (a, b) in s.amplitudes().iter().zip(psi.amplitudes()) {
                assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mismatched_source() {
        let j = Matrix::zeros(2);
        let field = FieldSchedule::new(0.0, 1.0, FieldScope::All, 1.0).unwrap();
        let r = evolve(
            &SpinState::<f64>::basis(&[Plus]),
            ExchangeSource::Static(&j),
            &field,
            &Tolerances::default(),
            1,
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}
