use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spin::{config_index, spin_at, ControlPattern, Spin};

/// Normalization slack accepted at construction.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Amplitudes over the `2^N` X-basis product configurations.
///
/// Index layout follows [`crate::spin`]: ion 0 is the most significant bit and
/// `+` precedes `−`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState<T> {
    n_ions: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> SpinState<T> {
    pub fn from_amplitudes(n_ions: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let dim = 1usize << n_ions;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        let state = Self { n_ions, amplitudes };
        let drift = (state.norm_sqr() - T::one()).abs();
        if drift > T::lit(NORM_TOLERANCE).max(T::epsilon() * T::lit(64.0)) {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                reason: format!("state is not normalized (|‖ψ‖² − 1| = {drift:e})"),
            });
        }
        Ok(state)
    }

    /// Trusted constructor for integrator output, which may carry bounded drift.
    pub(crate) fn from_raw(n_ions: usize, amplitudes: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_ions);
        Self { n_ions, amplitudes }
    }

    /// Single product configuration, spins listed in ion order.
    pub fn basis(spins: &[Spin]) -> Self {
        let n_ions = spins.len();
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n_ions];
        amplitudes[config_index(spins)] = Complex::new(T::one(), T::zero());
        Self { n_ions, amplitudes }
    }

    /// Product state with the target in `target_spin` and the controls in `controls`.
    pub fn gate_input(target: usize, target_spin: Spin, controls: &ControlPattern) -> Result<Self> {
        Ok(Self::basis(&controls.with_target(target, target_spin)?))
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, spins: &[Spin]) -> Complex<T> {
        self.amplitudes[config_index(spins)]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }
}

/// Marginal probabilities `(P₊, P₋)` of the spin at `target` in the X basis.
pub fn target_probabilities<T: Real>(state: &SpinState<T>, target: usize) -> Result<(T, T)> {
    let n = state.n_ions();
    if target >= n {
        return Err(Error::IndexOutOfRange {
            index: target,
            len: n,
        });
    }
    let mut plus = T::zero();
    let mut minus = T::zero();
    for (k, a) in state.amplitudes().iter().enumerate() {
        match spin_at(k, target, n) {
            Spin::Plus => plus += a.norm_sqr(),
            Spin::Minus => minus += a.norm_sqr(),
        }
    }
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Spin::*;

    #[test]
    fn basis_probabilities() {
        let s = SpinState::<f64>::basis(&[Plus, Minus, Minus]);
        assert_eq!(target_probabilities(&s, 0).unwrap(), (1.0, 0.0));
        assert_eq!(target_probabilities(&s, 1).unwrap(), (0.0, 1.0));
        assert!(matches!(
            target_probabilities(&s, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn equal_superposition() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex::new(0.0, 0.0); 8];
        amps[config_index(&[Plus, Minus, Minus])] = Complex::new(h, 0.0);
        amps[config_index(&[Minus, Minus, Minus])] = Complex::new(h, 0.0);
        let s = SpinState::from_amplitudes(3, amps).unwrap();
        let (p, m) = target_probabilities(&s, 0).unwrap();
        assert!((p - 0.5).abs() < 1e-15 && (m - 0.5).abs() < 1e-15);
        assert!((p + m - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_unnormalized() {
        let amps = vec![Complex::new(0.5, 0.0); 2];
        assert!(SpinState::from_amplitudes(1, amps).is_err());
        let amps = vec![Complex::new(1.0, 0.0); 3];
        assert!(matches!(
            SpinState::from_amplitudes(1, amps),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
