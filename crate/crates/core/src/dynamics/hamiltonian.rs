//! Matrix-free action of the spin Hamiltonian
//! `H(t) = Σ_{i,j} J_ij(t) σ^X_i σ^X_j − (bx/2) Σ_i σ^X_i + by Σ_i σ^Y_i`
//! in the X-product basis.
//!
//! The Ising and longitudinal terms are diagonal. `σ^Y_i` connects the two
//! configurations that differ only in spin `i`; with the X-basis phases used
//! here its matrix elements are `⟨±|σ^Y|∓⟩ = −1`, so a resonant π/2 pulse maps
//! `|+⟩ → i|−⟩`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::exchange::{exchange_bracket, exchange_bracket_integral, ExchangeModel};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::spin::spin_at;

use super::state::SpinState;

/// Which ions the external field acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldScope {
    All,
    /// Only the given ion (used to compare with the single-target subspace solution).
    Ion(usize),
}

/// Constant field applied for `duration` seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSchedule<T> {
    /// Longitudinal amplitude (rad/s), entering as `−(bx/2) Σ σ^X`.
    pub bx: T,
    /// Transverse amplitude (rad/s), entering as `by Σ σ^Y`.
    pub by: T,
    pub scope: FieldScope,
    pub duration: T,
}

impl<T: Real> FieldSchedule<T> {
    pub fn new(bx: T, by: T, scope: FieldScope, duration: T) -> Result<Self> {
        if !(duration > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "duration",
                reason: format!("must be positive, got {duration}"),
            });
        }
        if !(by >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "by",
                reason: format!("must be non-negative, got {by}"),
            });
        }
        Ok(Self {
            bx,
            by,
            scope,
            duration,
        })
    }

    pub fn with_scope(mut self, scope: FieldScope) -> Self {
        self.scope = scope;
        self
    }

    fn acts_on(&self, ion: usize) -> bool {
        match self.scope {
            FieldScope::All => true,
            FieldScope::Ion(i) => i == ion,
        }
    }
}

/// Diagonal Ising energies of one coupling component.
#[derive(Clone, Debug)]
struct IsingTerm<T> {
    energies: Vec<T>,
    /// `Some(ω)` multiplies the energies by the exchange bracket at time t;
    /// `None` means the energies are static.
    omega: Option<T>,
}

/// Hamiltonian prepared for repeated application.
#[derive(Clone, Debug)]
pub struct SpinHamiltonian<T> {
    n_ions: usize,
    mu: T,
    ising: Vec<IsingTerm<T>>,
    field_diag: Vec<T>,
    by: T,
    flip_masks: Vec<usize>,
    /// Scratch for the summed diagonal, reused between calls.
    diag: Vec<T>,
    /// Scratch for `e^{iΦ_k(t)}`.
    rotors: Vec<Complex<T>>,
}

fn configuration_energies<T: Real>(j: &Matrix<T>) -> Vec<T> {
    let n = j.dim();
    (0..1usize << n)
        .map(|k| {
            let s: Vec<T> = (0..n)
                .map(|i| T::lit(spin_at(k, i, n).sign() as f64))
                .collect();
            j.quadratic_form(&s)
        })
        .collect()
}

impl<T: Real> SpinHamiltonian<T> {
    fn with_terms(
        n_ions: usize,
        mu: T,
        ising: Vec<IsingTerm<T>>,
        field: &FieldSchedule<T>,
    ) -> Result<Self> {
        if let FieldScope::Ion(i) = field.scope {
            if i >= n_ions {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: n_ions,
                });
            }
        }
        let dim = 1usize << n_ions;
        let half_bx = field.bx / T::lit(2.0);
        let field_diag = (0..dim)
            .map(|k| {
                (0..n_ions)
                    .filter(|&i| field.acts_on(i))
                    .fold(T::zero(), |acc, i| {
                        acc - half_bx * T::lit(spin_at(k, i, n_ions).sign() as f64)
                    })
            })
            .collect();
        let flip_masks = (0..n_ions)
            .filter(|&i| field.acts_on(i))
            .map(|i| 1usize << (n_ions - 1 - i))
            .collect();
        Ok(Self {
            n_ions,
            mu,
            ising,
            field_diag,
            by: field.by,
            flip_masks,
            diag: vec![T::zero(); dim],
            rotors: vec![Complex::new(T::zero(), T::zero()); dim],
        })
    }

    /// Static couplings `j`.
    pub fn with_static(j: &Matrix<T>, field: &FieldSchedule<T>) -> Result<Self> {
        let term = IsingTerm {
            energies: configuration_energies(j),
            omega: None,
        };
        Self::with_terms(j.dim(), T::zero(), vec![term], field)
    }

    /// Full time-dependent couplings of `model`.
    pub fn with_time_dependent(model: &ExchangeModel<T>, field: &FieldSchedule<T>) -> Result<Self> {
        let terms = model
            .modes()
            .iter()
            .map(|m| IsingTerm {
                energies: configuration_energies(&m.prefactor),
                omega: Some(m.omega),
            })
            .collect();
        Self::with_terms(model.n_ions(), model.mu(), terms, field)
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn dim(&self) -> usize {
        self.field_diag.len()
    }

    /// Writes `−i H(t) ψ` into `out`. Cost `O(N · 2^N)`.
    pub fn derivative(&mut self, t: T, psi: &[Complex<T>], out: &mut [Complex<T>]) {
        self.diag.copy_from_slice(&self.field_diag);
        for term in &self.ising {
            let c = match term.omega {
                Some(omega) => exchange_bracket(omega, self.mu, t),
                None => T::one(),
            };
            for (d, &e) in self.diag.iter_mut().zip(&term.energies) {
                *d += c * e;
            }
        }
        for (k, o) in out.iter_mut().enumerate() {
            // −i·E·ψ
            let a = psi[k];
            let e = self.diag[k];
            *o = Complex::new(e * a.im, -e * a.re);
        }
        if self.by != T::zero() {
            // −i·(by·(−1))·ψ[k^m] = i·by·ψ[k^m]
            let by = self.by;
            for &mask in &self.flip_masks {
                for (k, o) in out.iter_mut().enumerate() {
                    let a = psi[k ^ mask];
                    *o += Complex::new(-by * a.im, by * a.re);
                }
            }
        }
    }
}

impl<T: Real> SpinHamiltonian<T> {
    /// Accumulated diagonal phases `Φ_k(t) = ∫₀ᵗ E_k(s) ds` of the Ising and
    /// longitudinal terms, evaluated in closed form.
    pub fn diagonal_phases(&self, t: T, out: &mut [T]) {
        for (o, &f) in out.iter_mut().zip(&self.field_diag) {
            *o = f * t;
        }
        for term in &self.ising {
            let c = match term.omega {
                Some(omega) => exchange_bracket_integral(omega, self.mu, t),
                None => t,
            };
            for (o, &e) in out.iter_mut().zip(&term.energies) {
                *o += c * e;
            }
        }
    }

    /// Derivative in the interaction picture of the diagonal part,
    /// `φ = e^{iΦ(t)} ψ`, where only the transverse term remains:
    /// `φ'_k = i·by·Σ_i e^{i(Φ_k − Φ_{k⊕i})} φ_{k⊕i}`.
    pub fn interaction_derivative(&mut self, t: T, phi: &[Complex<T>], out: &mut [Complex<T>]) {
        out.iter_mut()
            .for_each(|o| *o = Complex::new(T::zero(), T::zero()));
        if self.by == T::zero() || self.flip_masks.is_empty() {
            return;
        }
        let mut phases = std::mem::take(&mut self.diag);
        self.diagonal_phases(t, &mut phases);
        for (r, &p) in self.rotors.iter_mut().zip(&phases) {
            *r = Complex::new(p.cos(), p.sin());
        }
        self.diag = phases;
        let by = self.by;
        for &mask in &self.flip_masks {
            for (k, o) in out.iter_mut().enumerate() {
                let j = k ^ mask;
                *o += self.rotors[j].conj() * phi[j];
            }
        }
        for (o, r) in out.iter_mut().zip(&self.rotors) {
            let v = *o * *r;
            *o = Complex::new(-by * v.im, by * v.re);
        }
    }
}

/// `−i H ψ` for static couplings `j` and a constant field.
pub fn apply_hamiltonian<T: Real>(
    state: &SpinState<T>,
    j: &Matrix<T>,
    field: &FieldSchedule<T>,
) -> Result<Vec<Complex<T>>> {
    if j.dim() != state.n_ions() {
        return Err(Error::DimensionMismatch {
            expected: state.n_ions(),
            found: j.dim(),
        });
    }
    let mut h = SpinHamiltonian::with_static(j, field)?;
    let mut out = vec![Complex::new(T::zero(), T::zero()); state.dim()];
    h.derivative(T::zero(), state.amplitudes(), &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{config_index, Spin::*};

    fn uniform_j(n: usize, v: f64) -> Matrix<f64> {
        Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { v })
    }

    #[test]
    fn diagonal_when_by_zero() {
        let j = uniform_j(3, 2.0);
        let field = FieldSchedule::new(1.5, 0.0, FieldScope::All, 1.0).unwrap();
        let spins = [Plus, Minus, Minus];
        let s = SpinState::basis(&spins);
        let d = apply_hamiltonian(&s, &j, &field).unwrap();
        let k = config_index(&spins);
        for (i, v) in d.iter().enumerate() {
            if i != k {
                assert_eq!(*v, Complex::new(0.0, 0.0));
            }
        }
        // Σ_{i≠j} J σσ = 2·2·(−1 −1 +1) = −4; field −(1.5/2)(1 −1 −1) = 0.75.
        assert!((d[k] - Complex::new(0.0, 3.25)).norm() < 1e-14);
    }

    #[test]
    fn transverse_term_couples_single_flips() {
        let j = uniform_j(2, 0.0);
        let field = FieldSchedule::new(0.0, 1.0, FieldScope::All, 1.0).unwrap();
        let s = SpinState::basis(&[Plus, Plus]);
        let d = apply_hamiltonian(&s, &j, &field).unwrap();
        assert_eq!(d[config_index(&[Minus, Plus])], Complex::new(0.0, 1.0));
        assert_eq!(d[config_index(&[Plus, Minus])], Complex::new(0.0, 1.0));
        assert_eq!(d[config_index(&[Minus, Minus])], Complex::new(0.0, 0.0));

        let target_only = field.clone().with_scope(FieldScope::Ion(1));
        let d = apply_hamiltonian(&s, &j, &target_only).unwrap();
        assert_eq!(d[config_index(&[Minus, Plus])], Complex::new(0.0, 0.0));
        assert_eq!(d[config_index(&[Plus, Minus])], Complex::new(0.0, 1.0));
    }

    #[test]
    fn hermitian_generator() {
        // −iH anti-Hermitian ⇔ Re⟨a|−iH|b⟩ = −Re⟨b|−iH|a⟩ conj-symmetric.
        let j = Matrix::from_fn(3, |i, k| if i == k { 0.0 } else { 0.3 + (i + k) as f64 });
        let field = FieldSchedule::new(0.7, 1.3, FieldScope::All, 1.0).unwrap();
        let mut h = SpinHamiltonian::with_static(&j, &field).unwrap();
        let dim = 8;
        let mut cols = vec![];
        for b in 0..dim {
            let mut e = vec![Complex::new(0.0, 0.0); dim];
            e[b] = Complex::new(1.0, 0.0);
            let mut out = vec![Complex::new(0.0, 0.0); dim];
            h.derivative(0.0, &e, &mut out);
            cols.push(out);
        }
        for a in 0..dim {
            for b in 0..dim {
                assert!((cols[b][a] + cols[a][b].conj()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn dimension_checks() {
        let j = uniform_j(2, 1.0);
        let s = SpinState::<f64>::basis(&[Plus, Plus, Plus]);
        let field = FieldSchedule::new(0.0, 0.0, FieldScope::All, 1.0).unwrap();
        assert!(matches!(
            apply_hamiltonian(&s, &j, &field),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = FieldSchedule::new(0.0, 0.0, FieldScope::Ion(5), 1.0).unwrap();
        assert!(SpinHamiltonian::with_static(&j, &bad).is_err());
        assert!(FieldSchedule::new(0.0, -1.0, FieldScope::All, 1.0).is_err());
        assert!(FieldSchedule::new(0.0, 1.0, FieldScope::All, 0.0).is_err());
    }
}
