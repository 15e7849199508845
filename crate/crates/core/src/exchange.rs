//! Laser-mediated Ising couplings between the ions.
//!
//! For each transverse mode ν the coupling prefactor is
//! `M^ν_ij = ½ Ω_i Ω_j η_ν² b_i^ν b_j^ν / (μ² − ω_ν²)` and the exchange is
//! `J_ij(t) = Σ_ν M^ν_ij [ω_ν − ω_ν cos 2μt − 2μ sin(ω_ν t) sin(μt)]`.
//! Its time average keeps only the first term of the bracket. Everything is in
//! angular-frequency units (energy / ħ).

use crate::crystal::IonCrystal;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::spin::ControlPattern;

/// Relative guard on `|μ² − ω²| / ω²` below which a beatnote counts as resonant.
pub const RESONANCE_GUARD: f64 = 1e-6;

/// Above this Lamb-Dicke parameter the expansion behind the coupling is suspect.
pub const LAMB_DICKE_WARN: f64 = 0.3;

/// Transverse mode the beatnote is referenced to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeReference {
    CenterOfMass,
    Zigzag,
}

impl ModeReference {
    pub fn index<T: Real>(self, crystal: &IonCrystal<T>) -> usize {
        match self {
            ModeReference::CenterOfMass => 0,
            ModeReference::Zigzag => crystal.zigzag_index(),
        }
    }

    pub fn omega<T: Real>(self, crystal: &IonCrystal<T>) -> T {
        crystal.transverse_omega(self.index(crystal))
    }
}

/// Which transverse modes contribute to the coupling sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeSelection {
    /// Only the referenced mode.
    Referenced,
    /// Every transverse mode.
    All,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaserParams<T> {
    /// Uniform angular Rabi frequency (rad/s).
    pub rabi: T,
    /// Optional per-ion override of `rabi`.
    pub rabi_per_ion: Option<Vec<T>>,
    /// Lamb-Dicke parameter of the transverse center-of-mass mode.
    pub eta_cm: T,
    /// Angular beatnote frequency (rad/s).
    pub mu: T,
    pub reference: ModeReference,
    pub selection: ModeSelection,
}

impl<T: Real> LaserParams<T> {
    pub fn new(rabi: T, eta_cm: T, mu: T) -> Self {
        Self {
            rabi,
            rabi_per_ion: None,
            eta_cm,
            mu,
            reference: ModeReference::CenterOfMass,
            selection: ModeSelection::Referenced,
        }
    }

    /// Beatnote placed at `ratio` times the frequency of the referenced mode.
    pub fn detuned_from(
        crystal: &IonCrystal<T>,
        reference: ModeReference,
        ratio: T,
        rabi: T,
        eta_cm: T,
    ) -> Self {
        Self {
            reference,
            ..Self::new(rabi, eta_cm, ratio * reference.omega(crystal))
        }
    }

    pub fn with_selection(mut self, selection: ModeSelection) -> Self {
        self.selection = selection;
        self
    }

    pub fn with_rabi_per_ion(mut self, rabi: Vec<T>) -> Self {
        self.rabi_per_ion = Some(rabi);
        self
    }

    pub fn rabi_at(&self, ion: usize) -> T {
        self.rabi_per_ion.as_ref().map_or(self.rabi, |r| r[ion])
    }

    fn validate(&self, n_ions: usize) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.rabi >= T::zero()) {
            return bad("rabi", format!("must be non-negative, got {}", self.rabi));
        }
        if let Some(r) = &self.rabi_per_ion {
            if r.len() != n_ions {
                return Err(Error::DimensionMismatch {
                    expected: n_ions,
                    found: r.len(),
                });
            }
        }
        if !(self.eta_cm > T::zero() && self.eta_cm < T::one()) {
            return bad("eta_cm", format!("must lie in (0, 1), got {}", self.eta_cm));
        }
        if self.eta_cm > T::lit(LAMB_DICKE_WARN) {
            log::warn!(
                "Lamb-Dicke parameter {} is outside the weak-coupling regime",
                self.eta_cm
            );
        }
        if !(self.mu > T::zero()) {
            return bad("mu", format!("must be positive, got {}", self.mu));
        }
        Ok(())
    }
}

/// `η_ν = η_cm / √ratio_ν`: at fixed wavevector the Lamb-Dicke parameter scales as `1/√ω`.
pub fn lamb_dicke_per_mode<T: Real>(eta_cm: T, ratios: &[T]) -> Result<Vec<T>> {
    ratios
        .iter()
        .enumerate()
        .map(|(index, &r)| {
            if r > T::zero() {
                Ok(eta_cm / r.sqrt())
            } else {
                Err(Error::InvalidMode {
                    index,
                    ratio: r.as_f64(),
                })
            }
        })
        .collect()
}

/// Bracket of the time-dependent exchange for one mode.
#[inline]
pub fn exchange_bracket<T: Real>(omega: T, mu: T, t: T) -> T {
    omega
        - omega * (T::lit(2.0) * mu * t).cos()
        - T::lit(2.0) * mu * (omega * t).sin() * (mu * t).sin()
}

/// `∫₀ᵗ` of [`exchange_bracket`], in closed form.
#[inline]
pub fn exchange_bracket_integral<T: Real>(omega: T, mu: T, t: T) -> T {
    let two = T::lit(2.0);
    let (lo, hi) = (mu - omega, mu + omega);
    omega * t
        - omega * (two * mu * t).sin() / (two * mu)
        - mu * ((lo * t).sin() / lo - (hi * t).sin() / hi)
}

/// Contribution of one transverse mode.
#[derive(Clone, Debug)]
pub struct ModeCoupling<T> {
    pub mode: usize,
    /// Angular frequency ω_ν (rad/s).
    pub omega: T,
    /// `M^ν_ij`, zero on the diagonal; `J⁰ = Σ_ν ω_ν M^ν`.
    pub prefactor: Matrix<T>,
}

/// Static and time-dependent exchange for one crystal and laser setting.
#[derive(Clone, Debug)]
pub struct ExchangeModel<T> {
    mu: T,
    modes: Vec<ModeCoupling<T>>,
    j0: Matrix<T>,
}

impl<T: Real> ExchangeModel<T> {
    pub fn new(crystal: &IonCrystal<T>, laser: &LaserParams<T>) -> Result<Self> {
        let n = crystal.n_ions();
        laser.validate(n)?;
        let ratios: Vec<T> = crystal.transverse.iter().map(|m| m.ratio).collect();
        let etas = lamb_dicke_per_mode(laser.eta_cm, &ratios)?;
        let mu = laser.mu;

        for nu in 0..n {
            let omega = crystal.transverse_omega(nu);
            if ((mu * mu - omega * omega) / (omega * omega)).abs() < T::lit(RESONANCE_GUARD) {
                return Err(Error::NearResonance {
                    mode: nu,
                    omega: omega.as_f64(),
                    mu: mu.as_f64(),
                });
            }
        }

        let included: Vec<usize> = match laser.selection {
            ModeSelection::All => (0..n).collect(),
            ModeSelection::Referenced => vec![laser.reference.index(crystal)],
        };
        let half = T::lit(0.5);
        let modes: Vec<ModeCoupling<T>> = included
            .into_iter()
            .map(|nu| {
                let omega = crystal.transverse_omega(nu);
                let b = &crystal.transverse[nu].vector;
                let scale = half * etas[nu] * etas[nu] / (mu * mu - omega * omega);
                let prefactor = Matrix::from_fn(n, |i, j| {
                    let (a, c) = (i.min(j), i.max(j));
                    if a == c {
                        T::zero()
                    } else {
                        scale * laser.rabi_at(a) * laser.rabi_at(c) * b[a] * b[c]
                    }
                });
                ModeCoupling {
                    mode: nu,
                    omega,
                    prefactor,
                }
            })
            .collect();

        let mut j0 = Matrix::zeros(n);
        for m in &modes {
            j0.add_scaled(&m.prefactor, m.omega);
        }
        Ok(Self { mu, modes, j0 })
    }

    pub fn n_ions(&self) -> usize {
        self.j0.dim()
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn modes(&self) -> &[ModeCoupling<T>] {
        &self.modes
    }

    /// Time-averaged couplings J⁰ (rad/s).
    pub fn j0(&self) -> &Matrix<T> {
        &self.j0
    }

    /// Full time-dependent couplings J(t) (rad/s).
    pub fn exchange_at(&self, t: T) -> Matrix<T> {
        let mut j = Matrix::zeros(self.n_ions());
        for m in &self.modes {
            j.add_scaled(&m.prefactor, exchange_bracket(m.omega, self.mu, t));
        }
        j
    }

    pub fn j_rms(&self) -> Result<T> {
        j_rms(&self.j0)
    }

    pub fn delta_for_control(&self, target: usize, controls: &ControlPattern) -> Result<T> {
        delta_for_control(&self.j0, target, controls)
    }
}

/// Time-averaged couplings J⁰ for `crystal` under `laser`.
pub fn static_exchange<T: Real>(
    crystal: &IonCrystal<T>,
    laser: &LaserParams<T>,
) -> Result<Matrix<T>> {
    Ok(ExchangeModel::new(crystal, laser)?.j0)
}

/// Time-dependent couplings J(t).
pub fn exchange_at<T: Real>(
    crystal: &IonCrystal<T>,
    laser: &LaserParams<T>,
    t: T,
) -> Result<Matrix<T>> {
    if t < T::zero() {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "time must be non-negative".into(),
        });
    }
    Ok(ExchangeModel::new(crystal, laser)?.exchange_at(t))
}

fn check_pairs<T: Real>(j0: &Matrix<T>) -> Result<usize> {
    let n = j0.dim();
    if n < 2 {
        return Err(Error::Undefined(format!(
            "J_rms needs at least two ions, got {n}"
        )));
    }
    Ok(n)
}

/// Root-mean-square of J⁰ over ordered pairs, `√(Σ_{i≠j} J⁰_ij² / N(N−1))`.
///
/// Equals the common coupling when all couplings agree.
pub fn j_rms<T: Real>(j0: &Matrix<T>) -> Result<T> {
    let n = check_pairs(j0)?;
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += j0[(i, j)] * j0[(i, j)];
            }
        }
    }
    Ok((acc / T::from_count(n * (n - 1))).sqrt())
}

/// Alternative normalization `√(Σ_{i>j} |2J⁰_ij|² / N(N−1))`, which is
/// `√2` times [`j_rms`]. Kept for comparison only.
pub fn j_rms_doubled_pairs<T: Real>(j0: &Matrix<T>) -> Result<T> {
    let n = check_pairs(j0)?;
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..i {
            let d = T::lit(2.0) * j0[(i, j)];
            acc += d * d;
        }
    }
    Ok((acc / T::from_count(n * (n - 1))).sqrt())
}

/// Branch splitting `Δ = E(+, controls) − E(−, controls) = 4 Σ_{i≠target} J⁰_{i,target} σ_i`.
pub fn delta_for_control<T: Real>(
    j0: &Matrix<T>,
    target: usize,
    controls: &ControlPattern,
) -> Result<T> {
    let n = j0.dim();
    if target >= n {
        return Err(Error::IndexOutOfRange {
            index: target,
            len: n,
        });
    }
    if controls.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: controls.len(),
        });
    }
    let others = (0..n).filter(|&i| i != target);
    let sum = others.zip(controls.signs()).fold(T::zero(), |acc, (i, s)| {
        acc + j0[(i, target)] * T::lit(s as f64)
    });
    Ok(T::lit(4.0) * sum)
}
