//! Equilibrium and normal modes of a linear Coulomb crystal.
//!
//! Positions are dimensionless, in units of the Coulomb length
//! `(e² / 4πε₀ m ω_z²)^{1/3}`. Longitudinal frequencies come out in units of
//! the longitudinal center-of-mass frequency; transverse ones are reported as
//! ratios to the transverse center-of-mass frequency `omega_cm`.

use crate::error::{Error, Result};
use crate::linalg::{solve, symmetric_eigen, Matrix};
use crate::scalar::Real;

const MAX_NEWTON_ITERATIONS: usize = 200;

/// Linear Paul trap holding `n_ions` identical ions.
#[derive(Clone, Debug, PartialEq)]
pub struct TrapConfig<T> {
    pub n_ions: usize,
    /// Transverse center-of-mass angular frequency (rad/s).
    pub omega_cm: T,
    /// ω_longitudinal-CM / ω_transverse-CM.
    pub anisotropy: T,
}

impl<T: Real> TrapConfig<T> {
    pub fn new(n_ions: usize, omega_cm: T, anisotropy: T) -> Result<Self> {
        if n_ions == 0 {
            return Err(Error::InvalidParameter {
                name: "n_ions",
                reason: "need at least one ion".into(),
            });
        }
        if !(omega_cm > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "omega_cm",
                reason: format!("must be positive, got {omega_cm}"),
            });
        }
        if !(anisotropy > T::zero() && anisotropy < T::one()) {
            return Err(Error::InvalidParameter {
                name: "anisotropy",
                reason: format!("must lie in (0, 1), got {anisotropy}"),
            });
        }
        Ok(Self {
            n_ions,
            omega_cm,
            anisotropy,
        })
    }

    /// Default anisotropy for a crystal of `n_ions`: 0.1 for odd, 0.2092 for even.
    pub fn default_anisotropy(n_ions: usize) -> T {
        if n_ions % 2 == 1 {
            T::lit(0.1)
        } else {
            T::lit(0.2092)
        }
    }
}

/// One normal mode of a single motional direction.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalMode<T> {
    /// Eigenvalue of the dimensionless stiffness matrix.
    pub eigenvalue: T,
    /// Frequency relative to the center-of-mass mode of the same direction.
    pub ratio: T,
    /// Unit participation vector `b_i`, first nonzero entry positive.
    pub vector: Vec<T>,
}

/// Equilibrium positions plus longitudinal and transverse normal modes.
#[derive(Clone, Debug)]
pub struct IonCrystal<T> {
    pub trap: TrapConfig<T>,
    pub positions: Vec<T>,
    /// Ascending; the center-of-mass mode comes first.
    pub longitudinal: Vec<NormalMode<T>>,
    /// Descending; the center-of-mass mode comes first with ratio exactly 1.
    pub transverse: Vec<NormalMode<T>>,
}

impl<T: Real> IonCrystal<T> {
    pub fn build(trap: &TrapConfig<T>) -> Result<Self> {
        let positions = equilibrium_positions::<T>(trap.n_ions)?;
        let longitudinal = longitudinal_modes(&positions)?;
        let transverse = transverse_modes(&positions, trap.anisotropy)?;
        Ok(Self {
            trap: trap.clone(),
            positions,
            longitudinal,
            transverse,
        })
    }

    pub fn n_ions(&self) -> usize {
        self.positions.len()
    }

    /// Angular frequency (rad/s) of transverse mode `nu`.
    pub fn transverse_omega(&self, nu: usize) -> T {
        self.transverse[nu].ratio * self.trap.omega_cm
    }

    /// Angular frequency (rad/s) of longitudinal mode `nu`.
    pub fn longitudinal_omega(&self, nu: usize) -> T {
        self.longitudinal[nu].ratio * self.trap.anisotropy * self.trap.omega_cm
    }

    pub fn transverse_cm(&self) -> &NormalMode<T> {
        &self.transverse[0]
    }

    /// Lowest transverse mode (the zigzag mode for N ≥ 2).
    pub fn zigzag(&self) -> &NormalMode<T> {
        self.transverse
            .last()
            .expect("crystal has at least one mode")
    }

    pub fn zigzag_index(&self) -> usize {
        self.transverse.len() - 1
    }
}

fn force_residual<T: Real>(u: &[T]) -> Vec<T> {
    let n = u.len();
    (0..n)
        .map(|m| {
            let mut f = u[m];
            for p in 0..n {
                if p == m {
                    continue;
                }
                let d = u[m] - u[p];
                let inv2 = T::one() / (d * d);
                if p < m {
                    f -= inv2;
                } else {
                    f += inv2;
                }
            }
            f
        })
        .collect()
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

fn strictly_increasing<T: Real>(u: &[T]) -> bool {
    u.windows(2).all(|w| w[0] < w[1])
}

/// Solves the force balance for `n_ions` ions by damped Newton iteration.
///
/// Returned coordinates are strictly increasing and antisymmetric under index
/// reversal.
pub fn equilibrium_positions<T: Real>(n_ions: usize) -> Result<Vec<T>> {
    if n_ions == 0 {
        return Err(Error::InvalidParameter {
            name: "n_ions",
            reason: "need at least one ion".into(),
        });
    }
    let half = T::from_count(n_ions + 1) / T::lit(2.0);
    let mut u: Vec<T> = (1..=n_ions).map(|m| T::from_count(m) - half).collect();
    let tol = T::epsilon() * T::lit(512.0);

    let mut residual = max_abs(&force_residual(&u));
    let mut iterations = 0;
    while residual > tol {
        if iterations == MAX_NEWTON_ITERATIONS {
            return Err(Error::SolverFailure {
                iterations,
                residual: residual.as_f64(),
            });
        }
        iterations += 1;
        // The Jacobian of the force balance is the longitudinal stiffness matrix.
        let jac = longitudinal_stiffness(&u);
        let f = force_residual(&u);
        let step = solve(&jac, &f)?;
        let mut lambda = T::one();
        loop {
            let trial: Vec<T> = u
                .iter()
                .zip(&step)
                .map(|(&x, &dx)| x - lambda * dx)
                .collect();
            if strictly_increasing(&trial) {
                let r = max_abs(&force_residual(&trial));
                if r < residual || lambda < T::lit(1e-3) {
                    u = trial;
                    residual = r;
                    break;
                }
            }
            lambda *= T::lit(0.5);
            if lambda < T::lit(1e-6) {
                return Err(Error::SolverFailure {
                    iterations,
                    residual: residual.as_f64(),
                });
            }
        }
    }

    let n = u.len();
    let sym: Vec<T> = (0..n)
        .map(|m| (u[m] - u[n - 1 - m]) / T::lit(2.0))
        .collect();
    Ok(sym)
}

/// Longitudinal stiffness: diagonal `1 + 2Σ 1/|u_m−u_p|³`, off-diagonal `−2/|u_m−u_p|³`.
pub fn longitudinal_stiffness<T: Real>(positions: &[T]) -> Matrix<T> {
    let n = positions.len();
    let mut k = Matrix::zeros(n);
    for m in 0..n {
        let mut diag = T::one();
        for p in 0..n {
            if p == m {
                continue;
            }
            let c = T::lit(2.0) / (positions[m] - positions[p]).abs().powi(3);
            k[(m, p)] = -c;
            diag += c;
        }
        k[(m, m)] = diag;
    }
    k
}

/// Transverse stiffness: diagonal `α² − Σ 1/|u_m−u_p|³`, off-diagonal `+1/|u_m−u_p|³`,
/// with `α = 1 / anisotropy`.
pub fn transverse_stiffness<T: Real>(positions: &[T], anisotropy: T) -> Matrix<T> {
    let n = positions.len();
    let alpha = T::one() / anisotropy;
    let mut k = Matrix::zeros(n);
    for m in 0..n {
        let mut diag = alpha * alpha;
        for p in 0..n {
            if p == m {
                continue;
            }
            let c = T::one() / (positions[m] - positions[p]).abs().powi(3);
            k[(m, p)] = c;
            diag -= c;
        }
        k[(m, m)] = diag;
    }
    k
}

fn fix_sign<T: Real>(v: &mut [T]) {
    let thresh = T::epsilon().sqrt();
    if let Some(&first) = v.iter().find(|x| x.abs() > thresh) {
        if first < T::zero() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn sorted_modes<T: Real>(k: &Matrix<T>, descending: bool) -> Result<Vec<(T, Vec<T>)>> {
    let eig = symmetric_eigen(k)?;
    let mut pairs: Vec<(T, Vec<T>)> = eig.values.into_iter().zip(eig.vectors).collect();
    pairs.sort_by(|a, b| {
        let o = a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal);
        if descending {
            o.reverse()
        } else {
            o
        }
    });
    for (_, v) in pairs.iter_mut() {
        fix_sign(v);
    }
    Ok(pairs)
}

/// Longitudinal modes sorted ascending; `ratio = √eigenvalue` in units of the
/// longitudinal center-of-mass frequency.
pub fn longitudinal_modes<T: Real>(positions: &[T]) -> Result<Vec<NormalMode<T>>> {
    let k = longitudinal_stiffness(positions);
    let pairs = sorted_modes(&k, false)?;
    pairs
        .into_iter()
        .map(|(eigenvalue, vector)| {
            if eigenvalue <= T::zero() {
                return Err(Error::InternalConsistency(format!(
                    "longitudinal stiffness is not positive definite (eigenvalue {eigenvalue})"
                )));
            }
            Ok(NormalMode {
                eigenvalue,
                ratio: eigenvalue.sqrt(),
                vector,
            })
        })
        .collect()
}

/// Transverse modes sorted descending; ratios are relative to the transverse
/// center-of-mass mode, which is first with ratio exactly 1.
pub fn transverse_modes<T: Real>(positions: &[T], anisotropy: T) -> Result<Vec<NormalMode<T>>> {
    if !(anisotropy > T::zero() && anisotropy < T::one()) {
        return Err(Error::InvalidParameter {
            name: "anisotropy",
            reason: format!("must lie in (0, 1), got {anisotropy}"),
        });
    }
    let k = transverse_stiffness(positions, anisotropy);
    let pairs = sorted_modes(&k, true)?;
    if let Some((mode, (ev, _))) = pairs
        .iter()
        .enumerate()
        .rev()
        .find(|(_, (ev, _))| *ev <= T::zero())
    {
        return Err(Error::Unstable {
            mode,
            eigenvalue: ev.as_f64(),
        });
    }
    let top = pairs[0].0.sqrt();
    Ok(pairs
        .into_iter()
        .map(|(eigenvalue, vector)| NormalMode {
            eigenvalue,
            ratio: eigenvalue.sqrt() / top,
            vector,
        })
        .collect())
}
