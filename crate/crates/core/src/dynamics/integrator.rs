//! Bogacki–Shampine 3(2) embedded Runge–Kutta pair with PI step control,
//! specialized to complex state vectors.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances<T> {
    pub rtol: T,
    pub atol: T,
    /// Largest tolerated `|‖ψ(t)‖² − ‖ψ(0)‖²|` over the run.
    pub norm_budget: T,
    pub max_steps: u64,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-8),
            atol: T::lit(1e-10),
            norm_budget: T::lit(1e-6),
            max_steps: 2_000_000_000,
        }
    }
}

impl<T: Real> Tolerances<T> {
    /// Same settings with both local tolerances divided by `factor`.
    pub fn tightened(&self, factor: T) -> Self {
        Self {
            rtol: self.rtol / factor,
            atol: self.atol / factor,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rtol > T::zero() && self.atol > T::zero() && self.norm_budget > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "tolerances",
                reason: "rtol, atol and norm budget must be positive".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntegratorStats {
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    pub rhs_evaluations: u64,
    pub max_norm_drift: f64,
}

impl IntegratorStats {
    pub fn merge(&mut self, other: &IntegratorStats) {
        self.accepted_steps += other.accepted_steps;
        self.rejected_steps += other.rejected_steps;
        self.rhs_evaluations += other.rhs_evaluations;
        self.max_norm_drift = self.max_norm_drift.max(other.max_norm_drift);
    }
}

// PI controller gains for an error estimate of order 3 (Gustafsson).
const SAFETY: f64 = 0.9;
const K_I: f64 = 0.7 / 3.0;
const K_P: f64 = 0.4 / 3.0;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

fn axpy<T: Real>(out: &mut [Complex<T>], y: &[Complex<T>], terms: &[(T, &[Complex<T>])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = y[i];
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        *o = acc;
    }
}

fn norm_sqr<T: Real>(y: &[Complex<T>]) -> T {
    y.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
}

/// Scaled max-norm used for step acceptance.
fn error_norm<T: Real>(
    err: &[Complex<T>],
    y: &[Complex<T>],
    y_new: &[Complex<T>],
    tol: &Tolerances<T>,
) -> T {
    err.iter()
        .zip(y.iter().zip(y_new))
        .fold(T::zero(), |acc, (e, (a, b))| {
            let scale = tol.atol + tol.rtol * a.norm().max(b.norm());
            acc.max(e.norm() / scale)
        })
}

fn initial_step<T: Real, F>(
    rhs: &mut F,
    t0: T,
    y0: &[Complex<T>],
    f0: &[Complex<T>],
    tol: &Tolerances<T>,
    span: T,
) -> T
where
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
{
    let zero = vec![Complex::new(T::zero(), T::zero()); y0.len()];
    let d0 = error_norm(y0, y0, &zero, tol);
    let d1 = error_norm(f0, y0, &zero, tol);
    let h0 = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6) * span
    } else {
        T::lit(0.01) * d0 / d1
    };
    let h0 = h0.min(span);
    let mut y1 = zero.clone();
    axpy(&mut y1, y0, &[(h0, f0)]);
    let mut f1 = zero.clone();
    rhs(t0 + h0, &y1, &mut f1);
    let diff: Vec<Complex<T>> = f1.iter().zip(f0).map(|(a, b)| *a - *b).collect();
    let d2 = error_norm(&diff, y0, &zero, tol) / h0;
    let h1 = if d1.max(d2) <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6) * span)
    } else {
        (T::lit(0.01) / d1.max(d2)).powf(T::one() / T::lit(3.0))
    };
    (T::lit(100.0) * h0).min(h1).min(span)
}

/// Integrates `ψ' = rhs(t, ψ)` from `sample_times[0]` and returns the state at
/// every entry of `sample_times` (which must be increasing). Steps are clipped
/// so each sample time is hit exactly.
pub fn integrate<T: Real, F>(
    mut rhs: F,
    y0: &[Complex<T>],
    sample_times: &[T],
    tol: &Tolerances<T>,
) -> Result<(Vec<Vec<Complex<T>>>, IntegratorStats)>
where
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
{
    tol.validate()?;
    let dim = y0.len();
    let zero = Complex::new(T::zero(), T::zero());
    let mut stats = IntegratorStats::default();
    let mut out = Vec::with_capacity(sample_times.len());
    let Some(&t_start) = sample_times.first() else {
        return Ok((out, stats));
    };
    out.push(y0.to_vec());
    let t_end = *sample_times.last().unwrap_or(&t_start);
    if sample_times.len() == 1 || t_end <= t_start {
        return Ok((out, stats));
    }

    let norm0 = norm_sqr(y0);
    let mut t = t_start;
    let mut y = y0.to_vec();
    let mut k1 = vec![zero; dim];
    let mut k2 = vec![zero; dim];
    let mut k3 = vec![zero; dim];
    let mut k4 = vec![zero; dim];
    let mut stage = vec![zero; dim];
    let mut y_new = vec![zero; dim];
    let mut err = vec![zero; dim];

    rhs(t, &y, &mut k1);
    stats.rhs_evaluations += 1;
    let mut h = initial_step(&mut rhs, t, &y, &k1, tol, t_end - t_start);
    stats.rhs_evaluations += 1;
    let mut err_prev = T::one();

    let (half, three_q) = (T::lit(0.5), T::lit(0.75));
    let (b1, b2, b3) = (T::lit(2.0 / 9.0), T::lit(1.0 / 3.0), T::lit(4.0 / 9.0));
    let (e1, e2, e3, e4) = (
        T::lit(-5.0 / 72.0),
        T::lit(1.0 / 12.0),
        T::lit(1.0 / 9.0),
        T::lit(-1.0 / 8.0),
    );

    for &target in &sample_times[1..] {
        while t < target {
            if stats.accepted_steps + stats.rejected_steps >= tol.max_steps {
                return Err(Error::StepUnderflow {
                    t: t.as_f64(),
                    h: h.as_f64(),
                });
            }
            let h_min = T::lit(16.0) * T::epsilon() * t.abs().max(target.abs());
            if h < h_min {
                return Err(Error::StepUnderflow {
                    t: t.as_f64(),
                    h: h.as_f64(),
                });
            }
            let remaining = target - t;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };

            axpy(&mut stage, &y, &[(half * step, &k1)]);
            rhs(t + half * step, &stage, &mut k2);
            axpy(&mut stage, &y, &[(three_q * step, &k2)]);
            rhs(t + three_q * step, &stage, &mut k3);
            axpy(
                &mut y_new,
                &y,
                &[(b1 * step, &k1), (b2 * step, &k2), (b3 * step, &k3)],
            );
            let t_new = if clipped { target } else { t + step };
            rhs(t_new, &y_new, &mut k4);
            stats.rhs_evaluations += 3;
            for i in 0..dim {
                err[i] = (k1[i] * e1 + k2[i] * e2 + k3[i] * e3 + k4[i] * e4) * step;
            }
            let en = error_norm(&err, &y, &y_new, tol).max(T::lit(1e-10));

            if en <= T::one() {
                stats.accepted_steps += 1;
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k4);
                let drift = (norm_sqr(&y) - norm0).abs();
                stats.max_norm_drift = stats.max_norm_drift.max(drift.as_f64());
                if drift > tol.norm_budget {
                    return Err(Error::NormDrift {
                        t: t.as_f64(),
                        drift: drift.as_f64(),
                        budget: tol.norm_budget.as_f64(),
                    });
                }
                let fac = T::lit(SAFETY) * en.powf(-T::lit(K_I)) * err_prev.powf(T::lit(K_P));
                let fac = fac.max(T::lit(FAC_MIN)).min(T::lit(FAC_MAX));
                let proposal = step * fac;
                // A step shortened to land on a sample says nothing about the
                // step the error allows, so keep the larger proposal.
                h = if clipped { proposal.max(h) } else { proposal };
                err_prev = en;
            } else {
                stats.rejected_steps += 1;
                let fac = (T::lit(SAFETY) * en.powf(-T::one() / T::lit(3.0))).max(T::lit(FAC_MIN));
                h = step * fac.min(T::one());
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    // ψ' = −iωψ has ψ(t) = e^{−iωt}.
    #[test]
    fn phase_rotation() {
        let omega = 3.0;
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.5).collect();
        let (ys, stats) = integrate(
            |_, y: &[Complex<f64>], dy: &mut [Complex<f64>]| {
                dy[0] = y[0] * Complex::new(0.0, -omega)
            },
            &[Complex::new(1.0, 0.0)],
            &times,
            &Tolerances::default(),
        )
        .unwrap();
        for (t, y) in times.iter().zip(&ys) {
            let want = Complex::new(0.0, -omega * t).exp();
            assert!((y[0] - want).norm() < 1e-6, "t = {t}");
        }
        assert!(stats.accepted_steps > 0);
        assert!(stats.max_norm_drift < 1e-6);
    }

    #[test]
    fn error_scales_with_tolerance() {
        let run = |tol: &Tolerances<f64>| {
            let (ys, _) = integrate(
                |t, y: &[Complex<f64>], dy: &mut [Complex<f64>]| {
                    dy[0] = y[0] * Complex::new(0.0, -(1.0 + t.cos()))
                },
                &[Complex::new(1.0, 0.0)],
                &[0.0, 10.0],
                tol,
            )
            .unwrap();
            let exact = Complex::new(0.0, -(10.0 + 10f64.sin())).exp();
            (ys[1][0] - exact).norm()
        };
        let base = Tolerances::default();
        let loose = run(&Tolerances {
            norm_budget: 1.0,
            ..base.tightened(1e-3)
        });
        let tight = run(&base);
        assert!(tight < loose, "{tight} {loose}");
        assert!(tight < 1e-6);
    }

    #[test]
    fn norm_budget_enforced() {
        // Exponential growth is not norm preserving.
        let tol = Tolerances::<f64> {
            norm_budget: 1e-6,
            ..Default::default()
        };
        let r = integrate(
            |_, y: &[Complex<f64>], dy: &mut [Complex<f64>]| dy[0] = y[0],
            &[Complex::new(1.0, 0.0)],
            &[0.0, 1.0],
            &tol,
        );
        assert!(matches!(r, Err(Error::NormDrift { .. })));
    }

    #[test]
    fn singular_rhs_underflows() {
        let r = integrate(
            |t, _: &[Complex<f64>], dy: &mut [Complex<f64>]| {
                dy[0] = Complex::new(1.0 / (1.0 - t), 0.0)
            },
            &[Complex::new(1.0, 0.0)],
            &[0.0, 2.0],
            &Tolerances {
                norm_budget: 1e300,
                ..Default::default()
            },
        );
        assert!(matches!(r, Err(Error::StepUnderflow { .. })), "{r:?}");
    }

    #[test]
    fn invalid_tolerances() {
        let tol = Tolerances::<f64> {
            rtol: 0.0,
            ..Default::default()
        };
        assert!(integrate(|_, _, _| {}, &[Complex::new(1.0, 0.0)], &[0.0, 1.0], &tol).is_err());
    }
}
