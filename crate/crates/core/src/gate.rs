//! Field schedules for i-Toffoli and i-select gates, the closed-form
//! single-target subspace evolution, and gate reports.
//!
//! With the controls frozen, the target spin sees the two-level Hamiltonian
//! `Ē + ½(Δ − bx) σ^z − by σ^x` in the `{+, −}` basis, where `Δ` is the branch
//! splitting of the control pattern. Setting `bx = Δ` of one pattern puts only
//! that branch on resonance; `by·t = π/2` then flips it with amplitude `i`.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::dynamics::{
    target_probabilities, FieldSchedule, FieldScope, IntegratorStats, Trajectory,
};
use crate::error::{Error, Result};
use crate::exchange::{j_rms, ExchangeModel, ModeReference};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::spin::{ControlPattern, Spin};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Toffoli,
    Select,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Toffoli => "i-Toffoli",
            GateKind::Select => "i-select",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec<T> {
    pub kind: GateKind,
    /// Zero-based index of the target ion.
    pub target: usize,
    /// Control branch that should flip the target.
    pub selected: ControlPattern,
    /// Transverse amplitude (rad/s).
    pub by: T,
    pub mode_reference: ModeReference,
    pub detuning_ratio: T,
    /// Odd multiple `2n + 1` of the π/2 pulse area.
    pub pulse_multiple: u32,
    /// Target state the gate starts from.
    pub initial_target: Spin,
}

impl<T: Real> GateSpec<T> {
    pub fn new(
        kind: GateKind,
        target: usize,
        selected: ControlPattern,
        by: T,
        mode_reference: ModeReference,
        detuning_ratio: T,
    ) -> Result<Self> {
        let spec = Self {
            kind,
            target,
            selected,
            by,
            mode_reference,
            detuning_ratio,
            pulse_multiple: 1,
            initial_target: Spin::Plus,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_pulse_multiple(mut self, multiple: u32) -> Result<Self> {
        self.pulse_multiple = multiple;
        self.validate()?;
        Ok(self)
    }

    pub fn with_initial_target(mut self, spin: Spin) -> Self {
        self.initial_target = spin;
        self
    }

    pub fn n_ions(&self) -> usize {
        self.selected.len() + 1
    }

    /// `pulse_multiple · (π/2) / by`.
    pub fn duration(&self) -> T {
        T::from_count(self.pulse_multiple as usize) * T::FRAC_PI_2() / self.by
    }

    fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.by > T::zero()) {
            return bad("by", format!("must be positive, got {}", self.by));
        }
        if !(self.detuning_ratio > T::zero()) || self.detuning_ratio == T::one() {
            return bad(
                "detuning_ratio",
                format!(
                    "must be positive and different from 1, got {}",
                    self.detuning_ratio
                ),
            );
        }
        if self.pulse_multiple.is_multiple_of(2) {
            return bad(
                "pulse_multiple",
                format!("must be odd, got {}", self.pulse_multiple),
            );
        }
        if self.target > self.selected.len() {
            return Err(Error::IndexOutOfRange {
                index: self.target,
                len: self.n_ions(),
            });
        }
        Ok(())
    }
}

fn check_model<T: Real>(spec: &GateSpec<T>, model: &ExchangeModel<T>) -> Result<()> {
    if model.n_ions() != spec.n_ions() {
        return Err(Error::DimensionMismatch {
            expected: model.n_ions(),
            found: spec.n_ions(),
        });
    }
    spec.validate()
}

/// Schedule with `bx` equal to the selected branch's Δ and `by·t = pulse_multiple·π/2`,
/// acting on all ions.
///
/// Fails if another branch's Δ lies within `2·by` of the selected one.
pub fn design_gate<T: Real>(
    spec: &GateSpec<T>,
    model: &ExchangeModel<T>,
) -> Result<FieldSchedule<T>> {
    check_model(spec, model)?;
    let j0 = model.j0();
    let bx = model.delta_for_control(spec.target, &spec.selected)?;
    for pattern in ControlPattern::all(spec.selected.len()) {
        if pattern == spec.selected {
            continue;
        }
        let gap = (model.delta_for_control(spec.target, &pattern)? - bx).abs();
        if gap < T::lit(2.0) * spec.by {
            return Err(Error::AmbiguousBranch {
                selected: spec.selected.to_string(),
                clashing: pattern.to_string(),
                gap: gap.as_f64(),
            });
        }
    }
    debug_assert_eq!(j0.dim(), spec.n_ions());
    FieldSchedule::new(bx, spec.by, FieldScope::All, spec.duration())
}

/// Schedule with an explicitly chosen `bx`; no branch check.
pub fn design_gate_with_bx<T: Real>(
    spec: &GateSpec<T>,
    model: &ExchangeModel<T>,
    bx: T,
) -> Result<FieldSchedule<T>> {
    check_model(spec, model)?;
    FieldSchedule::new(bx, spec.by, FieldScope::All, spec.duration())
}

/// Closed-form evolution of the target spin inside one control subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceEvolution<T> {
    pub delta: T,
    pub bx: T,
    pub by: T,
    pub e_plus: T,
    pub e_minus: T,
    pub duration: T,
    /// `unitary[row][col]` in the `{+, −}` basis.
    pub unitary: [[Complex<T>; 2]; 2],
}

impl<T: Real> SubspaceEvolution<T> {
    /// `⟨−|U|+⟩`.
    pub fn flip_amplitude(&self) -> Complex<T> {
        self.unitary[1][0]
    }

    pub fn flip_probability(&self) -> T {
        self.flip_amplitude().norm_sqr()
    }

    /// Global phase factor `e^{−i(e₊+e₋)t/2}`.
    pub fn global_phase(&self) -> Complex<T> {
        let phi = -(self.e_plus + self.e_minus) * self.duration / T::lit(2.0);
        Complex::new(phi.cos(), phi.sin())
    }

    /// `U · (a₊, a₋)`.
    pub fn apply(&self, a_plus: Complex<T>, a_minus: Complex<T>) -> (Complex<T>, Complex<T>) {
        let u = &self.unitary;
        (
            u[0][0] * a_plus + u[0][1] * a_minus,
            u[1][0] * a_plus + u[1][1] * a_minus,
        )
    }

    /// `max |U†U − I|` entrywise.
    pub fn unitarity_defect(&self) -> T {
        let u = &self.unitary;
        let mut worst = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..2 {
                    acc += u[k][r].conj() * u[k][c];
                }
                if r == c {
                    acc -= Complex::new(T::one(), T::zero());
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

/// `sin(x)/x`, with its series near zero.
fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::epsilon().powf(T::lit(0.25)) {
        let x2 = x * x;
        T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0)
    } else {
        x.sin() / x
    }
}

/// `U(t) = e^{−iĒt} [cos Ωt · I − i t·sinc(Ωt) (½(Δ − bx) σ^z − by σ^x)]` with
/// `Ē = (e₊ + e₋)/2` and `Ω = √(¼(Δ − bx)² + by²)`.
pub fn analytic_subspace_evolution<T: Real>(
    delta: T,
    bx: T,
    by: T,
    e_plus: T,
    e_minus: T,
    t: T,
) -> Result<SubspaceEvolution<T>> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must be non-negative, got {t}"),
        });
    }
    let d = (delta - bx) / T::lit(2.0);
    let omega = (d * d + by * by).sqrt();
    let c = (omega * t).cos();
    let s = t * sinc(omega * t);
    let zero = T::zero();
    let mut evo = SubspaceEvolution {
        delta,
        bx,
        by,
        e_plus,
        e_minus,
        duration: t,
        unitary: [
            [Complex::new(c, -s * d), Complex::new(zero, s * by)],
            [Complex::new(zero, s * by), Complex::new(c, s * d)],
        ],
    };
    let g = evo.global_phase();
    for row in evo.unitary.iter_mut() {
        for v in row.iter_mut() {
            *v = *v * g;
        }
    }
    Ok(evo)
}

/// Largest flip probability reachable off resonance, `by² / (by² + ¼(Δ − bx)²)`.
pub fn max_offresonant_flip<T: Real>(delta: T, bx: T, by: T) -> T {
    let d = (delta - bx) / T::lit(2.0);
    let denom = by * by + d * d;
    if denom == T::zero() {
        T::zero()
    } else {
        by * by / denom
    }
}

/// Leading off-resonant error scale `by / |Δ − bx|`; infinite on resonance.
pub fn predicted_error_bound<T: Real>(delta: T, bx: T, by: T) -> T {
    if by == T::zero() {
        return T::zero();
    }
    let gap = (delta - bx).abs();
    if gap == T::zero() {
        T::infinity()
    } else {
        by / gap
    }
}

/// Configuration energies `(e₊, e₋)` of the target in `±` with the controls
/// fixed: `Σ_{i,j} J_ij σ_i σ_j − (bx/2) Σ σ_i`, the field sum restricted to
/// the ions in `scope`.
pub fn subspace_energies<T: Real>(
    j0: &Matrix<T>,
    target: usize,
    controls: &ControlPattern,
    bx: T,
    scope: FieldScope,
) -> Result<(T, T)> {
    let n = j0.dim();
    if controls.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: controls.len(),
        });
    }
    let energy = |spin: Spin| -> Result<T> {
        let s: Vec<T> = controls
            .with_target(target, spin)?
            .iter()
            .map(|s| T::lit(s.sign() as f64))
            .collect();
        let field = s
            .iter()
            .enumerate()
            .filter(|(i, _)| match scope {
                FieldScope::All => true,
                FieldScope::Ion(k) => *i == k,
            })
            .fold(T::zero(), |acc, (_, &v)| acc + v);
        Ok(j0.quadratic_form(&s) - bx / T::lit(2.0) * field)
    };
    Ok((energy(Spin::Plus)?, energy(Spin::Minus)?))
}

/// Closed-form evolution of one control branch under `field` with static `j0`.
pub fn branch_evolution<T: Real>(
    j0: &Matrix<T>,
    target: usize,
    controls: &ControlPattern,
    field: &FieldSchedule<T>,
    t: T,
) -> Result<SubspaceEvolution<T>> {
    let delta = crate::exchange::delta_for_control(j0, target, controls)?;
    let (e_plus, e_minus) = subspace_energies(j0, target, controls, field.bx, field.scope)?;
    analytic_subspace_evolution(delta, field.bx, field.by, e_plus, e_minus, t)
}

#[derive(Clone, Debug)]
pub struct GateRow<T> {
    pub pattern: ControlPattern,
    pub p_flip: T,
    pub p_no_flip: T,
    pub stats: IntegratorStats,
}

#[derive(Clone, Debug)]
pub struct GateReport<T> {
    pub kind: GateKind,
    pub target: usize,
    pub selected: ControlPattern,
    pub initial_target: Spin,
    pub bx: T,
    pub by: T,
    pub duration: T,
    pub scope: FieldScope,
    pub j0: Matrix<T>,
    /// `None` for a single ion.
    pub j_rms: Option<T>,
    /// One row per control pattern, in [`ControlPattern::all`] order.
    pub rows: Vec<GateRow<T>>,
    /// Free-form remarks appended to the rendered table.
    pub notes: Vec<String>,
}

impl<T: Real> GateReport<T> {
    pub fn row(&self, pattern: &ControlPattern) -> Option<&GateRow<T>> {
        self.rows.iter().find(|r| &r.pattern == pattern)
    }

    pub fn on_branch(&self) -> Option<&GateRow<T>> {
        self.row(&self.selected)
    }

    /// `1 − P_flip` of the selected branch.
    pub fn on_branch_infidelity(&self) -> T {
        self.on_branch().map_or(T::one(), |r| r.p_no_flip)
    }

    /// Largest `P_flip` among the other branches.
    pub fn worst_false_flip(&self) -> Option<&GateRow<T>> {
        self.rows
            .iter()
            .filter(|r| r.pattern != self.selected)
            .max_by(|a, b| {
                a.p_flip
                    .partial_cmp(&b.p_flip)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    }

    pub fn stats(&self) -> IntegratorStats {
        let mut s = IntegratorStats::default();
        for r in &self.rows {
            s.merge(&r.stats);
        }
        s
    }

    pub fn to_table(&self) -> String {
        let hz = |w: T| w.as_f64() / std::f64::consts::TAU;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} gate, target ion {}, selected controls {}",
            self.kind.name(),
            self.target + 1,
            self.selected.ket()
        );
        let scope = match self.scope {
            FieldScope::All => "all ions".to_string(),
            FieldScope::Ion(i) => format!("ion {} only", i + 1),
        };
        let _ = writeln!(
            out,
            "bx/2π = {:.3} Hz, by/2π = {:.3} Hz, duration = {:.6e} s, field on {}",
            hz(self.bx),
            hz(self.by),
            self.duration.as_f64(),
            scope
        );
        if let Some(j) = self.j_rms {
            let _ = writeln!(out, "J_rms/2π = {:.3} Hz", hz(j));
        }
        let _ = writeln!(out, "J0/2π (Hz):");
        for r in self.j0.to_rows() {
            let cells: Vec<String> = r.iter().map(|&v| format!("{:>10.3}", hz(v))).collect();
            let _ = writeln!(out, "  {}", cells.join(" "));
        }
        let width = self.selected.ket().chars().count().max(8);
        let _ = writeln!(
            out,
            "{:<width$}  {:>10}  {:>10}  {:>10}",
            "controls", "P_flip", "1-P_flip", "steps"
        );
        for r in &self.rows {
            let mark = if r.pattern == self.selected { " *" } else { "" };
            let _ = writeln!(
                out,
                "{:<width$}  {:>10.5}  {:>10.5}  {:>10}{}",
                r.pattern.ket(),
                r.p_flip.as_f64(),
                r.p_no_flip.as_f64(),
                r.stats.accepted_steps,
                mark
            );
        }
        let _ = writeln!(
            out,
            "on-branch infidelity = {:.3e}",
            self.on_branch_infidelity().as_f64()
        );
        if let Some(w) = self.worst_false_flip() {
            let _ = writeln!(
                out,
                "worst false flip = {:.3e} ({})",
                w.p_flip.as_f64(),
                w.pattern.ket()
            );
        }
        let _ = writeln!(out, "max norm drift = {:.3e}", self.stats().max_norm_drift);
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "controls,p_flip,p_no_flip,accepted_steps,rejected_steps,max_norm_drift\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{},{},{:e}",
                r.pattern.pm_code(),
                r.p_flip.as_f64(),
                r.p_no_flip.as_f64(),
                r.stats.accepted_steps,
                r.stats.rejected_steps,
                r.stats.max_norm_drift
            );
        }
        out
    }
}

/// Assembles the flip table from one final trajectory per control pattern.
pub fn gate_report<T: Real>(
    model: &ExchangeModel<T>,
    spec: &GateSpec<T>,
    field: &FieldSchedule<T>,
    results: &[(ControlPattern, Trajectory<T>)],
) -> Result<GateReport<T>> {
    check_model(spec, model)?;
    let patterns = ControlPattern::all(spec.selected.len());
    let missing: Vec<String> = patterns
        .iter()
        .filter(|p| !results.iter().any(|(q, _)| q == *p))
        .map(|p| p.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteReport { missing });
    }
    let rows = patterns
        .into_iter()
        .map(|pattern| {
            let traj = &results
                .iter()
                .find(|(q, _)| *q == pattern)
                .expect("checked above")
                .1;
            let (p_plus, p_minus) = target_probabilities(traj.final_state(), spec.target)?;
            let stay = match spec.initial_target {
                Spin::Plus => p_plus,
                Spin::Minus => p_minus,
            };
            Ok(GateRow {
                pattern,
                p_flip: T::one() - stay,
                p_no_flip: stay,
                stats: traj.stats.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GateReport {
        kind: spec.kind,
        target: spec.target,
        selected: spec.selected.clone(),
        initial_target: spec.initial_target,
        bx: field.bx,
        by: field.by,
        duration: field.duration,
        scope: field.scope,
        j0: model.j0().clone(),
        j_rms: j_rms(model.j0()).ok(),
        rows,
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, TAU};

    use super::*;
    use crate::crystal::{IonCrystal, TrapConfig};
    use crate::exchange::LaserParams;

    fn model(n: usize, reference: ModeReference, ratio: f64) -> ExchangeModel<f64> {
        let trap =
            TrapConfig::new(n, TAU * 4.63975e6, TrapConfig::<f64>::default_anisotropy(n)).unwrap();
        let crystal = IonCrystal::build(&trap).unwrap();
        let laser = LaserParams::detuned_from(&crystal, reference, ratio, TAU * 369.7e3, 0.06);
        ExchangeModel::new(&crystal, &laser).unwrap()
    }

    fn pattern(s: &str) -> ControlPattern {
        s.parse().unwrap()
    }

    #[test]
    fn resonant_quarter_pulse_flips_with_i() {
        let by = 3.0;
        let e = analytic_subspace_evolution(5.0, 5.0, by, 0.0, 0.0, FRAC_PI_2 / by).unwrap();
        assert!((e.flip_amplitude() - Complex::new(0.0, 1.0)).norm() < 1e-15);
        assert!(e.unitarity_defect() < 1e-15);
    }

    #[test]
    fn no_transverse_field_gives_phases() {
        let (ep, em, t) = (2.0, -7.0, 0.3);
        let e = analytic_subspace_evolution(9.0, 0.0, 0.0, ep, em, t).unwrap();
        assert!((e.unitary[0][0] - Complex::from_polar(1.0, -ep * t)).norm() < 1e-14);
        assert!((e.unitary[1][1] - Complex::from_polar(1.0, -em * t)).norm() < 1e-14);
        assert_eq!(e.flip_probability(), 0.0);
    }

    #[test]
    fn series_branch_is_continuous() {
        let by: f64 = 1e-3;
        for t in [1e-9, 1e-5, 1e-4, 1.0] {
            let e = analytic_subspace_evolution(0.0, 0.0, by, 0.0, 0.0, t).unwrap();
            assert!((e.flip_probability() - (by * t).sin().powi(2)).abs() < 1e-16);
        }
    }

    #[test]
    fn offresonant_peak() {
        let by = TAU * 75.98;
        let d = TAU * 1000.0;
        let p = max_offresonant_flip(d, 0.0, by);
        assert!((p - 0.0226).abs() < 5e-5, "{p}");
        // Reached when Ωt = π/2.
        let omega = (d * d / 4.0 + by * by).sqrt();
        let e = analytic_subspace_evolution(d, 0.0, by, 0.0, 0.0, FRAC_PI_2 / omega).unwrap();
        assert!((e.flip_probability() - p).abs() < 1e-14);
        assert_eq!(max_offresonant_flip(1.0, 1.0, 0.0), 0.0);
    }

    #[test]
    fn error_bound() {
        assert!((predicted_error_bound(10.0_f64, 0.0, 1.0) - 0.1).abs() < 1e-15);
        assert_eq!(predicted_error_bound(1.0, 1.0, 0.5), f64::INFINITY);
        assert_eq!(predicted_error_bound(1.0, 3.0, 0.0), 0.0);
        let j = TAU * 926.0;
        let r = predicted_error_bound(8.0 * j, -8.0 * j, TAU * 75.98);
        assert!((r - 0.0051).abs() < 5e-5, "{r}");
    }

    #[test]
    fn toffoli_field_on_cm_crystal() {
        let m = model(3, ModeReference::CenterOfMass, 1.0095);
        let spec = GateSpec::new(
            GateKind::Toffoli,
            0,
            pattern("--"),
            TAU * 75.98,
            ModeReference::CenterOfMass,
            1.0095,
        )
        .unwrap();
        let f = design_gate(&spec, &m).unwrap();
        let j = m.j_rms().unwrap();
        assert!((f.bx / (-8.0 * j) - 1.0).abs() < 1e-3);
        assert!((f.duration - 1.0 / (4.0 * 75.98)).abs() < 1e-15);
        assert_eq!(f.scope, FieldScope::All);

        let clash = GateSpec {
            selected: pattern("-+"),
            ..spec.clone()
        };
        match design_gate(&clash, &m) {
            Err(Error::AmbiguousBranch { clashing, .. }) => assert_eq!(clashing, "+-"),
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn select_branches_on_zigzag_crystal() {
        let m = model(3, ModeReference::Zigzag, 0.9905);
        let j13 = m.j0()[(0, 2)];
        let expected = [("--", 4.0), ("-+", 12.0), ("+-", -12.0), ("++", -4.0)];
        for (p, k) in expected {
            let spec = GateSpec::new(
                GateKind::Select,
                0,
                pattern(p),
                TAU * 75.98,
                ModeReference::Zigzag,
                0.9905,
            )
            .unwrap();
            let f = design_gate(&spec, &m).unwrap();
            assert!(
                (f.bx / (k * j13) - 1.0).abs() < 1e-2,
                "{p}: {} vs {}",
                f.bx,
                k * j13
            );
        }
    }

    #[test]
    fn spec_validation() {
        let mk = |by: f64, ratio: f64| {
            GateSpec::new(
                GateKind::Toffoli,
                0,
                pattern("-"),
                by,
                ModeReference::CenterOfMass,
                ratio,
            )
        };
        assert!(mk(0.0, 1.01).is_err());
        assert!(mk(1.0, 1.0).is_err());
        assert!(mk(1.0, 1.01).unwrap().with_pulse_multiple(2).is_err());
        let s = mk(2.0, 1.01).unwrap().with_pulse_multiple(21).unwrap();
        assert!((s.duration() * 2.0 - 21.0 * FRAC_PI_2).abs() < 1e-12);
        assert!(GateSpec::new(
            GateKind::Toffoli,
            3,
            pattern("-"),
            1.0,
            ModeReference::CenterOfMass,
            1.01
        )
        .is_err());
    }

    #[test]
    fn energies_split_by_delta_minus_bx() {
        let m = model(3, ModeReference::Zigzag, 0.9905);
        let c = pattern("-+");
        let delta = m.delta_for_control(1, &c).unwrap();
        for scope in [FieldScope::All, FieldScope::Ion(1)] {
            let (ep, em) = subspace_energies(m.j0(), 1, &c, 123.0, scope).unwrap();
            assert!(((ep - em) - (delta - 123.0)).abs() < 1e-9 * delta.abs());
        }
    }

    #[test]
    fn incomplete_report() {
        let m = model(2, ModeReference::CenterOfMass, 1.0095);
        let spec = GateSpec::new(
            GateKind::Toffoli,
            0,
            pattern("-"),
            1.0,
            ModeReference::CenterOfMass,
            1.0095,
        )
        .unwrap();
        let f = design_gate(&spec, &m).unwrap();
        match gate_report(&m, &spec, &f, &[]) {
            Err(Error::IncompleteReport { missing }) => assert_eq!(missing, vec!["-", "+"]),
            other => panic!("{other:?}"),
        }
    }
}
