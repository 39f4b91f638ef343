//! Two-path neutron interferometer with a spin flipper in path 2.
//!
//! The joint state lives on `beam(2) ⊗ spin(2) ⊗ field(N) ⊗ grid(M)`, row-major:
//! beam A → 0, B → 1; spin `|+⟩` → 0, `|−⟩` → 1; Fock level `n` → `n`; grid
//! point `x` → `x`. The spatial integral over each emerging beam is sampled at
//! `M` points that share one normalized packet envelope.
//!
//! Without interaction the paths are `ψ1 = φ⁰1 ξ` and `ψ2 = φ⁰2 ξ`. With the
//! flipper on, path 2 leaves with its spin reversed and one extra photon in
//! the field: `ψ2 = (e^{iωt} |−⟩⟨+|φ⁰2⟩) ⊗ (Σ_n e^{−iωt} |n+1⟩⟨n|ξ⟩)`. The two
//! phase factors cancel.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    inner_product, Factor, Operator, Projector, ProjectiveMeasurement, StateVector, C64, NORM_TOL,
};
use crate::measures::{
    indistinguishability, interference_power, outcome_distribution, superposition_probability,
    visibility, SuperpositionSpec,
};

/// Amplitude at the top Fock level that the flipper shift may discard.
pub const SHIFT_TOL: f64 = 1e-12;
/// Allowed probability mass beyond the truncation for generated field states.
pub const TAIL_TOL: f64 = 1e-12;

const BEAMS: [&str; 2] = ["A", "B"];
const SPINS: [&str; 2] = ["+", "-"];

/// Field state in a truncated Fock basis, amplitudes `⟨n|ξ⟩` for `n < N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    amplitudes: Vec<C64>,
}

impl FieldState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let v = StateVector::new(amplitudes)?;
        v.require_normalized()?;
        Ok(Self {
            amplitudes: v.amplitudes().to_vec(),
        })
    }

    pub fn fock(n: usize, truncation: usize) -> Result<Self> {
        Ok(Self {
            amplitudes: StateVector::basis(truncation, n)?.amplitudes().to_vec(),
        })
    }

    /// Coherent state `e^{−|α|²/2} Σ αⁿ/√n! |n⟩`. Fails if more than `1e-12`
    /// of the probability lies at or beyond `truncation`; never renormalizes.
    pub fn coherent(alpha: C64, truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::InvalidArgument("truncation must be positive".into()));
        }
        let mut amplitudes = Vec::with_capacity(truncation);
        let mut a = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..truncation {
            if n > 0 {
                a = a * alpha / (n as f64).sqrt();
            }
            amplitudes.push(a);
        }
        let mass: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let tail = 1.0 - mass;
        if tail > TAIL_TOL {
            return Err(Error::TruncationTooSmall(tail));
        }
        Self::new(amplitudes)
    }

    /// Equal-weight superposition `(|n0⟩ + |n1⟩)/√2` with real amplitudes.
    pub fn two_peak(n0: usize, n1: usize, truncation: usize) -> Result<Self> {
        if n0 == n1 {
            return Err(Error::InvalidArgument("two-peak state needs distinct levels".into()));
        }
        if n0.max(n1) >= truncation {
            return Err(Error::InvalidArgument(format!(
                "levels {n0}, {n1} do not fit truncation {truncation}"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); truncation];
        amplitudes[n0] = C64::new(FRAC_1_SQRT_2, 0.0);
        amplitudes[n1] = C64::new(FRAC_1_SQRT_2, 0.0);
        Self::new(amplitudes)
    }

    pub fn truncation(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Photon-number distribution `|⟨n|ξ⟩|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn to_state(&self) -> StateVector {
        StateVector::new(self.amplitudes.clone()).expect("field state is non-empty")
    }

    /// `Σ_n phase · |n+1⟩⟨n|ξ⟩`: one photon added, every amplitude moved up a
    /// level. Fails if the top level carries more than `1e-12`.
    pub fn shifted(&self, phase: C64) -> Result<Self> {
        let top = self.amplitudes.last().map_or(0.0, |z| z.norm());
        if top > SHIFT_TOL {
            return Err(Error::FockOverflow(top));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); self.truncation()];
        for n in 0..self.truncation() - 1 {
            amplitudes[n + 1] = phase * self.amplitudes[n];
        }
        Ok(Self { amplitudes })
    }
}

/// Interferometer settings.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferometerScenario {
    pub chi: f64,
    pub field: FieldState,
    pub flipper_on: bool,
    /// Field angular frequency (rad/s).
    pub omega: f64,
    /// Observation time (s).
    pub time: f64,
    envelope: Vec<C64>,
}

impl InterferometerScenario {
    /// Single grid point (`M = 1`), `ω = t = 0`.
    pub fn new(chi: f64, field: FieldState, flipper_on: bool) -> Self {
        Self {
            chi,
            field,
            flipper_on,
            omega: 0.0,
            time: 0.0,
            envelope: vec![C64::new(1.0, 0.0)],
        }
    }

    pub fn with_envelope(mut self, envelope: Vec<C64>) -> Result<Self> {
        let v = StateVector::new(envelope)?;
        v.require_normalized()?;
        self.envelope = v.amplitudes().to_vec();
        Ok(self)
    }

    pub fn with_flipper_phase(mut self, omega: f64, time: f64) -> Result<Self> {
        if !omega.is_finite() || !time.is_finite() {
            return Err(Error::NonFinite);
        }
        self.omega = omega;
        self.time = time;
        Ok(self)
    }

    pub fn envelope(&self) -> &[C64] {
        &self.envelope
    }

    pub fn grid_points(&self) -> usize {
        self.envelope.len()
    }

    pub fn dim(&self) -> usize {
        4 * self.field.truncation() * self.grid_points()
    }

    fn validate(&self) -> Result<()> {
        if !self.chi.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm: f64 = self.envelope.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized((norm - 1.0).abs()));
        }
        Ok(())
    }
}

/// Neutron amplitudes on `beam ⊗ spin ⊗ grid` for both paths.
fn neutron_paths(s: &InterferometerScenario, flip_phase: C64) -> (Vec<C64>, Vec<C64>) {
    let m = s.grid_points();
    let zero = C64::new(0.0, 0.0);
    let mut phi1 = vec![zero; 4 * m];
    let mut phi2 = vec![zero; 4 * m];
    let spin2 = if s.flipper_on { 1 } else { 0 };
    let phase2 = if s.flipper_on { flip_phase } else { C64::new(1.0, 0.0) };
    for beam in 0..2 {
        // φ⁰_{1A} = φ⁰_{2A}, φ⁰_{1B} = −φ⁰_{2B}
        let sign2 = if beam == 0 { 1.0 } else { -1.0 };
        for (x, env) in s.envelope.iter().enumerate() {
            let a = env * FRAC_1_SQRT_2;
            phi1[(beam * 2) * m + x] = a;
            phi2[(beam * 2 + spin2) * m + x] = a * sign2 * phase2;
        }
    }
    (phi1, phi2)
}

/// Joint amplitudes on `beam ⊗ spin ⊗ field ⊗ grid` from a neutron part on
/// `beam ⊗ spin ⊗ grid` and a field part.
fn assemble(neutron: &[C64], field: &[C64], m: usize) -> Vec<C64> {
    let n_field = field.len();
    let mut out = Vec::with_capacity(neutron.len() * n_field);
    for bs in 0..4 {
        for f in field {
            out.extend(neutron[bs * m..(bs + 1) * m].iter().map(|a| a * f));
        }
    }
    out
}

fn paths_with_phase(s: &InterferometerScenario, omega_t: f64) -> Result<(StateVector, StateVector)> {
    let m = s.grid_points();
    let (phi1, phi2) = neutron_paths(s, Complex64::from_polar(1.0, omega_t));
    let xi2 = if s.flipper_on {
        s.field.shifted(Complex64::from_polar(1.0, -omega_t))?
    } else {
        s.field.clone()
    };
    Ok((
        StateVector::new(assemble(&phi1, s.field.amplitudes(), m))?,
        StateVector::new(assemble(&phi2, xi2.amplitudes(), m))?,
    ))
}

/// `(ψ1, ψ2)` for the scenario. Checks that both are normalized, that they
/// are orthogonal, and that `ψ2` does not depend on `ω·t`, all within `1e-12`.
pub fn build_paths(s: &InterferometerScenario) -> Result<(StateVector, StateVector)> {
    s.validate()?;
    let (psi1, psi2) = paths_with_phase(s, s.omega * s.time)?;
    psi1.require_normalized()?;
    psi2.require_normalized()?;
    let overlap = inner_product(&psi1, &psi2)?.norm();
    if overlap > NORM_TOL {
        return Err(Error::NonOrthogonal(overlap));
    }
    if s.flipper_on {
        let (_, reference) = paths_with_phase(s, 0.0)?;
        let drift = psi2.distance(&reference)?;
        if drift > NORM_TOL {
            return Err(Error::CrossCheck {
                label: "flipper phase cancellation".into(),
                lhs: drift,
                rhs: 0.0,
            });
        }
    }
    Ok((psi1, psi2))
}

/// Superposed output state `(ψ1 + e^{iχ}ψ2)/√2`.
pub fn output_state(s: &InterferometerScenario) -> Result<StateVector> {
    let (psi1, psi2) = build_paths(s)?;
    let c = C64::new(FRAC_1_SQRT_2, 0.0);
    psi1.combine(c, &psi2, c * Complex64::from_polar(1.0, s.chi))
}

fn diag_projector(dim: usize, i: usize) -> Operator {
    Operator::from_fn(dim, |r, c| {
        if r == i && c == i {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `D_{s=±½} = (|+⟩ ± |−⟩)(⟨+| ± ⟨−|)/2`.
pub fn spin_y_projector(positive: bool) -> Operator {
    let sign = if positive { 1.0 } else { -1.0 };
    Operator::from_fn(2, |r, c| {
        C64::new(if r == c { 0.5 } else { 0.5 * sign }, 0.0)
    })
}

fn position_spin_outcomes(m: usize, field: Option<usize>) -> Result<Vec<(String, Projector)>> {
    let mut outcomes = Vec::with_capacity(4 * m);
    for (b, beam) in BEAMS.iter().enumerate() {
        for x in 0..m {
            for (s, spin) in SPINS.iter().enumerate() {
                let mut factors = vec![
                    Factor::Matrix(diag_projector(2, b)),
                    Factor::Matrix(spin_y_projector(s == 0)),
                ];
                if let Some(n) = field {
                    factors.push(Factor::Identity(n));
                }
                factors.push(Factor::Matrix(diag_projector(m, x)));
                outcomes.push((format!("{beam}:{x}:{spin}"), Projector::product(factors)?));
            }
        }
    }
    Ok(outcomes)
}

/// Position (beam and grid point) together with the spin-y sign; identity on
/// the field. Outcome labels are `beam:x:sign`.
pub fn position_spin_measurement(s: &InterferometerScenario) -> Result<ProjectiveMeasurement> {
    let outcomes = position_spin_outcomes(s.grid_points(), Some(s.field.truncation()))?;
    ProjectiveMeasurement::new_unchecked(s.dim(), outcomes)
}

/// Which emerging beam, nothing else resolved. Labels `A`, `B`.
pub fn beam_measurement(s: &InterferometerScenario) -> Result<ProjectiveMeasurement> {
    let outcomes = BEAMS
        .iter()
        .enumerate()
        .map(|(b, beam)| {
            let p = Projector::product(vec![
                Factor::Matrix(diag_projector(2, b)),
                Factor::Identity(2 * s.field.truncation() * s.grid_points()),
            ])?;
            Ok((beam.to_string(), p))
        })
        .collect::<Result<Vec<_>>>()?;
    ProjectiveMeasurement::new_unchecked(s.dim(), outcomes)
}

/// Photon counting `D_n = |n⟩⟨n|` on the field, identity elsewhere.
pub fn photon_number_measurement(truncation: usize, grid_points: usize) -> Result<ProjectiveMeasurement> {
    if truncation == 0 || grid_points == 0 {
        return Err(Error::InvalidArgument("truncation and grid must be positive".into()));
    }
    let outcomes = (0..truncation)
        .map(|n| {
            let p = Projector::product(vec![
                Factor::Identity(4),
                Factor::Matrix(diag_projector(truncation, n)),
                Factor::Identity(grid_points),
            ])?;
            Ok((n.to_string(), p))
        })
        .collect::<Result<Vec<_>>>()?;
    ProjectiveMeasurement::new_unchecked(4 * truncation * grid_points, outcomes)
}

/// `|Σ_n ⟨ξ|n⟩⟨n+1|ξ⟩|`: interference power over position and spin when the
/// flipper is on.
pub fn interference_power_closed_form(field: &FieldState) -> f64 {
    consecutive_overlap(field).norm()
}

pub(crate) fn consecutive_overlap(field: &FieldState) -> C64 {
    field
        .amplitudes
        .windows(2)
        .map(|w| w[0].conj() * w[1])
        .sum()
}

/// `Σ_n |⟨n|ξ⟩|·|⟨n+1|ξ⟩|`: indistinguishability of the two paths for photon
/// counting, i.e. `Σ_n √(p_n q_n)` with `q_n` the shifted distribution.
pub fn indistinguishability_closed_form(field: &FieldState) -> f64 {
    field
        .amplitudes
        .windows(2)
        .map(|w| w[0].norm() * w[1].norm())
        .sum()
}

/// Interference and distinguishability of the two paths, computed both from
/// projectors and in closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub flipper_on: bool,
    pub truncation: usize,
    pub grid_points: usize,
    /// `|⟨ξ|ξ2⟩|`
    pub field_overlap: f64,
    /// `Σ_{x,s} |⟨φ⁰1|D_x D_s|φ2⟩|`
    pub neutron_interference: f64,
    /// Interference power over the position-spin outcomes.
    pub interference_projective: f64,
    pub interference_closed_form: f64,
    /// Indistinguishability for photon counting.
    pub indistinguishability_projective: f64,
    pub indistinguishability_closed_form: f64,
    /// `U_{D_n} − I_{D_xs}`
    pub slack: f64,
}

pub fn experiment_report(s: &InterferometerScenario) -> Result<ExperimentReport> {
    let (psi1, psi2) = build_paths(s)?;
    let m = s.grid_points();

    let (phi1, phi2) = neutron_paths(s, Complex64::from_polar(1.0, s.omega * s.time));
    let xi2 = if s.flipper_on {
        s.field.shifted(Complex64::from_polar(1.0, -s.omega * s.time))?
    } else {
        s.field.clone()
    };
    let field_overlap = inner_product(&s.field.to_state(), &xi2.to_state())?.norm();
    let neutron_interference: f64 = position_spin_outcomes(m, None)?
        .iter()
        .map(|(_, p)| crate::hilbert::dot(&phi1, &p.apply_slice(&phi2)).norm())
        .sum();

    let interference_projective = interference_power(&psi1, &psi2, &position_spin_measurement(s)?)?;
    let photon = photon_number_measurement(s.field.truncation(), m)?;
    let indistinguishability_projective = indistinguishability(&psi1, &psi2, &photon)?;
    let (interference_closed_form, indistinguishability_closed_form) = if s.flipper_on {
        (
            interference_power_closed_form(&s.field),
            indistinguishability_closed_form(&s.field),
        )
    } else {
        (1.0, 1.0)
    };
    Ok(ExperimentReport {
        flipper_on: s.flipper_on,
        truncation: s.field.truncation(),
        grid_points: m,
        field_overlap,
        neutron_interference,
        interference_projective,
        interference_closed_form,
        indistinguishability_projective,
        indistinguishability_closed_form,
        slack: indistinguishability_projective - interference_projective,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdealFringeReport {
    pub beam_a_at_zero: f64,
    pub beam_b_at_pi: f64,
    pub beam_a_at_half_pi: f64,
    pub beam_b_at_half_pi: f64,
    pub visibility_a: f64,
    pub visibility_b: f64,
}

impl IdealFringeReport {
    pub fn holds(&self, tol: f64) -> bool {
        [
            self.beam_a_at_zero,
            self.beam_b_at_pi,
            self.visibility_a,
            self.visibility_b,
        ]
        .iter()
        .all(|v| (v - 1.0).abs() <= tol)
    }
}

/// Beam intensities of the ideal, flipper-free interferometer at χ = 0, π/2, π
/// and the visibility of each beam's fringe.
pub fn ideal_fringe_check(s: &InterferometerScenario) -> Result<IdealFringeReport> {
    if s.flipper_on {
        return Err(Error::InvalidArgument(
            "ideal fringe check requires the flipper to be off".into(),
        ));
    }
    let (psi1, psi2) = build_paths(s)?;
    let beams = beam_measurement(s)?;
    let at = |chi: f64| superposition_probability(&SuperpositionSpec::balanced(chi), &psi1, &psi2, &beams);
    let zero = at(0.0)?;
    let pi = at(PI)?;
    let half = at(0.5 * PI)?;
    let v = visibility(&psi1, &psi2, &beams)?;
    let vis = |k: usize| v[k].1.unwrap_or(0.0);
    Ok(IdealFringeReport {
        beam_a_at_zero: zero.probabilities()[0],
        beam_b_at_pi: pi.probabilities()[1],
        beam_a_at_half_pi: half.probabilities()[0],
        beam_b_at_half_pi: half.probabilities()[1],
        visibility_a: vis(0),
        visibility_b: vis(1),
    })
}

/// Outcome distribution of the scenario's output state for `m`.
pub fn output_distribution(
    s: &InterferometerScenario,
    m: &ProjectiveMeasurement,
) -> Result<crate::measures::OutcomeDistribution> {
    outcome_distribution(&output_state(s)?, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::validate_measurement;

    fn coherent_field() -> FieldState {
        FieldState::coherent(C64::new(1.2, 0.4), 30).unwrap()
    }

    #[test]
    fn paths_orthogonal_without_flipper() {
        let s = InterferometerScenario::new(0.0, coherent_field(), false);
        let (psi1, psi2) = build_paths(&s).unwrap();
        assert!(inner_product(&psi1, &psi2).unwrap().norm() < 1e-12);
        assert_eq!(psi1.dim(), 120);
    }

    #[test]
    fn flipper_reverses_spin() {
        let s = InterferometerScenario::new(0.0, coherent_field(), true);
        let (psi1, psi2) = build_paths(&s).unwrap();
        let n = 30;
        // ψ1 lives on spin +, ψ2 on spin −
        for (i, (a, b)) in psi1.amplitudes().iter().zip(psi2.amplitudes()).enumerate() {
            let spin = (i / n) % 2;
            if spin == 0 {
                assert_eq!(*b, C64::new(0.0, 0.0));
            } else {
                assert_eq!(*a, C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn fock_state_shifts_up_one_level() {
        let xi = FieldState::fock(3, 6).unwrap();
        let shifted = xi.shifted(Complex64::from_polar(1.0, -0.7)).unwrap();
        assert!((shifted.amplitudes()[4].norm() - 1.0).abs() < 1e-15);
        assert_eq!(shifted.probabilities()[3], 0.0);
    }

    #[test]
    fn shift_overflow_is_loud() {
        let xi = FieldState::fock(5, 6).unwrap();
        assert!(matches!(xi.shifted(C64::new(1.0, 0.0)), Err(Error::FockOverflow(_))));
        let s = InterferometerScenario::new(0.0, xi, true);
        assert!(matches!(build_paths(&s), Err(Error::FockOverflow(_))));
    }

    #[test]
    fn coherent_truncation_checked() {
        assert!(matches!(
            FieldState::coherent(C64::new(3.0, 0.0), 10),
            Err(Error::TruncationTooSmall(_))
        ));
        let xi = FieldState::coherent(C64::new(2.0, 0.0), 40).unwrap();
        assert!(xi.to_state().is_normalized());
    }

    #[test]
    fn flipper_phase_cancels() {
        let field = coherent_field();
        let a = InterferometerScenario::new(0.0, field.clone(), true);
        let b = InterferometerScenario::new(0.0, field, true)
            .with_flipper_phase(2.0e6, 3.3e-4)
            .unwrap();
        let (_, psi2a) = build_paths(&a).unwrap();
        let (_, psi2b) = build_paths(&b).unwrap();
        assert!(psi2a.distance(&psi2b).unwrap() < 1e-12);
    }

    #[test]
    fn position_spin_measurement_is_valid() {
        let field = FieldState::fock(1, 3).unwrap();
        let s = InterferometerScenario::new(0.0, field.clone(), true);
        let m = position_spin_measurement(&s).unwrap();
        assert_eq!(m.len(), 4);
        assert!(validate_measurement(&m).is_valid());

        let env = vec![C64::new(0.5, 0.0); 4];
        let s4 = InterferometerScenario::new(0.0, field, true).with_envelope(env).unwrap();
        let m4 = position_spin_measurement(&s4).unwrap();
        assert_eq!(m4.len(), 16);
        assert!(validate_measurement(&m4).is_valid());
    }

    #[test]
    fn spin_y_projectors_orthogonal() {
        let prod = &spin_y_projector(true) * &spin_y_projector(false);
        assert!(prod.max_abs() < 1e-15);
    }

    #[test]
    fn photon_number_measurement_is_valid() {
        let m = photon_number_measurement(5, 2).unwrap();
        assert_eq!(m.len(), 5);
        assert_eq!(m.dim(), 40);
        assert!(validate_measurement(&m).is_valid());
        assert!(validate_measurement(&beam_measurement(
            &InterferometerScenario::new(0.0, FieldState::fock(0, 5).unwrap(), false)
        ).unwrap())
        .is_valid());
    }

    #[test]
    fn closed_forms_vanish_for_fock_and_separated_peaks() {
        let fock = FieldState::fock(4, 8).unwrap();
        assert_eq!(interference_power_closed_form(&fock), 0.0);
        assert_eq!(indistinguishability_closed_form(&fock), 0.0);
        let peaks = FieldState::two_peak(2, 5, 8).unwrap();
        assert_eq!(interference_power_closed_form(&peaks), 0.0);
        assert_eq!(indistinguishability_closed_form(&peaks), 0.0);
    }

    #[test]
    fn coherent_closed_forms_match_series() {
        let alpha: f64 = 2.0;
        let xi = FieldState::coherent(C64::new(alpha, 0.0), 40).unwrap();
        // e^{-α²} Σ α^{2n+1} / (n! √(n+1)), accumulated independently
        let mut series = 0.0;
        let mut term_fact = 1.0;
        for n in 0..39i32 {
            if n > 0 {
                term_fact *= n as f64;
            }
            series += alpha.powi(2 * n + 1) / (term_fact * ((n + 1) as f64).sqrt());
        }
        series *= (-alpha * alpha).exp();
        assert!((interference_power_closed_form(&xi) - series).abs() < 1e-13);
        assert!((indistinguishability_closed_form(&xi) - series).abs() < 1e-13);
    }

    #[test]
    fn experiment_report_matches_closed_forms() {
        let env: Vec<C64> = [0.1, 0.7, -0.3, 0.2]
            .iter()
            .map(|&x| C64::new(x, 0.5 * x))
            .collect();
        let norm = env.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let env = env.into_iter().map(|z| z / norm).collect();
        let s = InterferometerScenario::new(0.3, coherent_field(), true)
            .with_envelope(env)
            .unwrap();
        let r = experiment_report(&s).unwrap();
        assert!((r.interference_projective - r.interference_closed_form).abs() < 1e-10);
        assert!((r.indistinguishability_projective - r.indistinguishability_closed_form).abs() < 1e-10);
        assert!((r.field_overlap * r.neutron_interference - r.interference_projective).abs() < 1e-10);
        assert!(r.slack >= -1e-10);
    }

    #[test]
    fn flipper_off_interference_is_maximal() {
        let s = InterferometerScenario::new(0.0, coherent_field(), false);
        let r = experiment_report(&s).unwrap();
        assert!((r.interference_projective - 1.0).abs() < 1e-12);
        assert!((r.indistinguishability_projective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ideal_fringes() {
        let s = InterferometerScenario::new(0.0, FieldState::fock(0, 2).unwrap(), false);
        let r = ideal_fringe_check(&s).unwrap();
        assert!(r.holds(1e-10));
        assert!((r.beam_a_at_half_pi - 0.5).abs() < 1e-12);
        assert!((r.beam_b_at_half_pi - 0.5).abs() < 1e-12);
        let on = InterferometerScenario::new(0.0, FieldState::fock(0, 2).unwrap(), true);
        assert!(ideal_fringe_check(&on).is_err());
    }
}
