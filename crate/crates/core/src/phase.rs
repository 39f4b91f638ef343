//! Exponential phase operator `E = Σ_n |n⟩⟨n+1|` on a truncated Fock space,
//! phase spread, photon-number spread, and the two-peak field state that
//! has a large number spread yet leaves both paths perfectly distinguishable.
//!
//! `E` is a lowering shift and only a partial isometry: `E†E = I − |0⟩⟨0|`
//! (and, truncated, `EE† = I − |N−1⟩⟨N−1|`), so it is not unitary.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{Operator, C64};
use crate::interferometer::{
    consecutive_overlap, indistinguishability_closed_form, interference_power_closed_form,
    FieldState,
};

/// Tolerance for the phase-number relation candidates.
pub const RELATION_TOL: f64 = 1e-10;

/// `N × N` matrix of `Σ_{n<N−1} |n⟩⟨n+1|`.
pub fn phase_operator(truncation: usize) -> Result<Operator> {
    if truncation < 2 {
        return Err(Error::InvalidArgument(format!(
            "phase operator needs N >= 2, got {truncation}"
        )));
    }
    Ok(Operator::from_fn(truncation, |r, c| {
        if c == r + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseStats {
    /// `⟨ξ|E|ξ⟩`
    pub exp_phase: C64,
    /// `(Δφ)² = 1 − |⟨ξ|E|ξ⟩| − |⟨0|ξ⟩|²`
    pub delta_phi_sq: f64,
    /// `|⟨0|ξ⟩|²`
    pub vacuum_prob: f64,
    pub mean_n: f64,
    /// `√(⟨n²⟩ − ⟨n⟩²)`
    pub delta_n: f64,
}

/// Phase and number statistics of a field state on its truncated space.
///
/// `(Δφ)²` is reported as computed; it is not clamped and can be negative
/// for states concentrated on the two lowest levels.
pub fn phase_stats(field: &FieldState) -> PhaseStats {
    let exp_phase = consecutive_overlap(field);
    let probs = field.probabilities();
    let vacuum_prob = probs[0];
    let mean_n: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let var_n: f64 = probs
        .iter()
        .enumerate()
        .map(|(n, p)| (n as f64 - mean_n).powi(2) * p)
        .sum();
    PhaseStats {
        exp_phase,
        delta_phi_sq: 1.0 - exp_phase.norm() - vacuum_prob,
        vacuum_prob,
        mean_n,
        delta_n: var_n.max(0.0).sqrt(),
    }
}

/// The phase-number relation
/// `(Δn)²((Δφ)² − ½P₀) ≥ RHS` evaluated for two readings of its right-hand
/// side, with `P₀ = |⟨0|ξ⟩|²`:
///
/// * `squared`: `¼(1 − (Δφ)² − P₀)²`
/// * `linear`:  `¼(1 − (Δφ)² − P₀)`
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelationReport {
    pub lhs: f64,
    pub rhs_squared: f64,
    pub rhs_linear: f64,
    pub squared_holds: bool,
    pub linear_holds: bool,
}

pub fn uncertainty_relation_check(field: &FieldState) -> RelationReport {
    let s = phase_stats(field);
    let lhs = s.delta_n * s.delta_n * (s.delta_phi_sq - 0.5 * s.vacuum_prob);
    let inner = 1.0 - s.delta_phi_sq - s.vacuum_prob;
    let rhs_squared = 0.25 * inner * inner;
    let rhs_linear = 0.25 * inner;
    RelationReport {
        lhs,
        rhs_squared,
        rhs_linear,
        squared_holds: lhs >= rhs_squared - RELATION_TOL,
        linear_holds: lhs >= rhs_linear - RELATION_TOL,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub n0: usize,
    pub n1: usize,
    pub truncation: usize,
    pub delta_n: f64,
    /// `Δn > ½`
    pub number_spread_large: bool,
    pub delta_phi_sq: f64,
    pub indistinguishability: f64,
    pub interference_power: f64,
}

impl CounterexampleReport {
    /// Large number spread with zero `U` and zero `I` (to `1e-14`).
    pub fn reproduces(&self) -> bool {
        self.number_spread_large
            && self.indistinguishability.abs() <= 1e-14
            && self.interference_power.abs() <= 1e-14
    }
}

/// Field with `|⟨n|ξ⟩|² = ½(δ_{n,n0} + δ_{n,n1})`: its number spread is
/// `|n0 − n1|/2`, yet photon counting identifies the path with certainty and
/// no interference survives.
pub fn counterexample_analysis(n0: usize, n1: usize, truncation: usize) -> Result<CounterexampleReport> {
    if n0.abs_diff(n1) < 2 {
        return Err(Error::InvalidArgument(format!(
            "peaks at {n0} and {n1} are adjacent; they must differ by at least 2"
        )));
    }
    if n0.max(n1) + 1 >= truncation {
        return Err(Error::InvalidArgument(format!(
            "peaks must lie below N - 1 = {}",
            truncation.saturating_sub(1)
        )));
    }
    let field = FieldState::two_peak(n0, n1, truncation)?;
    let stats = phase_stats(&field);
    Ok(CounterexampleReport {
        n0,
        n1,
        truncation,
        delta_n: stats.delta_n,
        number_spread_large: stats.delta_n > 0.5,
        delta_phi_sq: stats.delta_phi_sq,
        indistinguishability: indistinguishability_closed_form(&field),
        interference_power: interference_power_closed_form(&field),
    })
}
