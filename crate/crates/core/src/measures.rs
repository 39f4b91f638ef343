//! Indistinguishability `U`, interference power `I`, fringe visibility and the
//! relations between them.
//!
//! For two states `ψ1`, `ψ2` and a projective measurement `{D_k}`:
//!
//! * `p_k = ⟨ψ1|D_k|ψ1⟩`, `q_k = ⟨ψ2|D_k|ψ2⟩`
//! * `U = Σ_k √(p_k q_k)` (Bhattacharyya overlap of the outcome statistics)
//! * `I = Σ_k |⟨ψ1|D_k|ψ2⟩|`
//!
//! Cauchy-Schwarz gives `U ≥ I`, with equality for rank-one measurements.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    inner_product, refine, ProjectiveMeasurement, StateVector, C64, NORM_TOL, OPERATOR_TOL,
};

/// Probabilities below this are treated as roundoff and clamped to zero.
pub const NEGATIVE_PROB_TOL: f64 = 1e-12;
/// Allowed deviation of `Σ p_k` from one.
pub const SUM_TOL: f64 = 1e-10;
/// Outcomes whose mean probability falls at or below this have no visibility.
pub const VISIBILITY_CUTOFF: f64 = 1e-14;
/// Orthogonality threshold for path states.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Labeled outcome probabilities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    labels: Vec<String>,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    /// Validates and clamps: entries above `-1e-12` are accepted (negatives
    /// become zero) and the total must be one within `1e-10`.
    pub fn new(weights: Vec<(String, f64)>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        let mut labels = Vec::with_capacity(weights.len());
        let mut probabilities = Vec::with_capacity(weights.len());
        for (label, p) in weights {
            if !(-NEGATIVE_PROB_TOL..=1.0 + SUM_TOL).contains(&p) {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} for outcome {label}"
                )));
            }
            labels.push(label);
            probabilities.push(p.max(0.0));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self {
            labels,
            probabilities,
        })
    }

    /// Outcomes labeled `0, 1, …`.
    pub fn from_probabilities(probabilities: &[f64]) -> Result<Self> {
        Self::new(
            probabilities
                .iter()
                .enumerate()
                .map(|(i, &p)| (i.to_string(), p))
                .collect(),
        )
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probabilities[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.probabilities.iter().copied())
    }
}

/// Coefficients of `c1 ψ1 + c2 e^{iχ} ψ2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperpositionSpec {
    pub c1: C64,
    pub c2: C64,
    pub chi: f64,
}

impl SuperpositionSpec {
    pub fn new(c1: C64, c2: C64, chi: f64) -> Result<Self> {
        let total = c1.norm_sqr() + c2.norm_sqr();
        if (total - 1.0).abs() > NORM_TOL || !chi.is_finite() {
            return Err(Error::BadCoefficients(total));
        }
        Ok(Self { c1, c2, chi })
    }

    /// `c1 = c2 = 1/√2`.
    pub fn balanced(chi: f64) -> Self {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { c1: s, c2: s, chi }
    }
}

/// Per-outcome ingredients shared by every quantity in this module.
#[derive(Clone, Debug)]
pub(crate) struct PairTerm {
    pub label: String,
    pub p: f64,
    pub q: f64,
    /// `⟨ψ1|D_k|ψ2⟩`
    pub overlap: C64,
}

fn check_inputs(psi1: &StateVector, psi2: &StateVector, m: &ProjectiveMeasurement) -> Result<()> {
    for psi in [psi1, psi2] {
        if psi.dim() != m.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                got: psi.dim(),
            });
        }
        psi.require_normalized()?;
    }
    Ok(())
}

fn expectation(psi: &StateVector, applied: &[C64], label: &str) -> Result<f64> {
    let value: C64 = crate::hilbert::dot(psi.amplitudes(), applied);
    if value.im.abs() > OPERATOR_TOL {
        return Err(Error::InvalidDistribution(format!(
            "outcome {label} has complex expectation {value}; projector not Hermitian"
        )));
    }
    Ok(value.re.max(0.0))
}

pub(crate) fn pair_terms(
    psi1: &StateVector,
    psi2: &StateVector,
    m: &ProjectiveMeasurement,
) -> Result<Vec<PairTerm>> {
    check_inputs(psi1, psi2, m)?;
    m.outcomes()
        .iter()
        .map(|o| {
            let d1 = o.projector.apply_slice(psi1.amplitudes());
            let d2 = o.projector.apply_slice(psi2.amplitudes());
            Ok(PairTerm {
                label: o.label.clone(),
                p: expectation(psi1, &d1, &o.label)?,
                q: expectation(psi2, &d2, &o.label)?,
                overlap: crate::hilbert::dot(psi1.amplitudes(), &d2),
            })
        })
        .collect()
}

/// `p_k = ⟨ψ|D_k|ψ⟩`.
pub fn outcome_distribution(psi: &StateVector, m: &ProjectiveMeasurement) -> Result<OutcomeDistribution> {
    if psi.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: psi.dim(),
        });
    }
    psi.require_normalized()?;
    let weights = m
        .outcomes()
        .iter()
        .map(|o| {
            let applied = o.projector.apply_slice(psi.amplitudes());
            Ok((o.label.clone(), expectation(psi, &applied, &o.label)?))
        })
        .collect::<Result<Vec<_>>>()?;
    OutcomeDistribution::new(weights)
}

/// Bhattacharyya coefficient `Σ √(p_k q_k)`.
pub fn bhattacharyya(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    if p.labels != q.labels {
        return Err(Error::LabelMismatch);
    }
    Ok(p.probabilities
        .iter()
        .zip(&q.probabilities)
        .map(|(a, b)| (a * b).sqrt())
        .sum())
}

/// Degree of indistinguishability of two states for a measurement.
pub fn indistinguishability(
    psi1: &StateVector,
    psi2: &StateVector,
    m: &ProjectiveMeasurement,
) -> Result<f64> {
    check_inputs(psi1, psi2, m)?;
    bhattacharyya(&outcome_distribution(psi1, m)?, &outcome_distribution(psi2, m)?)
}

/// `|⟨ψ1|ψ2⟩|`; logs a warning above [`ORTHOGONALITY_TOL`].
pub fn path_overlap(psi1: &StateVector, psi2: &StateVector) -> Result<f64> {
    let overlap = inner_product(psi1, psi2)?.norm();
    if overlap > ORTHOGONALITY_TOL {
        log::warn!("path states are not orthogonal: |<psi1|psi2>| = {overlap:e}");
    }
    Ok(overlap)
}

fn require_orthogonal(psi1: &StateVector, psi2: &StateVector) -> Result<()> {
    let overlap = inner_product(psi1, psi2)?.norm();
    if overlap > ORTHOGONALITY_TOL {
        Err(Error::NonOrthogonal(overlap))
    } else {
        Ok(())
    }
}

/// Interference power `Σ_k |⟨ψ1|D_k|ψ2⟩|`.
///
/// Non-orthogonal inputs are evaluated anyway, with a logged warning.
pub fn interference_power(
    psi1: &StateVector,
    psi2: &StateVector,
    m: &ProjectiveMeasurement,
) -> Result<f64> {
    let terms = pair_terms(psi1, psi2, m)?;
    path_overlap(psi1, psi2)?;
    Ok(terms.iter().map(|t| t.overlap.norm()).sum())
}

fn superposed_probability(spec: &SuperpositionSpec, t: &PairTerm) -> f64 {
    let phase = Complex64::from_polar(1.0, spec.chi);
    spec.c1.norm_sqr() * t.p
        + spec.c2.norm_sqr() * t.q
        + 2.0 * (spec.c1.conj() * spec.c2 * phase * t.overlap).re
}

/// Outcome distribution of `c1 ψ1 + c2 e^{iχ} ψ2`, from the decomposition
/// `P_k = |c1|² p_k + |c2|² q_k + i_k`.
///
/// Every probability is cross-checked against the explicitly formed
/// superposition; a disagreement above `1e-10` is an error.
pub fn superposition_probability(
    spec: &SuperpositionSpec,
    psi1: &StateVector,
    psi2: &StateVector,
    m: &ProjectiveMeasurement,
) -> Result<OutcomeDistribution> {
    SuperpositionSpec::new(spec.c1, spec.c2, spec.chi)?;
    let terms = pair_terms(psi1, psi2, m)?;
    require_orthogonal(psi1, psi2)?;

    let psi = psi1.combine(spec.c1, psi2, spec.c2 * Complex64::from_polar(1.0, spec.chi))?;
    let direct = outcome_distribution(&psi, m)?;

    let mut weights = Vec::with_capacity(terms.len());
    for (t, direct_p) in terms.iter().zip(direct.probabilities()) {
        let p = superposed_probability(spec, t);
        if (p - direct_p).abs() > SUM_TOL {
            return Err(Error::CrossCheck {
                label: t.label.clone(),
                lhs: p,
                rhs: *direct_p,
            });
        }
        weights.push((t.label.clone(), p));
    }
    OutcomeDistribution::new(weights)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FringeRow {
    pub chi: f64,
    pub label: String,
    pub probability: f64,
}

/// Outcome probabilities of the balanced superposition over a phase grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FringeScan {
    pub labels: Vec<String>,
    pub chi: Vec<f64>,
    /// Ordered by χ, then by outcome.
    pub rows: Vec<FringeRow>,
}

impl FringeScan {
    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let k = self.labels.iter().position(|l| l == label)?;
        Some(
            self.rows
                .iter()
                .skip(k)
                .step_by(self.labels.len())
                .map(|r| r.probability)
                .collect(),
        )
    }

    /// Fits `a + b cos χ + c sin χ` to one column by least squares and
    /// returns `(a, √(b² + c²))`, the mean level and the oscillation
    /// amplitude. `None` if the grid cannot determine the fit.
    pub fn fitted_fringe(&self, label: &str) -> Option<(f64, f64)> {
        let ys = self.column(label)?;
        let mut ata = [[0.0f64; 3]; 3];
        let mut aty = [0.0f64; 3];
        for (&chi, &y) in self.chi.iter().zip(&ys) {
            let row = [1.0, chi.cos(), chi.sin()];
            for i in 0..3 {
                for j in 0..3 {
                    ata[i][j] += row[i] * row[j];
                }
                aty[i] += row[i] * y;
            }
        }
        let [a, b, c] = solve3(ata, aty)?;
        Some((a, b.hypot(c)))
    }
}

fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                let pivot_row = m[col];
                for (x, p) in m[r].iter_mut().zip(pivot_row).skip(col) {
                    *x -= f * p;
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    Some([rhs[0] / m[0][0], rhs[1] / m[1][1], rhs[2] / m[2][2]])
}

/// Sweeps χ with `c1 = c2 = 1/√2`:
/// `P_k(χ) = ½(p_k+q_k) + |⟨ψ1|D_k|ψ2⟩| cos(χ + arg⟨ψ1|D_k|ψ2⟩)`.
pub fn fringe_scan(
    psi1: &StateVector,
    psi2: &StateVector,
    m: &ProjectiveMeasurement,
    chi_grid: &[f64],
) -> Result<FringeScan> {
    if chi_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if chi_grid.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("phase grid has non-finite entries".into()));
    }
    let terms = pair_terms(psi1, psi2, m)?;
    require_orthogonal(psi1, psi2)?;
    let mut rows = Vec::with_capacity(chi_grid.len() * terms.len());
    for &chi in chi_grid {
        let spec = SuperpositionSpec::balanced(chi);
        rows.extend(terms.iter().map(|t| FringeRow {
            chi,
            label: t.label.clone(),
            probability: superposed_probability(&spec, t),
        }));
    }
    Ok(FringeScan {
        labels: terms.into_iter().map(|t| t.label).collect(),
        chi: chi_grid.to_vec(),
        rows,
    })
}

/// `n` evenly spaced phases from `start` to `end` inclusive.
pub fn phase_grid(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|j| start + (end - start) * j as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Michelson visibility `V_k = 2|⟨ψ1|D_k|ψ2⟩| / (p_k + q_k)`; `None` where
/// `p_k + q_k ≤ 1e-14`.
pub fn visibility(
    psi1: &StateVector,
    psi2: &StateVector,
    m: &ProjectiveMeasurement,
) -> Result<Vec<(String, Option<f64>)>> {
    Ok(pair_terms(psi1, psi2, m)?
        .into_iter()
        .map(|t| {
            let v = visibility_of(&t);
            (t.label, v)
        })
        .collect())
}

fn visibility_of(t: &PairTerm) -> Option<f64> {
    let total = t.p + t.q;
    (total > VISIBILITY_CUTOFF).then(|| 2.0 * t.overlap.norm() / total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeTerms {
    pub label: String,
    pub p: f64,
    pub q: f64,
    /// `I_k = |⟨ψ1|D_k|ψ2⟩|`
    pub interference: f64,
    pub visibility: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TradeoffReport {
    pub indistinguishability: f64,
    pub interference_power: f64,
    /// `U − I`
    pub slack: f64,
    pub rank_one: bool,
    pub per_outcome: Vec<OutcomeTerms>,
}

impl TradeoffReport {
    /// `U ≥ I`, and `U = I` for rank-one measurements, at tolerance `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol && (!self.rank_one || self.slack.abs() <= tol)
    }
}

pub fn tradeoff_report(
    psi1: &StateVector,
    psi2: &StateVector,
    m: &ProjectiveMeasurement,
) -> Result<TradeoffReport> {
    let terms = pair_terms(psi1, psi2, m)?;
    require_orthogonal(psi1, psi2)?;
    let u: f64 = terms.iter().map(|t| (t.p * t.q).sqrt()).sum();
    let i: f64 = terms.iter().map(|t| t.overlap.norm()).sum();
    Ok(TradeoffReport {
        indistinguishability: u,
        interference_power: i,
        slack: u - i,
        rank_one: m.is_rank_one(),
        per_outcome: terms
            .iter()
            .map(|t| OutcomeTerms {
                label: t.label.clone(),
                p: t.p,
                q: t.q,
                interference: t.overlap.norm(),
                visibility: visibility_of(t),
            })
            .collect(),
    })
}

/// The chain `U_{D'} ≥ U_{DD'} ≥ I_{DD'} ≥ I_D` for compatible measurements.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub u_detect: f64,
    pub u_refined: f64,
    pub i_refined: f64,
    pub i_interf: f64,
    pub refined_outcomes: usize,
    /// `[U_{D'} − U_{DD'}, U_{DD'} − I_{DD'}, I_{DD'} − I_D]`
    pub slacks: [f64; 3],
}

impl ChainReport {
    pub fn worst_slack(&self) -> f64 {
        self.slacks.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.worst_slack() >= -tol
    }
}

pub fn chain_report(
    psi1: &StateVector,
    psi2: &StateVector,
    m_interf: &ProjectiveMeasurement,
    m_detect: &ProjectiveMeasurement,
) -> Result<ChainReport> {
    let refined = refine(m_interf, m_detect)?;
    let u_detect = indistinguishability(psi1, psi2, m_detect)?;
    let fine = tradeoff_report(psi1, psi2, &refined)?;
    let i_interf = interference_power(psi1, psi2, m_interf)?;
    let (u_refined, i_refined) = (fine.indistinguishability, fine.interference_power);
    Ok(ChainReport {
        u_detect,
        u_refined,
        i_refined,
        i_interf,
        refined_outcomes: refined.len(),
        slacks: [u_detect - u_refined, u_refined - i_refined, i_refined - i_interf],
    })
}
