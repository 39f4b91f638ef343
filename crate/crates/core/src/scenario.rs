//! Scenario files: strict JSON descriptions of state pairs, interferometer
//! settings, field states and distribution pairs.
//!
//! Complex numbers are written as `[re, im]`. Unknown keys are rejected, and
//! every vector and measurement is validated on load.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::hilbert::{Operator, ProjectiveMeasurement, Projector, StateVector, C64};
use crate::interferometer::{FieldState, InterferometerScenario};
use crate::measures::OutcomeDistribution;

/// Extra levels kept above `n` when a Fock state gives no truncation.
pub const FOCK_DEFAULT_HEADROOM: usize = 2;

type Complex = [f64; 2];

fn to_c64(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

fn to_vec(v: &[Complex]) -> Vec<C64> {
    v.iter().map(to_c64).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Raw {
    Pair(RawPair),
    Interferometer(RawInterferometer),
    Field(RawFieldScenario),
    Distributions(RawDistributions),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    psi1: Vec<Complex>,
    psi2: Vec<Complex>,
    measurement: RawMeasurement,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasurement {
    basis: Option<String>,
    projectors: Option<Vec<Vec<Vec<Complex>>>>,
    labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterferometer {
    chi: f64,
    flipper_on: bool,
    field: RawField,
    grid: Option<usize>,
    envelope: Option<Vec<Complex>>,
    #[serde(default)]
    omega: f64,
    #[serde(default)]
    time: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFieldScenario {
    field: RawField,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawAlpha {
    Real(f64),
    Complex(Complex),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    fock: Option<usize>,
    coherent: Option<RawAlpha>,
    two_peak: Option<[usize; 2]>,
    amplitudes: Option<Vec<Complex>>,
    truncation: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistributions {
    p: Vec<f64>,
    q: Vec<f64>,
    labels: Option<Vec<String>>,
}

/// Two path states and a measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct PairScenario {
    pub psi1: StateVector,
    pub psi2: StateVector,
    pub measurement: ProjectiveMeasurement,
}

/// Two distributions over a common label set.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionPair {
    pub p: OutcomeDistribution,
    pub q: OutcomeDistribution,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    Pair(PairScenario),
    Interferometer(InterferometerScenario),
    Field(FieldState),
    Distributions(DistributionPair),
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Pair(_) => "pair",
            Scenario::Interferometer(_) => "interferometer",
            Scenario::Field(_) => "field",
            Scenario::Distributions(_) => "distributions",
        }
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: Raw = serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("scenario: {e}")))?;
    match raw {
        Raw::Pair(p) => pair(p).map(Scenario::Pair),
        Raw::Interferometer(i) => interferometer(i).map(Scenario::Interferometer),
        Raw::Field(f) => field(&f.field).map(Scenario::Field),
        Raw::Distributions(d) => distributions(d).map(Scenario::Distributions),
    }
}

fn state(v: &[Complex]) -> Result<StateVector> {
    let s = StateVector::new(to_vec(v))?;
    s.require_normalized()?;
    Ok(s)
}

fn pair(raw: RawPair) -> Result<PairScenario> {
    let psi1 = state(&raw.psi1)?;
    let psi2 = state(&raw.psi2)?;
    if psi1.dim() != psi2.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi1.dim(),
            got: psi2.dim(),
        });
    }
    let measurement = measurement(raw.measurement, psi1.dim())?;
    if measurement.dim() != psi1.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi1.dim(),
            got: measurement.dim(),
        });
    }
    Ok(PairScenario {
        psi1,
        psi2,
        measurement,
    })
}

fn measurement(raw: RawMeasurement, dim: usize) -> Result<ProjectiveMeasurement> {
    match (raw.basis, raw.projectors) {
        (Some(b), None) => {
            if raw.labels.is_some() {
                return Err(Error::InvalidArgument(
                    "labels are only allowed with explicit projectors".into(),
                ));
            }
            match b.as_str() {
                "standard" => Ok(ProjectiveMeasurement::standard_basis(dim)),
                other => Err(Error::InvalidArgument(format!("unknown basis '{other}'"))),
            }
        }
        (None, Some(mats)) => {
            let labels = match raw.labels {
                Some(l) if l.len() != mats.len() => return Err(Error::LabelMismatch),
                Some(l) => l,
                None => (0..mats.len()).map(|k| k.to_string()).collect(),
            };
            let outcomes = mats
                .iter()
                .zip(labels)
                .map(|(rows, label)| {
                    let rows: Vec<Vec<C64>> = rows.iter().map(|r| to_vec(r)).collect();
                    Ok((label, Projector::dense(Operator::from_rows(rows)?)))
                })
                .collect::<Result<Vec<_>>>()?;
            ProjectiveMeasurement::new(dim, outcomes)
        }
        _ => Err(Error::InvalidArgument(
            "measurement needs exactly one of 'basis' or 'projectors'".into(),
        )),
    }
}

fn field(raw: &RawField) -> Result<FieldState> {
    let given = [
        raw.fock.is_some(),
        raw.coherent.is_some(),
        raw.two_peak.is_some(),
        raw.amplitudes.is_some(),
    ];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Error::InvalidArgument(
            "field needs exactly one of 'fock', 'coherent', 'two_peak', 'amplitudes'".into(),
        ));
    }
    let need_truncation = || {
        raw.truncation
            .ok_or_else(|| Error::InvalidArgument("field needs 'truncation'".into()))
    };
    if let Some(n) = raw.fock {
        let truncation = raw.truncation.unwrap_or(n + FOCK_DEFAULT_HEADROOM);
        return FieldState::fock(n, truncation);
    }
    if let Some(alpha) = &raw.coherent {
        let alpha = match alpha {
            RawAlpha::Real(r) => C64::new(*r, 0.0),
            RawAlpha::Complex(z) => to_c64(z),
        };
        return FieldState::coherent(alpha, need_truncation()?);
    }
    if let Some([n0, n1]) = raw.two_peak {
        return FieldState::two_peak(n0, n1, need_truncation()?);
    }
    let amps = raw.amplitudes.as_deref().unwrap_or_default();
    if raw.truncation.is_some_and(|n| n != amps.len()) {
        return Err(Error::DimensionMismatch {
            expected: raw.truncation.unwrap_or_default(),
            got: amps.len(),
        });
    }
    FieldState::new(to_vec(amps))
}

fn interferometer(raw: RawInterferometer) -> Result<InterferometerScenario> {
    let field = field(&raw.field)?;
    let envelope = match (raw.grid, raw.envelope) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidArgument(
                "give either 'grid' or 'envelope', not both".into(),
            ))
        }
        (Some(0), None) => return Err(Error::EmptyGrid),
        (Some(m), None) => vec![C64::new(1.0 / (m as f64).sqrt(), 0.0); m],
        (None, Some(e)) => to_vec(&e),
        (None, None) => vec![C64::new(1.0, 0.0)],
    };
    if !raw.chi.is_finite() {
        return Err(Error::NonFinite);
    }
    InterferometerScenario::new(raw.chi, field, raw.flipper_on)
        .with_envelope(envelope)?
        .with_flipper_phase(raw.omega, raw.time)
}

fn distributions(raw: RawDistributions) -> Result<DistributionPair> {
    if raw.p.len() != raw.q.len() {
        return Err(Error::DimensionMismatch {
            expected: raw.p.len(),
            got: raw.q.len(),
        });
    }
    let labels = match raw.labels {
        Some(l) if l.len() != raw.p.len() => return Err(Error::LabelMismatch),
        Some(l) => l,
        None => (0..raw.p.len()).map(|k| k.to_string()).collect(),
    };
    let weights = |v: &[f64]| labels.iter().cloned().zip(v.iter().copied()).collect();
    Ok(DistributionPair {
        p: OutcomeDistribution::new(weights(&raw.p))?,
        q: OutcomeDistribution::new(weights(&raw.q))?,
    })
}
