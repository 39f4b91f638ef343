//! Randomized property suite.
//!
//! Each property runs `trials` independent seeded instances and records the
//! worst slack (negative means violated) and the first violating instance.
//! Informational properties are reported but never fail the suite.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::hypothesis::verify_bounds;
use crate::interferometer::{
    build_paths, experiment_report, indistinguishability_closed_form, interference_power_closed_form,
    photon_number_measurement, FieldState, InterferometerScenario,
};
use crate::measures::{chain_report, indistinguishability, tradeoff_report, OutcomeDistribution};
use crate::par::{map_indexed, Execution};
use crate::phase::{phase_stats, uncertainty_relation_check};
use crate::random::{
    random_commuting_pair, random_envelope, random_field_state, random_measurement,
    random_orthogonal_pair, random_probabilities, random_rank_one_measurement, trial_rng,
};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Largest support for random distribution pairs.
pub const MAX_SUPPORT: usize = 10;
/// Largest Fock truncation for random field states.
pub const MAX_TRUNCATION: usize = 32;
/// Grid sizes checked for envelope independence.
pub const GRID_SIZES: [usize; 3] = [1, 4, 16];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_dim: usize,
    pub tolerance: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl VerifyConfig {
    pub fn new(seed: u64, trials: usize, max_dim: usize) -> Result<Self> {
        let cfg = Self {
            seed,
            trials,
            max_dim,
            tolerance: DEFAULT_TOLERANCE,
            execution: Execution::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.max_dim < 2 {
            return Err(Error::InvalidArgument("max dimension must be at least 2".into()));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidArgument("tolerance must be a non-negative number".into()));
        }
        Ok(())
    }
}

/// One instance: its slack and a description used when it is a violation.
struct Trial {
    slack: f64,
    detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub informational: bool,
    pub trials: usize,
    pub passed: usize,
    pub violations: usize,
    pub worst_slack: f64,
    /// First violating instance, by trial index.
    pub counterexample: Option<String>,
}

impl PropertyReport {
    pub fn ok(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: VerifyConfig,
    pub properties: Vec<PropertyReport>,
    pub all_passed: bool,
}

fn run_property<F>(
    name: &str,
    informational: bool,
    stream: u64,
    cfg: &VerifyConfig,
    trial: F,
) -> Result<PropertyReport>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Trial> + Sync + Send,
{
    let results = map_indexed(cfg.trials, cfg.execution, |i| {
        let mut rng = trial_rng(cfg.seed, stream, i as u64);
        trial(&mut rng)
    });
    let mut report = PropertyReport {
        name: name.to_string(),
        informational,
        trials: cfg.trials,
        passed: 0,
        violations: 0,
        worst_slack: f64::INFINITY,
        counterexample: None,
    };
    for (i, r) in results.into_iter().enumerate() {
        let t = r?;
        report.worst_slack = report.worst_slack.min(t.slack);
        if t.slack >= -cfg.tolerance {
            report.passed += 1;
        } else {
            report.violations += 1;
            if report.counterexample.is_none() {
                report.counterexample = Some(format!("trial {i}: {}", t.detail));
            }
        }
    }
    Ok(report)
}

fn fmt_state(v: &StateVector) -> String {
    fmt_amplitudes(v.amplitudes())
}

fn fmt_amplitudes(a: &[crate::hilbert::C64]) -> String {
    let parts: Vec<String> = a
        .iter()
        .map(|z| format!("[{:.17e},{:.17e}]", z.re, z.im))
        .collect();
    format!("[{}]", parts.join(","))
}

fn random_dim(rng: &mut impl Rng, max_dim: usize) -> usize {
    rng.random_range(2..=max_dim)
}

/// `U − I ≥ 0` for random block measurements.
pub fn check_tradeoff(cfg: &VerifyConfig) -> Result<PropertyReport> {
    run_property("tradeoff_u_ge_i", false, 1, cfg, |rng| {
        let dim = random_dim(rng, cfg.max_dim);
        let (psi1, psi2) = random_orthogonal_pair(rng, dim);
        let m = random_measurement(rng, dim)?;
        let r = tradeoff_report(&psi1, &psi2, &m)?;
        Ok(Trial {
            slack: r.slack,
            detail: format!("dim {dim}, U {}, I {}, psi1 {}", r.indistinguishability, r.interference_power, fmt_state(&psi1)),
        })
    })
}

/// `|U − I| ≤ tol` for rank-one measurements.
pub fn check_rank_one_equality(cfg: &VerifyConfig) -> Result<PropertyReport> {
    run_property("tradeoff_rank_one_equality", false, 2, cfg, |rng| {
        let dim = random_dim(rng, cfg.max_dim);
        let (psi1, psi2) = random_orthogonal_pair(rng, dim);
        let m = random_rank_one_measurement(rng, dim)?;
        let r = tradeoff_report(&psi1, &psi2, &m)?;
        Ok(Trial {
            slack: -r.slack.abs(),
            detail: format!("dim {dim}, U {}, I {}", r.indistinguishability, r.interference_power),
        })
    })
}

/// `U_{D'} ≥ U_{DD'} ≥ I_{DD'} ≥ I_D` for commuting block measurements.
pub fn check_chain(cfg: &VerifyConfig) -> Result<PropertyReport> {
    run_property("refinement_chain", false, 3, cfg, |rng| {
        let dim = random_dim(rng, cfg.max_dim);
        let (psi1, psi2) = random_orthogonal_pair(rng, dim);
        let (m_interf, m_detect) = random_commuting_pair(rng, dim)?;
        let r = chain_report(&psi1, &psi2, &m_interf, &m_detect)?;
        Ok(Trial {
            slack: r.worst_slack(),
            detail: format!("dim {dim}, slacks {:?}", r.slacks),
        })
    })
}

/// Both error bounds for every likelihood-ratio test, plus the exhaustive
/// region optimum.
pub fn check_np_bounds(cfg: &VerifyConfig) -> Result<PropertyReport> {
    run_property("np_error_bounds", false, 4, cfg, |rng| {
        let support = rng.random_range(2..=MAX_SUPPORT);
        let p = OutcomeDistribution::from_probabilities(&random_probabilities(rng, support))?;
        let q = OutcomeDistribution::from_probabilities(&random_probabilities(rng, support))?;
        let r = verify_bounds(&p, &q)?;
        let mut slack = r.min_sum_slack.min(r.min_product_slack);
        if let Some(ex) = &r.exhaustive {
            slack = slack.min(ex.min_sum_slack);
            if !ex.matches_threshold_optimum {
                slack = slack.min(-(ex.optimum_sum - r.best_sum.sum()).abs());
            }
        }
        Ok(Trial {
            slack,
            detail: format!("p {:?}, q {:?}", p.probabilities(), q.probabilities()),
        })
    })
}

/// Position-spin interference power equals `|Σ⟨ξ|n⟩⟨n+1|ξ⟩|` for every grid
/// size and envelope.
pub fn check_interferometer_reduction(cfg: &VerifyConfig) -> Result<PropertyReport> {
    run_property("interferometer_reduction", false, 5, cfg, |rng| {
        let field = random_field_state(rng, MAX_TRUNCATION);
        let closed = interference_power_closed_form(&field);
        let mut worst: f64 = 0.0;
        for m in GRID_SIZES {
            let s = InterferometerScenario::new(rng.random::<f64>() * 6.3, field.clone(), true)
                .with_envelope(random_envelope(rng, m))?
                .with_flipper_phase(rng.random::<f64>() * 10.0, rng.random::<f64>())?;
            let r = experiment_report(&s)?;
            worst = worst.max((r.interference_projective - closed).abs());
        }
        Ok(Trial {
            slack: -worst,
            detail: format!("field {}", fmt_amplitudes(field.amplitudes())),
        })
    })
}

fn field_tradeoff_trial(field: &FieldState) -> Result<Trial> {
    let s = InterferometerScenario::new(0.0, field.clone(), true);
    let (psi1, psi2) = build_paths(&s)?;
    let u_proj = indistinguishability(&psi1, &psi2, &photon_number_measurement(field.truncation(), 1)?)?;
    let u = indistinguishability_closed_form(field);
    let i = interference_power_closed_form(field);
    Ok(Trial {
        slack: (u - i).min(-(u_proj - u).abs()),
        detail: format!("U {u}, U projective {u_proj}, I {i}, field {}", fmt_amplitudes(field.amplitudes())),
    })
}

/// Photon-counting `U` from projectors equals the closed form, and `U ≥ I`.
pub fn check_field_tradeoff(cfg: &VerifyConfig) -> Result<PropertyReport> {
    run_property("field_u_ge_i", false, 6, cfg, |rng| {
        field_tradeoff_trial(&random_field_state(rng, MAX_TRUNCATION))
    })
}

/// Phase-number relation with the squared right-hand side.
pub fn check_relation_squared(cfg: &VerifyConfig) -> Result<PropertyReport> {
    run_property("phase_relation_squared_rhs", true, 7, cfg, |rng| {
        let field = random_field_state(rng, MAX_TRUNCATION);
        let r = uncertainty_relation_check(&field);
        Ok(Trial {
            slack: r.lhs - r.rhs_squared,
            detail: format!("lhs {}, rhs {}, field {}", r.lhs, r.rhs_squared, fmt_amplitudes(field.amplitudes())),
        })
    })
}

/// Phase-number relation with the linear right-hand side.
pub fn check_relation_linear(cfg: &VerifyConfig) -> Result<PropertyReport> {
    run_property("phase_relation_linear_rhs", true, 8, cfg, |rng| {
        let field = random_field_state(rng, MAX_TRUNCATION);
        let r = uncertainty_relation_check(&field);
        Ok(Trial {
            slack: r.lhs - r.rhs_linear,
            detail: format!("lhs {}, rhs {}, field {}", r.lhs, r.rhs_linear, fmt_amplitudes(field.amplitudes())),
        })
    })
}

/// `(Δφ)² ≥ 0`.
pub fn check_phase_spread_range(cfg: &VerifyConfig) -> Result<PropertyReport> {
    run_property("phase_spread_nonnegative", true, 9, cfg, |rng| {
        let field = random_field_state(rng, MAX_TRUNCATION);
        let s = phase_stats(&field);
        Ok(Trial {
            slack: s.delta_phi_sq.min(1.0 - s.delta_phi_sq),
            detail: format!("(dphi)^2 {}, field {}", s.delta_phi_sq, fmt_amplitudes(field.amplitudes())),
        })
    })
}

/// Runs every property. `all_passed` ignores informational properties.
pub fn run_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let properties = vec![
        check_tradeoff(cfg)?,
        check_rank_one_equality(cfg)?,
        check_chain(cfg)?,
        check_np_bounds(cfg)?,
        check_interferometer_reduction(cfg)?,
        check_field_tradeoff(cfg)?,
        check_relation_squared(cfg)?,
        check_relation_linear(cfg)?,
        check_phase_spread_range(cfg)?,
    ];
    let all_passed = properties.iter().all(|p| p.informational || p.ok());
    Ok(SuiteReport {
        config: *cfg,
        properties,
        all_passed,
    })
}
