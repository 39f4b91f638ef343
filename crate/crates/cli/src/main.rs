use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use whichpath::hypothesis::verify_bounds;
use whichpath::interferometer::{
    beam_measurement, build_paths, experiment_report, indistinguishability_closed_form,
    interference_power_closed_form, photon_number_measurement, position_spin_measurement,
    FieldState, InterferometerScenario,
};
use whichpath::json::{format_f64, to_canonical_string};
use whichpath::measures::{fringe_scan, outcome_distribution, phase_grid, tradeoff_report};
use whichpath::phase::{phase_stats, uncertainty_relation_check};
use whichpath::scenario::{parse_scenario, Scenario};
use whichpath::verify::{run_suite, VerifyConfig};
use whichpath::{Error, Execution, ProjectiveMeasurement};

const EXIT_INPUT: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "whichpath", version, about = "Indistinguishability, interference power and which-path bounds")]
struct Cli {
    /// Slack allowed before an inequality counts as violated.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// U, I and their slack for a `pair` or `interferometer` scenario.
    Tradeoff { scenario: PathBuf },
    /// Outcome probabilities of the balanced superposition as χ sweeps 0..chi-max.
    Fringe {
        scenario: PathBuf,
        /// Number of phase samples, endpoints included.
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(2..))]
        chi_steps: u64,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        chi_max: f64,
        /// Write the table here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Measurement for interferometer scenarios.
        #[arg(long, value_enum)]
        measurement: Option<MeasurementKind>,
    },
    /// Neyman-Pearson errors and their U bounds for two distributions.
    Np { scenario: PathBuf },
    /// Seeded randomized property suite.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..))]
        max_dim: u64,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Phase and photon-number statistics of a field state.
    Field { scenario: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeasurementKind {
    Beam,
    PositionSpin,
    PhotonNumber,
}

/// Why a command did not succeed, and the exit code that goes with it.
#[derive(Debug)]
enum Failure {
    Input(anyhow::Error),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CrossCheck { .. } => Failure::Invariant(e.to_string()),
            other => Failure::Input(other.into()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.into())
    }
}

/// Rendered report plus any invariant it violates. The report is written
/// either way.
struct Outcome {
    text: String,
    violation: Option<String>,
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(anyhow::anyhow!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| Failure::Input(anyhow::anyhow!("{}: {e}", path.display())))
}

fn wrong_kind(s: &Scenario, expected: &str) -> Failure {
    Failure::Input(anyhow::anyhow!(
        "scenario of kind '{}' given; expected {expected}",
        s.kind()
    ))
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(what)
}

fn cmd_tradeoff(path: &Path, tol: f64) -> Result<Outcome, Failure> {
    match load(path)? {
        Scenario::Pair(p) => {
            let r = tradeoff_report(&p.psi1, &p.psi2, &p.measurement)?;
            let mut violation = check(r.slack >= -tol, || format!("U - I = {:e} < 0", r.slack));
            if r.rank_one && violation.is_none() {
                violation = check(r.slack.abs() <= tol, || {
                    format!("rank-one measurement but U - I = {:e}", r.slack)
                });
            }
            Ok(Outcome {
                text: to_canonical_string(&r)?,
                violation,
            })
        }
        Scenario::Interferometer(s) => {
            let r = experiment_report(&s)?;
            let violation = check(r.slack >= -tol, || format!("U - I = {:e} < 0", r.slack))
                .or_else(|| {
                    check((r.interference_projective - r.interference_closed_form).abs() <= tol, || {
                        format!(
                            "projective I {} differs from closed form {}",
                            r.interference_projective, r.interference_closed_form
                        )
                    })
                })
                .or_else(|| {
                    check(
                        (r.indistinguishability_projective - r.indistinguishability_closed_form).abs() <= tol,
                        || {
                            format!(
                                "projective U {} differs from closed form {}",
                                r.indistinguishability_projective, r.indistinguishability_closed_form
                            )
                        },
                    )
                });
            Ok(Outcome {
                text: to_canonical_string(&r)?,
                violation,
            })
        }
        other => Err(wrong_kind(&other, "'pair' or 'interferometer'")),
    }
}

fn interferometer_measurement(
    s: &InterferometerScenario,
    kind: MeasurementKind,
) -> Result<ProjectiveMeasurement, Error> {
    match kind {
        MeasurementKind::Beam => beam_measurement(s),
        MeasurementKind::PositionSpin => position_spin_measurement(s),
        MeasurementKind::PhotonNumber => photon_number_measurement(s.field.truncation(), s.grid_points()),
    }
}

fn cmd_fringe(
    path: &Path,
    steps: usize,
    chi_max: f64,
    kind: Option<MeasurementKind>,
) -> Result<Outcome, Failure> {
    if !chi_max.is_finite() {
        return Err(Failure::Input(anyhow::anyhow!("--chi-max must be finite")));
    }
    let (psi1, psi2, m) = match load(path)? {
        Scenario::Pair(p) => {
            if kind.is_some() {
                return Err(Failure::Input(anyhow::anyhow!(
                    "--measurement applies to interferometer scenarios only"
                )));
            }
            (p.psi1, p.psi2, p.measurement)
        }
        Scenario::Interferometer(s) => {
            let (psi1, psi2) = build_paths(&s)?;
            let m = interferometer_measurement(&s, kind.unwrap_or(MeasurementKind::Beam))?;
            (psi1, psi2, m)
        }
        other => return Err(wrong_kind(&other, "'pair' or 'interferometer'")),
    };
    let scan = fringe_scan(&psi1, &psi2, &m, &phase_grid(0.0, chi_max, steps))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["chi", "label", "probability"])
        .map_err(|e| Failure::Input(e.into()))?;
    for row in &scan.rows {
        w.write_record([format_f64(row.chi), row.label.clone(), format_f64(row.probability)])
            .map_err(|e| Failure::Input(e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Input(anyhow::anyhow!("{e}")))?;
    Ok(Outcome {
        text: String::from_utf8(bytes).map_err(|e| Failure::Input(e.into()))?,
        violation: None,
    })
}

fn cmd_np(path: &Path, tol: f64) -> Result<Outcome, Failure> {
    let (p, q) = match load(path)? {
        Scenario::Distributions(d) => (d.p, d.q),
        Scenario::Pair(s) => (
            outcome_distribution(&s.psi1, &s.measurement)?,
            outcome_distribution(&s.psi2, &s.measurement)?,
        ),
        other => return Err(wrong_kind(&other, "'distributions' or 'pair'")),
    };
    let r = verify_bounds(&p, &q)?;
    let violation = check(r.holds(tol), || {
        format!(
            "error bounds violated: sum slack {:e}, product slack {:e}",
            r.min_sum_slack, r.min_product_slack
        )
    });
    Ok(Outcome {
        text: to_canonical_string(&r)?,
        violation,
    })
}

fn cmd_verify(seed: u64, trials: usize, max_dim: usize, sequential: bool, tol: f64) -> Result<Outcome, Failure> {
    let mut cfg = VerifyConfig::new(seed, trials, max_dim)?;
    cfg.tolerance = tol;
    cfg.execution = if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let r = run_suite(&cfg)?;
    let violation = check(r.all_passed, || {
        let failed: Vec<&str> = r
            .properties
            .iter()
            .filter(|p| !p.informational && !p.ok())
            .map(|p| p.name.as_str())
            .collect();
        format!("violated properties: {}", failed.join(", "))
    });
    Ok(Outcome {
        text: to_canonical_string(&r)?,
        violation,
    })
}

fn field_report(field: &FieldState, tol: f64) -> Result<Outcome, Failure> {
    let stats = phase_stats(field);
    let relation = uncertainty_relation_check(field);
    let u = indistinguishability_closed_form(field);
    let i = interference_power_closed_form(field);
    let value = json!({
        "truncation": field.truncation(),
        "stats": stats,
        "relation": relation,
        "indistinguishability": u,
        "interference_power": i,
        "slack": u - i,
        "number_spread_exceeds_half": stats.delta_n > 0.5,
    });
    Ok(Outcome {
        text: to_canonical_string(&value)?,
        violation: check(u - i >= -tol, || format!("U - I = {:e} < 0", u - i)),
    })
}

fn cmd_field(path: &Path, tol: f64) -> Result<Outcome, Failure> {
    match load(path)? {
        Scenario::Field(f) => field_report(&f, tol),
        Scenario::Interferometer(s) => field_report(&s.field, tol),
        other => Err(wrong_kind(&other, "'field' or 'interferometer'")),
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Input(anyhow::anyhow!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tol = cli.tolerance;
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Failure::Input(anyhow::anyhow!("--tolerance must be a non-negative number")));
    }
    let (outcome, target) = match cli.command {
        Command::Tradeoff { scenario } => (cmd_tradeoff(&scenario, tol)?, cli.out),
        Command::Fringe {
            scenario,
            chi_steps,
            chi_max,
            csv,
            measurement,
        } => (
            cmd_fringe(&scenario, chi_steps as usize, chi_max, measurement)?,
            csv.or(cli.out),
        ),
        Command::Np { scenario } => (cmd_np(&scenario, tol)?, cli.out),
        Command::Verify {
            seed,
            trials,
            max_dim,
            sequential,
        } => (
            cmd_verify(seed, trials as usize, max_dim as usize, sequential, tol)?,
            cli.out,
        ),
        Command::Field { scenario } => (cmd_field(&scenario, tol)?, cli.out),
    };
    emit(&outcome.text, target.as_deref())?;
    match outcome.violation {
        Some(v) => Err(Failure::Invariant(v)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(EXIT_INVARIANT)
        }
    }
}
