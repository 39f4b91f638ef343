//! Quantitative which-path analysis for pairs of quantum states.
//!
//! Given two path states and a projective measurement, the crate computes the
//! indistinguishability `U` (Bhattacharyya overlap of the outcome statistics)
//! and the interference power `I` (summed moduli of the outcome-resolved
//! overlaps), and checks `U ≥ I` together with its refinement chain. Further
//! modules cover Neyman-Pearson tests with `U`-based error bounds, a neutron
//! interferometer with a spin flipper coupled to a quantized field, and the
//! phase and number statistics of that field.

pub mod error;
pub mod hilbert;
pub mod hypothesis;
pub mod interferometer;
pub mod json;
pub mod measures;
pub mod par;
pub mod phase;
pub mod random;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};
pub use hilbert::{
    inner_product, refine, tensor, validate_measurement, Factor, Operator, ProjectiveMeasurement,
    Projector, StateVector, C64, NORM_TOL, OPERATOR_TOL,
};
pub use measures::{
    bhattacharyya, chain_report, fringe_scan, indistinguishability, interference_power,
    outcome_distribution, tradeoff_report, OutcomeDistribution,
};
pub use par::Execution;
