use num_complex::Complex64 as C64;
use proptest::prelude::*;

use whichpath::hilbert::Operator;
use whichpath::interferometer::{
    experiment_report, indistinguishability_closed_form, interference_power_closed_form, FieldState,
    InterferometerScenario,
};
use whichpath::phase::{counterexample_analysis, phase_operator, phase_stats};
use whichpath::random::{random_envelope, random_field_state, trial_rng};

/// Poisson weights `e^{-|α|²}|α|^{2n}/n!` built by recurrence.
fn poisson(alpha: f64, n_max: usize) -> Vec<f64> {
    let mut w = vec![(-alpha * alpha).exp()];
    for n in 1..n_max {
        let prev = w[n - 1];
        w.push(prev * alpha * alpha / n as f64);
    }
    w
}

fn projector_onto(n: usize, k: usize) -> Operator {
    Operator::from_fn(n, |r, c| C64::new(if r == k && c == k { 1.0 } else { 0.0 }, 0.0))
}

#[test]
fn coherent_number_spread_is_alpha() {
    for alpha in [0.5, 1.0, 2.0, 3.5, 6.0] {
        let field = FieldState::coherent(C64::new(alpha, 0.0), 120).unwrap();
        let s = phase_stats(&field);
        assert!((s.delta_n - alpha).abs() < 1e-8, "alpha {alpha}: {}", s.delta_n);
        assert!((s.mean_n - alpha * alpha).abs() < 1e-8);
    }
}

#[test]
fn coherent_phase_spread_shrinks_with_amplitude() {
    let spreads: Vec<f64> = [2.0, 2.5, 3.0, 4.0, 5.0, 6.0]
        .iter()
        .map(|&a| phase_stats(&FieldState::coherent(C64::new(a, 0.0), 120).unwrap()).delta_phi_sq)
        .collect();
    for w in spreads.windows(2) {
        assert!(w[1] < w[0], "{spreads:?}");
    }
    assert!(spreads.iter().all(|&s| s > 0.0 && s < 0.1));
}

#[test]
fn coherent_closed_forms_against_series() {
    for alpha in [0.7, 2.0, 4.0] {
        let field = FieldState::coherent(C64::new(alpha, 0.0), 100).unwrap();
        let w = poisson(alpha, 100);
        // both reduce to Σ √(w_n w_{n+1}) for real α
        let oracle: f64 = w.windows(2).map(|p| (p[0] * p[1]).sqrt()).sum();
        assert!((interference_power_closed_form(&field) - oracle).abs() < 1e-12);
        assert!((indistinguishability_closed_form(&field) - oracle).abs() < 1e-12);
    }
}

#[test]
fn phase_operator_is_a_partial_isometry() {
    for n in [2, 8, 64] {
        let e = phase_operator(n).unwrap();
        let id = Operator::identity(n);
        let ede = &e.adjoint() * &e;
        let eed = &e * &e.adjoint();
        let lower = &id - &projector_onto(n, 0);
        let upper = &id - &projector_onto(n, n - 1);
        assert!((&ede - &lower).max_abs() <= 1e-12);
        assert!((&eed - &upper).max_abs() <= 1e-12);
        assert_eq!((&ede - &id).max_abs(), 1.0);
    }
}

#[test]
fn two_peak_state_keeps_paths_distinguishable() {
    let r = counterexample_analysis(5, 15, 20).unwrap();
    assert!((r.delta_n - 5.0).abs() < 1e-12);
    assert!(r.number_spread_large);
    assert!(r.indistinguishability.abs() <= 1e-14);
    assert!(r.interference_power.abs() <= 1e-14);
    assert!(r.reproduces());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduction_is_independent_of_envelope(seed in any::<u64>(), grid in prop::sample::select(vec![1usize, 4, 16])) {
        let mut rng = trial_rng(seed, 0, 0);
        let field = random_field_state(&mut rng, 24);
        let s = InterferometerScenario::new(1.0, field.clone(), true)
            .with_envelope(random_envelope(&mut rng, grid)).unwrap()
            .with_flipper_phase(3.0, 0.7).unwrap();
        let r = experiment_report(&s).unwrap();
        // I = |⟨ξ|ξ2⟩| · Σ|⟨φ1|D_x D_s|φ2⟩|, and the neutron part is one
        prop_assert!((r.neutron_interference - 1.0).abs() < 1e-10);
        prop_assert!((r.interference_projective - r.field_overlap).abs() < 1e-10);
        prop_assert!((r.interference_projective - interference_power_closed_form(&field)).abs() < 1e-10);
        prop_assert!((r.indistinguishability_projective - indistinguishability_closed_form(&field)).abs() < 1e-10);
        prop_assert!(r.slack >= -1e-10);
    }

    #[test]
    fn field_spread_identities(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 1, 0);
        let field = random_field_state(&mut rng, 32);
        let s = phase_stats(&field);
        let probs = field.probabilities();
        let mean: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        let second: f64 = probs.iter().enumerate().map(|(n, p)| (n * n) as f64 * p).sum();
        prop_assert!((s.delta_n * s.delta_n - (second - mean * mean)).abs() < 1e-9);
        prop_assert!(s.exp_phase.norm() <= 1.0 + 1e-12);
        prop_assert!(s.delta_phi_sq <= 1.0 + 1e-12);
    }
}
