use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;

use whichpath::hilbert::{inner_product, tensor, Projector, StateVector};
use whichpath::hypothesis::{np_test_errors, product_bound, sum_bound, NpTest};
use whichpath::measures::{
    bhattacharyya, chain_report, indistinguishability, interference_power, outcome_distribution,
    superposition_probability, tradeoff_report, OutcomeDistribution, SuperpositionSpec,
};
use whichpath::random::{
    random_commuting_pair, random_measurement, random_orthogonal_pair, random_probabilities,
    random_rank_one_measurement, random_state, trial_rng,
};

const TOL: f64 = 1e-10;

/// `⟨a|P|b⟩` from the dense matrix, written out by hand.
fn dense_element(p: &Projector, a: &StateVector, b: &StateVector) -> C64 {
    let m = p.to_dense();
    let n = m.dim();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            acc += a.amplitudes()[r].conj() * m[(r, c)] * b.amplitudes()[c];
        }
    }
    acc
}

fn dim_and_seed() -> impl Strategy<Value = (usize, u64)> {
    (2usize..=8, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn u_dominates_i((dim, seed) in dim_and_seed()) {
        let mut rng = trial_rng(seed, 0, 0);
        let (a, b) = random_orthogonal_pair(&mut rng, dim);
        let m = random_measurement(&mut rng, dim).unwrap();
        let u: f64 = m.outcomes().iter().map(|o| {
            (dense_element(&o.projector, &a, &a).re * dense_element(&o.projector, &b, &b).re).max(0.0).sqrt()
        }).sum();
        let i: f64 = m.outcomes().iter().map(|o| dense_element(&o.projector, &a, &b).norm()).sum();
        let r = tradeoff_report(&a, &b, &m).unwrap();
        prop_assert!((r.indistinguishability - u).abs() < 1e-12);
        prop_assert!((r.interference_power - i).abs() < 1e-12);
        prop_assert!(r.slack >= -TOL);
    }

    #[test]
    fn rank_one_closes_the_gap((dim, seed) in dim_and_seed()) {
        let mut rng = trial_rng(seed, 1, 0);
        let (a, b) = random_orthogonal_pair(&mut rng, dim);
        let m = random_rank_one_measurement(&mut rng, dim).unwrap();
        let r = tradeoff_report(&a, &b, &m).unwrap();
        prop_assert!(r.rank_one);
        prop_assert!(r.slack.abs() <= TOL);
    }

    #[test]
    fn refinement_is_monotone((dim, seed) in dim_and_seed()) {
        let mut rng = trial_rng(seed, 2, 0);
        let (a, b) = random_orthogonal_pair(&mut rng, dim);
        let (interf, detect) = random_commuting_pair(&mut rng, dim).unwrap();
        let r = chain_report(&a, &b, &interf, &detect).unwrap();
        // refining can only lower U and raise I
        prop_assert!(r.u_refined <= r.u_detect + TOL);
        prop_assert!(r.i_refined >= r.i_interf - TOL);
        prop_assert!(r.u_refined >= r.i_refined - TOL);
        prop_assert_eq!(r.u_detect, indistinguishability(&a, &b, &detect).unwrap());
        prop_assert_eq!(r.i_interf, interference_power(&a, &b, &interf).unwrap());
    }

    #[test]
    fn global_phase_leaves_u_and_i_alone((dim, seed) in dim_and_seed(), theta in 0.0f64..6.3) {
        let mut rng = trial_rng(seed, 3, 0);
        let (a, b) = random_orthogonal_pair(&mut rng, dim);
        let m = random_measurement(&mut rng, dim).unwrap();
        let b2 = b.scale(C64::from_polar(1.0, theta));
        let r1 = tradeoff_report(&a, &b, &m).unwrap();
        let r2 = tradeoff_report(&a, &b2, &m).unwrap();
        prop_assert!((r1.indistinguishability - r2.indistinguishability).abs() < 1e-12);
        prop_assert!((r1.interference_power - r2.interference_power).abs() < 1e-12);
    }

    #[test]
    fn superposition_matches_explicit_state((dim, seed) in dim_and_seed(), chi in -7.0f64..7.0, w in 0.05f64..0.95) {
        let mut rng = trial_rng(seed, 4, 0);
        let (a, b) = random_orthogonal_pair(&mut rng, dim);
        let m = random_measurement(&mut rng, dim).unwrap();
        let c1 = C64::new(w.sqrt(), 0.0);
        let c2 = C64::from_polar((1.0 - w).sqrt(), rng.random::<f64>());
        let spec = SuperpositionSpec::new(c1, c2, chi).unwrap();
        let got = superposition_probability(&spec, &a, &b, &m).unwrap();
        let psi = a.combine(c1, &b, c2 * C64::from_polar(1.0, chi)).unwrap();
        for (o, p) in m.outcomes().iter().zip(got.probabilities()) {
            let applied = o.projector.to_dense().apply(&psi).unwrap();
            prop_assert!((applied.norm_sqr() - p).abs() < TOL);
        }
        let total: f64 = got.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < TOL);
    }

    #[test]
    fn tensor_is_associative(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4, d3 in 1usize..4) {
        let mut rng = trial_rng(seed, 5, 0);
        let (x, y, z) = (random_state(&mut rng, d1), random_state(&mut rng, d2), random_state(&mut rng, d3));
        let left = tensor(&tensor(&x, &y).unwrap(), &z).unwrap();
        let right = tensor(&x, &tensor(&y, &z).unwrap()).unwrap();
        prop_assert!(left.distance(&right).unwrap() < 1e-14);
        prop_assert!((left.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outcome_probabilities_sum_to_one((dim, seed) in dim_and_seed()) {
        let mut rng = trial_rng(seed, 6, 0);
        let psi = random_state(&mut rng, dim);
        let m = random_measurement(&mut rng, dim).unwrap();
        let d = outcome_distribution(&psi, &m).unwrap();
        prop_assert!(d.probabilities().iter().all(|&p| p >= 0.0));
        prop_assert!((d.probabilities().iter().sum::<f64>() - 1.0).abs() < TOL);
        for o in m.outcomes() {
            let applied = o.projector.apply(&psi).unwrap();
            prop_assert!(applied.norm() <= 1.0 + 1e-12);
            let p = d.get(&o.label).unwrap();
            prop_assert!((applied.norm_sqr() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn raising_threshold_trades_err1_for_err2(seed in any::<u64>(), support in 2usize..=10) {
        let mut rng = trial_rng(seed, 7, 0);
        let p = OutcomeDistribution::from_probabilities(&random_probabilities(&mut rng, support)).unwrap();
        let q = OutcomeDistribution::from_probabilities(&random_probabilities(&mut rng, support)).unwrap();
        let mut ts: Vec<f64> = (0..20).map(|_| rng.random::<f64>() * 5.0).collect();
        ts.sort_by(f64::total_cmp);
        let errs: Vec<_> = ts.iter().map(|&t| np_test_errors(&p, &q, &NpTest::new(t, 0.5).unwrap()).unwrap()).collect();
        for w in errs.windows(2) {
            prop_assert!(w[1].err1 <= w[0].err1 + 1e-12);
            prop_assert!(w[1].err2 >= w[0].err2 - 1e-12);
        }
    }

    #[test]
    fn bounds_hold_for_randomized_ties(seed in any::<u64>(), support in 2usize..=10, gamma in 0.0f64..=1.0) {
        let mut rng = trial_rng(seed, 8, 0);
        let p = OutcomeDistribution::from_probabilities(&random_probabilities(&mut rng, support)).unwrap();
        let q = OutcomeDistribution::from_probabilities(&random_probabilities(&mut rng, support)).unwrap();
        let u = bhattacharyya(&p, &q).unwrap();
        let ratios: Vec<f64> = p.probabilities().iter().zip(q.probabilities())
            .filter(|(a, b)| **a > 0.0 || **b > 0.0)
            .map(|(a, b)| if *a == 0.0 { f64::INFINITY } else { b / a })
            .collect();
        for t in ratios.into_iter().chain([0.0, 0.5, 1.0, 2.0]) {
            let e = np_test_errors(&p, &q, &NpTest::new(t, gamma).unwrap()).unwrap();
            prop_assert!(e.sum() >= sum_bound(u) - TOL);
            prop_assert!(e.product() <= product_bound(u) + TOL);
        }
    }
}

#[test]
fn inner_product_is_conjugate_linear_in_first_slot() {
    let mut rng = trial_rng(99, 0, 0);
    let (a, b) = (random_state(&mut rng, 4), random_state(&mut rng, 4));
    let c = C64::new(0.3, -1.1);
    let lhs = inner_product(&a.scale(c), &b).unwrap();
    let rhs = c.conj() * inner_product(&a, &b).unwrap();
    assert!((lhs - rhs).norm() < 1e-14);
}
