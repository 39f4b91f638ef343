//! Seeded random instances for the property sweeps.
//!
//! Every trial draws from its own generator, derived from `(seed, stream,
//! index)`, so a sweep gives identical results however it is scheduled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::hilbert::{orthonormalize, ProjectiveMeasurement, StateVector, C64};
use crate::interferometer::FieldState;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Generator for trial `index` of sweep `stream` under `seed`.
pub fn trial_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
    ChaCha8Rng::seed_from_u64(key)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Ok(v) = StateVector::normalized(amps) {
            return v;
        }
    }
}

/// Random orthonormal basis (Gram-Schmidt of Gaussian vectors).
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<StateVector> {
    loop {
        let vs: Vec<StateVector> = (0..dim).map(|_| random_state(rng, dim)).collect();
        if let Ok(basis) = orthonormalize(&vs) {
            return basis;
        }
    }
}

/// Two orthonormal states.
pub fn random_orthogonal_pair<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> (StateVector, StateVector) {
    loop {
        let vs = [random_state(rng, dim), random_state(rng, dim)];
        if let Ok(mut pair) = orthonormalize(&vs) {
            let b = pair.pop().expect("two vectors");
            let a = pair.pop().expect("two vectors");
            return (a, b);
        }
    }
}

/// Random partition of `0..n` into non-empty blocks, blocks ordered by their
/// smallest element.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    let blocks = rng.random_range(1..=n);
    let mut assignment: Vec<usize> = (0..n).map(|i| i % blocks).collect();
    assignment.shuffle(rng);
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); blocks];
    for (i, b) in assignment.into_iter().enumerate() {
        out[b].push(i);
    }
    out.retain(|b| !b.is_empty());
    out.sort_by_key(|b| b[0]);
    out
}

/// Random orthonormal basis coarsened into random blocks.
pub fn random_measurement<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<ProjectiveMeasurement> {
    let basis = random_basis(rng, dim);
    let blocks = random_partition(rng, dim);
    ProjectiveMeasurement::from_blocks(&basis, &blocks)
}

pub fn random_rank_one_measurement<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<ProjectiveMeasurement> {
    ProjectiveMeasurement::from_basis(&random_basis(rng, dim))
}

/// Two commuting measurements: independent block partitions of one shared
/// random basis.
pub fn random_commuting_pair<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> Result<(ProjectiveMeasurement, ProjectiveMeasurement)> {
    let basis = random_basis(rng, dim);
    let a = ProjectiveMeasurement::from_blocks(&basis, &random_partition(rng, dim))?;
    let b = ProjectiveMeasurement::from_blocks(&basis, &random_partition(rng, dim))?;
    Ok((a, b))
}

/// Random probability vector; about a third of draws zero out some entries.
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, support: usize) -> Vec<f64> {
    let sparse = rng.random_bool(1.0 / 3.0);
    let mut w: Vec<f64> = (0..support)
        .map(|_| {
            if sparse && rng.random_bool(0.4) {
                0.0
            } else {
                -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        let i = rng.random_range(0..support);
        w[i] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// Random field state on `N ∈ [2, max_truncation]` levels with an empty top
/// level, so the flipper shift is lossless. Some draws are sparse.
pub fn random_field_state<R: Rng + ?Sized>(rng: &mut R, max_truncation: usize) -> FieldState {
    let n = rng.random_range(2..=max_truncation.max(2));
    let sparse = rng.random_bool(1.0 / 3.0);
    loop {
        let mut amps: Vec<C64> = (0..n)
            .map(|_| {
                if sparse && rng.random_bool(0.6) {
                    C64::new(0.0, 0.0)
                } else {
                    complex_gaussian(rng)
                }
            })
            .collect();
        amps[n - 1] = C64::new(0.0, 0.0);
        if let Ok(v) = StateVector::normalized(amps) {
            return FieldState::new(v.amplitudes().to_vec()).expect("normalized");
        }
    }
}

/// Normalized random packet envelope on `m` grid points.
pub fn random_envelope<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<C64> {
    random_state(rng, m).amplitudes().to_vec()
}
