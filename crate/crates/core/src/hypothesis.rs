//! Neyman-Pearson discrimination between two discrete distributions.
//!
//! A test decides between `P` (null) and `Q` from one observed outcome `k`
//! using the likelihood ratio `r_k = q_k / p_k` (`+∞` when `p_k = 0 < q_k`;
//! outcomes with `p_k = q_k = 0` are ignored). `P` is rejected when
//! `r_k > t`, accepted when `r_k < t`, and on a tie `r_k = t` it is accepted
//! with probability `γ`.
//!
//! For every such test the error probabilities obey
//! `err1 + err2 ≥ 1 − √(1 − U²)` and `err1 · err2 ≤ U²/4`, where `U` is the
//! Bhattacharyya coefficient of `p` and `q`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{bhattacharyya, OutcomeDistribution};

/// Relative tolerance under which two likelihood ratios count as a tie.
pub const RATIO_TIE_TOL: f64 = 1e-12;
/// Tolerance on both error bounds.
pub const BOUND_TOL: f64 = 1e-10;
/// Largest support for which all `2^n` acceptance regions are enumerated.
pub const EXHAUSTIVE_MAX_SUPPORT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NpTest {
    pub threshold: f64,
    /// Probability of accepting `P` on a tie.
    pub gamma: f64,
}

impl NpTest {
    pub fn new(threshold: f64, gamma: f64) -> Result<Self> {
        if threshold.is_nan() || threshold < 0.0 {
            return Err(Error::InvalidArgument(format!("threshold {threshold} must be >= 0")));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidArgument(format!("gamma {gamma} outside [0, 1]")));
        }
        Ok(Self { threshold, gamma })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestErrors {
    /// `1 − α`: rejecting `P` when `P` is true.
    pub err1: f64,
    /// `1 − β`: accepting `P` when `Q` is true.
    pub err2: f64,
}

impl TestErrors {
    pub fn sum(&self) -> f64 {
        self.err1 + self.err2
    }

    pub fn product(&self) -> f64 {
        self.err1 * self.err2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Sum,
    Product,
}

#[derive(Clone, Copy, Debug)]
struct RatioTerm {
    ratio: f64,
    p: f64,
    q: f64,
}

fn ratio_terms(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<Vec<RatioTerm>> {
    if p.labels() != q.labels() {
        return Err(Error::LabelMismatch);
    }
    Ok(p.probabilities()
        .iter()
        .zip(q.probabilities())
        .filter(|(&pk, &qk)| pk > 0.0 || qk > 0.0)
        .map(|(&pk, &qk)| RatioTerm {
            ratio: if pk == 0.0 { f64::INFINITY } else { qk / pk },
            p: pk,
            q: qk,
        })
        .collect())
}

fn is_tie(r: f64, t: f64) -> bool {
    if r.is_infinite() || t.is_infinite() {
        return r == t;
    }
    (r - t).abs() <= RATIO_TIE_TOL * t.abs().max(1.0)
}

fn errors_for(terms: &[RatioTerm], test: &NpTest) -> TestErrors {
    let (mut err1, mut err2) = (0.0, 0.0);
    for term in terms {
        if is_tie(term.ratio, test.threshold) {
            err1 += (1.0 - test.gamma) * term.p;
            err2 += test.gamma * term.q;
        } else if term.ratio > test.threshold {
            err1 += term.p;
        } else {
            err2 += term.q;
        }
    }
    TestErrors { err1, err2 }
}

/// Exact error probabilities of a likelihood-ratio test.
pub fn np_test_errors(
    p: &OutcomeDistribution,
    q: &OutcomeDistribution,
    test: &NpTest,
) -> Result<TestErrors> {
    NpTest::new(test.threshold, test.gamma)?;
    Ok(errors_for(&ratio_terms(p, q)?, test))
}

fn distinct_ratios(terms: &[RatioTerm]) -> Vec<f64> {
    let mut ratios: Vec<f64> = terms.iter().map(|t| t.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(ratios.len());
    for r in ratios {
        if out.last().is_none_or(|&last| !is_tie(r, last)) {
            out.push(r);
        }
    }
    out
}

fn candidates(terms: &[RatioTerm]) -> Vec<NpTest> {
    distinct_ratios(terms)
        .into_iter()
        .flat_map(|t| {
            [0.0, 1.0].map(|gamma| NpTest {
                threshold: t,
                gamma,
            })
        })
        .collect()
}

/// Every deterministic likelihood-ratio test: thresholds at the distinct
/// ratio values, `γ ∈ {0, 1}`. Ordered by threshold, then `γ`.
pub fn candidate_tests(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<Vec<NpTest>> {
    Ok(candidates(&ratio_terms(p, q)?))
}

/// The candidate test minimizing `err1 + err2` or `err1 · err2`; the first
/// in [`candidate_tests`] order wins ties.
pub fn best_np_test(
    p: &OutcomeDistribution,
    q: &OutcomeDistribution,
    objective: Objective,
) -> Result<(NpTest, TestErrors)> {
    let terms = ratio_terms(p, q)?;
    let score = |e: &TestErrors| match objective {
        Objective::Sum => e.sum(),
        Objective::Product => e.product(),
    };
    candidates(&terms)
        .into_iter()
        .map(|t| (t, errors_for(&terms, &t)))
        .reduce(|best, next| if score(&next.1) < score(&best.1) { next } else { best })
        .ok_or_else(|| Error::InvalidDistribution("no outcome has positive probability".into()))
}

/// Lower bound `1 − √(1 − U²)` on `err1 + err2`.
pub fn sum_bound(u: f64) -> f64 {
    1.0 - (1.0 - u * u).max(0.0).sqrt()
}

/// Upper bound `U²/4` on `err1 · err2`.
pub fn product_bound(u: f64) -> f64 {
    0.25 * u * u
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExhaustiveCheck {
    pub regions: usize,
    /// `min over regions of (err1 + err2) − sum_bound`
    pub min_sum_slack: f64,
    pub optimum_sum: f64,
    /// Whether the region optimum equals the threshold-test optimum within `1e-12`.
    pub matches_threshold_optimum: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub u: f64,
    pub sum_bound: f64,
    pub product_bound: f64,
    pub tests_checked: usize,
    /// `min (err1 + err2) − sum_bound` over the candidate tests.
    pub min_sum_slack: f64,
    /// `min product_bound − err1·err2` over the candidate tests.
    pub min_product_slack: f64,
    pub best_sum: TestErrors,
    pub best_sum_test: NpTest,
    pub best_product: TestErrors,
    pub exhaustive: Option<ExhaustiveCheck>,
}

impl BoundReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_sum_slack >= -tol
            && self.min_product_slack >= -tol
            && self.exhaustive.as_ref().is_none_or(|e| {
                e.min_sum_slack >= -tol && e.matches_threshold_optimum
            })
    }
}

fn exhaustive_check(terms: &[RatioTerm], bound: f64, threshold_optimum: f64) -> ExhaustiveCheck {
    let n = terms.len();
    let mut optimum = f64::INFINITY;
    for mask in 0u32..(1u32 << n) {
        // mask bit set: outcome rejects P
        let (mut err1, mut err2) = (0.0, 0.0);
        for (i, t) in terms.iter().enumerate() {
            if mask & (1 << i) != 0 {
                err1 += t.p;
            } else {
                err2 += t.q;
            }
        }
        optimum = optimum.min(err1 + err2);
    }
    ExhaustiveCheck {
        regions: 1 << n,
        min_sum_slack: optimum - bound,
        optimum_sum: optimum,
        matches_threshold_optimum: (optimum - threshold_optimum).abs() <= 1e-12,
    }
}

/// Checks both error bounds for every candidate test, plus (support ≤ 12)
/// the sum bound over every acceptance region.
pub fn verify_bounds(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<BoundReport> {
    let u = bhattacharyya(p, q)?;
    let terms = ratio_terms(p, q)?;
    let tests = candidates(&terms);
    if tests.is_empty() {
        return Err(Error::InvalidDistribution("no outcome has positive probability".into()));
    }
    let (sb, pb) = (sum_bound(u), product_bound(u));
    let mut min_sum_slack = f64::INFINITY;
    let mut min_product_slack = f64::INFINITY;
    let mut best_sum: Option<(NpTest, TestErrors)> = None;
    let mut best_product: Option<TestErrors> = None;
    for t in &tests {
        let e = errors_for(&terms, t);
        min_sum_slack = min_sum_slack.min(e.sum() - sb);
        min_product_slack = min_product_slack.min(pb - e.product());
        if best_sum.is_none_or(|(_, b)| e.sum() < b.sum()) {
            best_sum = Some((*t, e));
        }
        if best_product.is_none_or(|b| e.product() < b.product()) {
            best_product = Some(e);
        }
    }
    let (best_sum_test, best_sum) = best_sum.expect("at least one candidate");
    let exhaustive = (terms.len() <= EXHAUSTIVE_MAX_SUPPORT)
        .then(|| exhaustive_check(&terms, sb, best_sum.sum()));
    Ok(BoundReport {
        u,
        sum_bound: sb,
        product_bound: pb,
        tests_checked: tests.len(),
        min_sum_slack,
        min_product_slack,
        best_sum,
        best_sum_test,
        best_product: best_product.expect("at least one candidate"),
        exhaustive,
    })
}
