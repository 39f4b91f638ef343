//! Finite-dimensional complex Hilbert-space primitives.
//!
//! State vectors, dense operators, projectors and projective measurements.
//! Projectors are stored as Kronecker products of per-subsystem factors, so a
//! projector that acts as the identity on a large subsystem never has to be
//! materialized. A dense projector is simply a product with a single factor.
//!
//! Index convention for composite systems is row-major: the leftmost factor
//! is the outermost (slowest varying) index.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for operator identities (hermiticity, idempotence, orthogonality,
/// completeness, commutators).
pub const OPERATOR_TOL: f64 = 1e-10;

/// Tolerance for vector norms.
pub const NORM_TOL: f64 = 1e-12;

/// Largest dimension a tensor product may reach.
pub const DEFAULT_DIM_CAP: usize = 1 << 20;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn check_finite(values: &[C64]) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// A pure state in a finite-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    labels: Option<Vec<String>>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyState);
        }
        check_finite(&amplitudes)?;
        Ok(Self {
            amplitudes,
            labels: None,
        })
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let v = Self::new(amplitudes)?;
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(1.0));
        }
        Ok(v.scale(C64::new(1.0 / norm, 0.0)))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Unit vector `e_index` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self::new(amplitudes)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn require_normalized(&self) -> Result<()> {
        let dev = (self.norm_sqr() - 1.0).abs();
        if dev <= NORM_TOL {
            Ok(())
        } else {
            Err(Error::NotNormalized(dev))
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * c).collect(),
            labels: self.labels.clone(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: C64, other: &StateVector, b: C64) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(Self {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            labels: self.labels.clone(),
        })
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

fn ensure_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    ensure_dim(a.dim(), b.dim())?;
    Ok(dot(&a.amplitudes, &b.amplitudes))
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Kronecker product `a ⊗ b` with the default dimension cap.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    tensor_with_cap(a, b, DEFAULT_DIM_CAP)
}

pub fn tensor_with_cap(a: &StateVector, b: &StateVector, cap: usize) -> Result<StateVector> {
    let dim = a.dim() as u128 * b.dim() as u128;
    if dim > cap as u128 {
        return Err(Error::DimensionOverflow(dim, cap));
    }
    let mut amplitudes = Vec::with_capacity(dim as usize);
    for x in &a.amplitudes {
        amplitudes.extend(b.amplitudes.iter().map(|y| x * y));
    }
    let labels = match (&a.labels, &b.labels) {
        (Some(la), Some(lb)) => Some(
            la.iter()
                .flat_map(|x| lb.iter().map(move |y| format!("{x},{y}")))
                .collect(),
        ),
        _ => None,
    };
    Ok(StateVector { amplitudes, labels })
}

/// Gram-Schmidt orthonormalization (modified, two passes). Fails on a
/// numerically dependent input.
pub fn orthonormalize(vectors: &[StateVector]) -> Result<Vec<StateVector>> {
    let mut out: Vec<StateVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.amplitudes.clone();
        for _ in 0..2 {
            for u in &out {
                let c = dot(&u.amplitudes, &w);
                for (wi, ui) in w.iter_mut().zip(&u.amplitudes) {
                    *wi -= c * ui;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return Err(Error::InvalidArgument(
                "vectors are linearly dependent".into(),
            ));
        }
        out.push(StateVector::new(w.into_iter().map(|z| z / norm).collect())?);
    }
    Ok(out)
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("operator dimension must be positive".into()));
        }
        ensure_dim(dim * dim, entries.len())?;
        check_finite(&entries)?;
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        Self::new(dim, rows.into_iter().flatten().collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = ONE;
        }
        op
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self { dim, entries }
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &StateVector, b: &StateVector) -> Result<Self> {
        ensure_dim(a.dim(), b.dim())?;
        Ok(Self::from_fn(a.dim(), |r, c| a.amplitudes[r] * b.amplitudes[c].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus, `‖·‖∞` throughout this crate.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn kron(&self, other: &Operator) -> Self {
        let d = self.dim * other.dim;
        Self::from_fn(d, |r, c| {
            self[(r / other.dim, c / other.dim)] * other[(r % other.dim, c % other.dim)]
        })
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        ensure_dim(self.dim, v.dim())?;
        let amplitudes = (0..self.dim)
            .map(|r| {
                let row = &self.entries[r * self.dim..(r + 1) * self.dim];
                row.iter().zip(&v.amplitudes).map(|(m, x)| m * x).sum()
            })
            .collect();
        Ok(StateVector {
            amplitudes,
            labels: v.labels.clone(),
        })
    }

    /// `⟨a|self|b⟩`.
    pub fn matrix_element(&self, a: &StateVector, b: &StateVector) -> Result<C64> {
        inner_product(a, &self.apply(b)?)
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.entries[r * self.dim + c]
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let d = self.dim;
        let mut out = Operator::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.entries[k * d..(k + 1) * d];
                for (o, b) in out.entries[r * d..(r + 1) * d].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

/// One tensor factor of a [`Projector`].
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Identity(usize),
    Matrix(Operator),
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Identity(d) => *d,
            Factor::Matrix(m) => m.dim(),
        }
    }

    fn to_dense(&self) -> Operator {
        match self {
            Factor::Identity(d) => Operator::identity(*d),
            Factor::Matrix(m) => m.clone(),
        }
    }

    fn trace(&self) -> C64 {
        match self {
            Factor::Identity(d) => C64::new(*d as f64, 0.0),
            Factor::Matrix(m) => m.trace(),
        }
    }

    fn compose(&self, other: &Factor) -> Factor {
        match (self, other) {
            (Factor::Identity(d), Factor::Identity(_)) => Factor::Identity(*d),
            (Factor::Identity(_), m) | (m, Factor::Identity(_)) => m.clone(),
            (Factor::Matrix(a), Factor::Matrix(b)) => Factor::Matrix(a * b),
        }
    }
}

/// An operator stored as a Kronecker product `F_1 ⊗ F_2 ⊗ …`.
///
/// Used for measurement projectors; nothing in the type forces idempotence,
/// that is what [`validate_measurement`] checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    factors: Vec<Factor>,
    dim: usize,
}

impl Projector {
    pub fn dense(op: Operator) -> Self {
        let dim = op.dim();
        Self {
            factors: vec![Factor::Matrix(op)],
            dim,
        }
    }

    pub fn product(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|f| f.dim() == 0) {
            return Err(Error::InvalidArgument("projector factors must be non-empty".into()));
        }
        let dim: u128 = factors.iter().map(|f| f.dim() as u128).product();
        if dim > DEFAULT_DIM_CAP as u128 {
            return Err(Error::DimensionOverflow(dim, DEFAULT_DIM_CAP));
        }
        Ok(Self {
            factors,
            dim: dim as usize,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            factors: vec![Factor::Identity(dim)],
            dim,
        }
    }

    /// `|v⟩⟨v|` for a normalized `v`.
    pub fn rank_one(v: &StateVector) -> Result<Self> {
        v.require_normalized()?;
        Ok(Self::dense(Operator::outer(v, v)?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn to_dense(&self) -> Operator {
        let mut iter = self.factors.iter();
        let first = iter.next().expect("projector has at least one factor").to_dense();
        iter.fold(first, |acc, f| acc.kron(&f.to_dense()))
    }

    pub fn trace(&self) -> C64 {
        self.factors.iter().map(Factor::trace).product()
    }

    /// Rank of a valid projector (its trace, rounded).
    pub fn rank(&self) -> usize {
        self.trace().re.round().max(0.0) as usize
    }

    fn same_layout(&self, other: &Projector) -> bool {
        self.factors.len() == other.factors.len()
            && self
                .factors
                .iter()
                .zip(&other.factors)
                .all(|(a, b)| a.dim() == b.dim())
    }

    /// Operator product `self · other`, kept factorized when both share a layout.
    pub fn compose(&self, other: &Projector) -> Result<Projector> {
        ensure_dim(self.dim, other.dim)?;
        if self.same_layout(other) {
            Ok(Projector {
                factors: self
                    .factors
                    .iter()
                    .zip(&other.factors)
                    .map(|(a, b)| a.compose(b))
                    .collect(),
                dim: self.dim,
            })
        } else {
            Ok(Projector::dense(&self.to_dense() * &other.to_dense()))
        }
    }

    /// Applies the operator to raw amplitudes, contracting one factor at a time.
    pub fn apply_slice(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "projector dimension mismatch");
        let mut cur = v.to_vec();
        let mut left = 1;
        for f in &self.factors {
            let d = f.dim();
            let right = self.dim / (left * d);
            if let Factor::Matrix(m) = f {
                let nonzero: Vec<(usize, usize, C64)> = (0..d)
                    .flat_map(|a| (0..d).map(move |b| (a, b)))
                    .map(|(a, b)| (a, b, m[(a, b)]))
                    .filter(|&(_, _, v)| v != ZERO)
                    .collect();
                let mut out = vec![ZERO; self.dim];
                for l in 0..left {
                    for &(a, b, mab) in &nonzero {
                        let dst = (l * d + a) * right;
                        let src = (l * d + b) * right;
                        for (o, c) in out[dst..dst + right].iter_mut().zip(&cur[src..src + right]) {
                            *o += mab * c;
                        }
                    }
                }
                cur = out;
            }
            left *= d;
        }
        cur
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        ensure_dim(self.dim, v.dim())?;
        Ok(StateVector {
            amplitudes: self.apply_slice(&v.amplitudes),
            labels: v.labels.clone(),
        })
    }

    /// `⟨a|P|b⟩`.
    pub fn matrix_element(&self, a: &StateVector, b: &StateVector) -> Result<C64> {
        ensure_dim(self.dim, a.dim())?;
        ensure_dim(self.dim, b.dim())?;
        Ok(dot(&a.amplitudes, &self.apply_slice(&b.amplitudes)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub projector: Projector,
}

/// A family of labeled projectors on a common space.
///
/// [`ProjectiveMeasurement::new`] validates the family; the `unchecked`
/// constructor only checks dimensions, so invalid families can be built and
/// then inspected with [`validate_measurement`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMeasurement {
    dim: usize,
    outcomes: Vec<Outcome>,
}

impl ProjectiveMeasurement {
    pub fn new(dim: usize, outcomes: Vec<(String, Projector)>) -> Result<Self> {
        let m = Self::new_unchecked(dim, outcomes)?;
        let report = m.validate();
        if report.is_valid() {
            Ok(m)
        } else {
            Err(Error::InvalidMeasurement(report))
        }
    }

    pub fn new_unchecked(dim: usize, outcomes: Vec<(String, Projector)>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidArgument("measurement has no outcomes".into()));
        }
        for (_, p) in &outcomes {
            ensure_dim(dim, p.dim())?;
        }
        Ok(Self {
            dim,
            outcomes: outcomes
                .into_iter()
                .map(|(label, projector)| Outcome { label, projector })
                .collect(),
        })
    }

    /// `{|i⟩⟨i|}` labeled by index.
    pub fn standard_basis(dim: usize) -> Self {
        let outcomes = (0..dim)
            .map(|i| {
                let mut op = Operator::zeros(dim);
                op.entries[i * dim + i] = ONE;
                Outcome {
                    label: i.to_string(),
                    projector: Projector::dense(op),
                }
            })
            .collect();
        Self { dim, outcomes }
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            outcomes: vec![Outcome {
                label: "I".into(),
                projector: Projector::identity(dim),
            }],
        }
    }

    /// Rank-one projectors onto an orthonormal basis.
    pub fn from_basis(basis: &[StateVector]) -> Result<Self> {
        let blocks: Vec<Vec<usize>> = (0..basis.len()).map(|i| vec![i]).collect();
        Self::from_blocks(basis, &blocks)
    }

    /// Coarse-grains an orthonormal basis: one projector per block of basis
    /// indices, `Σ_{j∈block} |u_j⟩⟨u_j|`.
    pub fn from_blocks(basis: &[StateVector], blocks: &[Vec<usize>]) -> Result<Self> {
        let dim = basis.first().ok_or(Error::EmptyState)?.dim();
        let mut outcomes = Vec::with_capacity(blocks.len());
        for (k, block) in blocks.iter().enumerate() {
            let mut op = Operator::zeros(dim);
            for &j in block {
                let u = basis.get(j).ok_or_else(|| {
                    Error::InvalidArgument(format!("block index {j} out of range"))
                })?;
                op = &op + &Operator::outer(u, u)?;
            }
            outcomes.push((k.to_string(), Projector::dense(op)));
        }
        Self::new(dim, outcomes)
    }

    /// Measurement on `A ⊗ B` with outcomes `(k, l)` and projectors `P_k ⊗ Q_l`.
    pub fn tensor(&self, other: &ProjectiveMeasurement) -> Result<Self> {
        let dim = self.dim as u128 * other.dim as u128;
        if dim > DEFAULT_DIM_CAP as u128 {
            return Err(Error::DimensionOverflow(dim, DEFAULT_DIM_CAP));
        }
        let mut outcomes = Vec::with_capacity(self.len() * other.len());
        for a in &self.outcomes {
            for b in &other.outcomes {
                let factors = a
                    .projector
                    .factors
                    .iter()
                    .chain(&b.projector.factors)
                    .cloned()
                    .collect();
                outcomes.push(Outcome {
                    label: format!("{},{}", a.label, b.label),
                    projector: Projector::product(factors)?,
                });
            }
        }
        Ok(Self {
            dim: dim as usize,
            outcomes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.outcomes.iter().map(|o| o.label.clone()).collect()
    }

    pub fn is_rank_one(&self) -> bool {
        self.outcomes.iter().all(|o| o.projector.rank() == 1)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_measurement(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NotHermitian { label: String, norm: f64 },
    NotIdempotent { label: String, norm: f64 },
    NotOrthogonal { left: String, right: String, norm: f64 },
    Incomplete { norm: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotHermitian { label, norm } => {
                write!(f, "projector {label} is not Hermitian (‖P − P†‖∞ = {norm:e})")
            }
            Violation::NotIdempotent { label, norm } => {
                write!(f, "projector {label} is not idempotent (‖P² − P‖∞ = {norm:e})")
            }
            Violation::NotOrthogonal { left, right, norm } => {
                write!(f, "projectors {left} and {right} overlap (‖P Q‖∞ = {norm:e})")
            }
            Violation::Incomplete { norm } => {
                write!(f, "projectors do not sum to identity (‖Σ P − I‖∞ = {norm:e})")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks hermiticity, idempotence, pairwise orthogonality and completeness
/// at [`OPERATOR_TOL`]. Works on dense copies of the projectors, so cost is
/// `O(K² d³)` for `K` outcomes in dimension `d`.
pub fn validate_measurement(m: &ProjectiveMeasurement) -> ValidationReport {
    let dense: Vec<Operator> = m.outcomes.iter().map(|o| o.projector.to_dense()).collect();
    let mut violations = Vec::new();

    for (o, p) in m.outcomes.iter().zip(&dense) {
        let herm = (p - &p.adjoint()).max_abs();
        if herm > OPERATOR_TOL {
            violations.push(Violation::NotHermitian {
                label: o.label.clone(),
                norm: herm,
            });
        }
        let idem = (&(p * p) - p).max_abs();
        if idem > OPERATOR_TOL {
            violations.push(Violation::NotIdempotent {
                label: o.label.clone(),
                norm: idem,
            });
        }
    }

    for k in 0..dense.len() {
        for l in (k + 1)..dense.len() {
            let norm = (&dense[k] * &dense[l]).max_abs();
            if norm > OPERATOR_TOL {
                violations.push(Violation::NotOrthogonal {
                    left: m.outcomes[k].label.clone(),
                    right: m.outcomes[l].label.clone(),
                    norm,
                });
            }
        }
    }

    let sum = dense
        .iter()
        .fold(Operator::zeros(m.dim), |acc, p| &acc + p);
    let norm = (&sum - &Operator::identity(m.dim)).max_abs();
    if norm > OPERATOR_TOL {
        violations.push(Violation::Incomplete { norm });
    }

    ValidationReport { violations }
}

/// Largest commutator norm `max ‖[P_k, Q_l]‖∞` between two measurements,
/// with the outcome pair that attains it.
pub fn max_commutator(
    m1: &ProjectiveMeasurement,
    m2: &ProjectiveMeasurement,
) -> Result<(f64, String, String)> {
    ensure_dim(m1.dim, m2.dim)?;
    let d1: Vec<Operator> = m1.outcomes.iter().map(|o| o.projector.to_dense()).collect();
    let d2: Vec<Operator> = m2.outcomes.iter().map(|o| o.projector.to_dense()).collect();
    let mut worst = (0.0, m1.outcomes[0].label.clone(), m2.outcomes[0].label.clone());
    for (a, pa) in m1.outcomes.iter().zip(&d1) {
        for (b, pb) in m2.outcomes.iter().zip(&d2) {
            let norm = pa.commutator(pb).max_abs();
            if norm > worst.0 {
                worst = (norm, a.label.clone(), b.label.clone());
            }
        }
    }
    Ok(worst)
}

/// Common refinement `{P_k Q_l}` of two compatible measurements.
///
/// Products with `‖·‖∞ ≤ OPERATOR_TOL` are dropped; labels are `(k,l)`.
pub fn refine(
    m1: &ProjectiveMeasurement,
    m2: &ProjectiveMeasurement,
) -> Result<ProjectiveMeasurement> {
    let (norm, left, right) = max_commutator(m1, m2)?;
    if norm > OPERATOR_TOL {
        return Err(Error::Incompatible { left, right, norm });
    }
    let mut outcomes = Vec::new();
    for a in &m1.outcomes {
        for b in &m2.outcomes {
            let product = a.projector.compose(&b.projector)?;
            if product.to_dense().max_abs() <= OPERATOR_TOL {
                continue;
            }
            outcomes.push((format!("({},{})", a.label, b.label), product));
        }
    }
    ProjectiveMeasurement::new(m1.dim, outcomes)
}
