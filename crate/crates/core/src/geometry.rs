//! Distance spaces of negative type: construction, transforms, the
//! base-point Gram form and certification.
//!
//! All matrices are dense and row-major. Element indices are 0-based.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::{tol, Error, Result};

/// Symmetric, nonnegative `n × n` distance data with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates and wraps row-major data.
    ///
    /// Symmetry is checked up to a relative `1e-12`; the stored matrix is the
    /// exact symmetrization of the input.
    pub fn from_row_major(n: usize, mut data: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
            for j in (i + 1)..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if !a.is_finite() || !b.is_finite() || a < 0.0 || b < 0.0 {
                    return Err(Error::InvalidEntry(i, j));
                }
                if libm::fabs(a - b) > 1e-12 * (1.0 + a.max(b)) {
                    return Err(Error::Asymmetric(i, j));
                }
                let mean = 0.5 * (a + b);
                data[i * n + j] = mean;
                data[j * n + i] = mean;
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    /// Builds a matrix from a symmetric entry function; only `i < j` is queried.
    pub(crate) fn from_pairs(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    /// Returns the first triple `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k)`
    /// beyond the metric tolerance, if any.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for i in 0..n {
            for k in (i + 1)..n {
                let dik = self.get(i, k);
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    if dik > self.get(i, j) + self.get(j, k) + tol::METRIC * (1.0 + dik) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn is_metric(&self) -> bool {
        self.triangle_violation().is_none()
    }
}

/// Distances between real vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointMetric {
    L1,
    L2,
    /// `ℓ_p` with `1 ≤ p ≤ 2`.
    Lp(f64),
    /// Angle between the vectors, in `[0, π]`.
    Cosine,
}

/// Distances between finite subsets of a universe `{0, …, u-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetMetric {
    /// `1 − |A∩B| / |A∪B|`, with `d(∅, ∅) = 0`.
    Jaccard,
    /// `|A△B| / (|A| + |B|)`, with `d(∅, ∅) = 0`.
    Dice,
    /// `|A△B| / |U|`.
    SimpleMatching,
    /// `1 − |A∩B| / |U|` for `A ≠ B`, and 0 for equal sets.
    RussellRao,
}

/// Where a distance matrix comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DistanceSource {
    Points {
        metric: PointMetric,
        points: Vec<Vec<f64>>,
    },
    Sets {
        metric: SetMetric,
        universe: usize,
        sets: Vec<Vec<usize>>,
    },
    Explicit(DistanceMatrix),
}

impl DistanceSource {
    pub fn len(&self) -> usize {
        match self {
            DistanceSource::Points { points, .. } => points.len(),
            DistanceSource::Sets { sets, .. } => sets.len(),
            DistanceSource::Explicit(d) => d.n(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn build(&self) -> Result<DistanceMatrix> {
        match self {
            DistanceSource::Points { metric, points } => point_distances(points, *metric),
            DistanceSource::Sets { metric, universe, sets } => set_distances(sets, *universe, *metric),
            DistanceSource::Explicit(d) => Ok(d.clone()),
        }
    }
}

pub fn point_distances(points: &[Vec<f64>], metric: PointMetric) -> Result<DistanceMatrix> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let dim = points[0].len();
    if dim == 0 {
        return Err(Error::param("points must have at least one coordinate"));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("point coordinates must be finite"));
        }
    }
    match metric {
        PointMetric::L1 => Ok(DistanceMatrix::from_pairs(n, |i, j| {
            points[i].iter().zip(&points[j]).map(|(a, b)| libm::fabs(a - b)).sum()
        })),
        PointMetric::L2 => Ok(DistanceMatrix::from_pairs(n, |i, j| euclid(&points[i], &points[j]))),
        PointMetric::Lp(p) => {
            if !(1.0..=2.0).contains(&p) {
                return Err(Error::param("lp distance needs 1 <= p <= 2"));
            }
            Ok(DistanceMatrix::from_pairs(n, |i, j| {
                let s: f64 = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| libm::pow(libm::fabs(a - b), p))
                    .sum();
                libm::pow(s, 1.0 / p)
            }))
        }
        PointMetric::Cosine => {
            let mut unit = Vec::with_capacity(n);
            for (idx, p) in points.iter().enumerate() {
                let norm = libm::sqrt(p.iter().map(|v| v * v).sum());
                if norm == 0.0 {
                    return Err(Error::ZeroVector(idx));
                }
                unit.push(p.iter().map(|v| v / norm).collect::<Vec<_>>());
            }
            // 2·atan2(|u−v|, |u+v|) stays accurate near 0 and π, unlike acos.
            Ok(DistanceMatrix::from_pairs(n, |i, j| {
                let (mut diff, mut sum) = (0.0, 0.0);
                for (a, b) in unit[i].iter().zip(&unit[j]) {
                    diff += (a - b) * (a - b);
                    sum += (a + b) * (a + b);
                }
                2.0 * libm::atan2(libm::sqrt(diff), libm::sqrt(sum))
            }))
        }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

pub fn set_distances(sets: &[Vec<usize>], universe: usize, metric: SetMetric) -> Result<DistanceMatrix> {
    let n = sets.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if universe == 0 {
        return Err(Error::param("universe must contain at least one element"));
    }
    let mut normalized = Vec::with_capacity(n);
    for s in sets {
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        if let Some(&e) = s.last() {
            if e >= universe {
                return Err(Error::ElementOutOfRange(e));
            }
        }
        normalized.push(s);
    }
    let u = universe as f64;
    Ok(DistanceMatrix::from_pairs(n, |i, j| {
        let (a, b) = (&normalized[i], &normalized[j]);
        let inter = intersection_size(a, b) as f64;
        let (la, lb) = (a.len() as f64, b.len() as f64);
        let union = la + lb - inter;
        let sym_diff = union - inter;
        match metric {
            SetMetric::Jaccard if union == 0.0 => 0.0,
            SetMetric::Jaccard => 1.0 - inter / union,
            SetMetric::Dice if la + lb == 0.0 => 0.0,
            SetMetric::Dice => sym_diff / (la + lb),
            SetMetric::SimpleMatching => sym_diff / u,
            SetMetric::RussellRao if a == b => 0.0,
            SetMetric::RussellRao => 1.0 - inter / u,
        }
    }))
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Entrywise transforms that map negative-type spaces to negative-type spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// `d^a` for `a ∈ (0, 1]`.
    Power(f64),
    /// `d / (1 + d)`.
    Ratio,
    /// `ln(1 + d)`.
    Log1p,
    /// `1 − e^{−λd}` for `λ > 0`.
    ExpDecay(f64),
    /// `d^{log₂(n/(n−1))}`; the input must be a metric.
    MetricPower,
}

pub fn transform_distance(d: &DistanceMatrix, t: Transform) -> Result<DistanceMatrix> {
    let f: fn(f64, f64) -> f64 = match t {
        Transform::Power(a) => {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::param("power exponent must lie in (0, 1]"));
            }
            |x, a| libm::pow(x, a)
        }
        Transform::Ratio => |x, _| x / (1.0 + x),
        Transform::Log1p => |x, _| libm::log1p(x),
        Transform::ExpDecay(l) => {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::param("decay rate must be positive"));
            }
            |x, l| -libm::expm1(-l * x)
        }
        Transform::MetricPower => {
            if let Some((i, j, k)) = d.triangle_violation() {
                return Err(Error::NotMetric(i, j, k));
            }
            |x, e| libm::pow(x, e)
        }
    };
    let param = match t {
        Transform::Power(a) => a,
        Transform::ExpDecay(l) => l,
        Transform::MetricPower => {
            let n = d.n() as f64;
            libm::log2(n / (n - 1.0))
        }
        _ => 0.0,
    };
    Ok(DistanceMatrix::from_pairs(d.n(), |i, j| f(d.get(i, j), param)))
}

pub fn apply_transforms(d: &DistanceMatrix, transforms: &[Transform]) -> Result<DistanceMatrix> {
    let mut out = d.clone();
    for &t in transforms {
        out = transform_distance(&out, t)?;
    }
    Ok(out)
}

/// Gram matrix `Q` and squared norms `c` of an (implicit) embedding of `√d`
/// with the base point at the origin.
///
/// For any `x` with `Σx = α`: `xᵀDx = 2α·cᵀx − 2·xᵀQx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchoenbergForm {
    n: usize,
    q: Vec<f64>,
    c: Vec<f64>,
    base: usize,
}

impl SchoenbergForm {
    pub fn new(d: &DistanceMatrix, base: usize) -> Result<Self> {
        let n = d.n();
        if base >= n {
            return Err(Error::ElementOutOfRange(base));
        }
        let c: Vec<f64> = d.row(base).to_vec();
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = if i == base || j == base {
                    0.0
                } else {
                    0.5 * (c[i] + c[j] - d.get(i, j))
                };
                q[i * n + j] = v;
                q[j * n + i] = v;
            }
        }
        Ok(Self { n, q, c, base })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    pub fn q_row(&self, i: usize) -> &[f64] {
        &self.q[i * self.n..(i + 1) * self.n]
    }

    /// `xᵀQx`.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        (0..self.n).map(|i| x[i] * dot(self.q_row(i), x)).sum()
    }

    /// `2α·cᵀx − 2·xᵀQx` with `α = Σx`.
    pub fn slice_value(&self, x: &[f64]) -> f64 {
        let alpha: f64 = x.iter().sum();
        2.0 * alpha * dot(&self.c, x) - 2.0 * self.quadratic(x)
    }

    /// Induced ∞-norm (max absolute row sum) of `Q`.
    pub fn q_norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.q_row(i).iter().map(|v| libm::fabs(*v)).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub fn schoenberg_form(d: &DistanceMatrix, base: usize) -> Result<SchoenbergForm> {
    SchoenbergForm::new(d, base)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NegativeType,
    NotNegativeType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegTypeCertificate {
    pub verdict: Verdict,
    /// A vector `b` with `Σb = 0` and `bᵀDb > 0`, present iff the verdict is negative.
    pub witness: Option<Vec<f64>>,
    /// `bᵀDb` for the witness.
    pub witness_value: Option<f64>,
    pub min_eigenvalue: f64,
    /// The PSD tolerance the verdict was taken against.
    pub tolerance: f64,
}

impl NegTypeCertificate {
    pub fn is_negative_type(&self) -> bool {
        self.verdict == Verdict::NegativeType
    }
}

/// Decides negative type by testing `Q` (base point 0) for positive
/// semidefiniteness with a symmetric eigendecomposition.
pub fn certify_negative_type(d: &DistanceMatrix) -> NegTypeCertificate {
    let form = SchoenbergForm::new(d, 0).expect("base point 0 always exists");
    certify_form(d, &form)
}

pub(crate) fn certify_form(d: &DistanceMatrix, form: &SchoenbergForm) -> NegTypeCertificate {
    let n = d.n();
    let base = form.base();
    let others: Vec<usize> = (0..n).filter(|&i| i != base).collect();
    let m = others.len();
    let tolerance = tol::PSD_REL * (1.0 + form.q_norm_inf());
    let reduced = DMatrix::from_fn(m, m, |r, s| form.q(others[r], others[s]));
    let eig = reduced.symmetric_eigen();
    let (idx, min_eig) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });

    if min_eig >= -tolerance {
        return NegTypeCertificate {
            verdict: Verdict::NegativeType,
            witness: None,
            witness_value: None,
            min_eigenvalue: min_eig,
            tolerance,
        };
    }

    let u = eig.eigenvectors.column(idx);
    let (mut peak, mut peak_abs) = (1.0, 0.0);
    for &v in u.iter() {
        if libm::fabs(v) > peak_abs {
            peak_abs = libm::fabs(v);
            peak = v;
        }
    }
    let mut b = vec![0.0; n];
    for (r, &i) in others.iter().enumerate() {
        b[i] = u[r] / peak;
    }
    b[base] = -b.iter().sum::<f64>();
    let value = dispersion_unchecked(d, &b);
    NegTypeCertificate {
        verdict: Verdict::NotNegativeType,
        witness: Some(b),
        witness_value: Some(value),
        min_eigenvalue: min_eig,
        tolerance,
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dispersion_unchecked(d: &DistanceMatrix, x: &[f64]) -> f64 {
    (0..d.n())
        .filter(|&i| x[i] != 0.0)
        .map(|i| x[i] * dot(d.row(i), x))
        .sum()
}

/// `xᵀDx + wᵀx` (ordered pairs, so a set's value counts every pair twice).
pub fn dispersion(d: &DistanceMatrix, x: &[f64], w: Option<&[f64]>) -> Result<f64> {
    let n = d.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let mut value = dispersion_unchecked(d, x);
    if let Some(w) = w {
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: w.len(),
            });
        }
        value += dot(w, x);
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnionCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Compares the mass-normalized dispersion of `x` on `A ∪ B` with the sum of
/// the normalized dispersions on `A` and `B`. On negative-type spaces the
/// union side is never smaller.
pub fn check_union_inequality(d: &DistanceMatrix, x: &[f64], a: &[usize], b: &[usize]) -> Result<UnionCheck> {
    let n = d.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let mut in_a = vec![false; n];
    for &i in a {
        if i >= n {
            return Err(Error::ElementOutOfRange(i));
        }
        in_a[i] = true;
    }
    for &i in b {
        if i >= n {
            return Err(Error::ElementOutOfRange(i));
        }
        if in_a[i] {
            return Err(Error::Overlap);
        }
    }
    let restrict = |set: &[usize]| {
        let mut v = vec![0.0; n];
        for &i in set {
            v[i] = x[i];
        }
        v
    };
    let (xa, xb) = (restrict(a), restrict(b));
    let (ma, mb): (f64, f64) = (xa.iter().sum(), xb.iter().sum());
    if ma <= 0.0 || mb <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let xab: Vec<f64> = xa.iter().zip(&xb).map(|(p, q)| p + q).collect();
    let lhs = dispersion_unchecked(d, &xab) / (ma + mb);
    let rhs = dispersion_unchecked(d, &xa) / ma + dispersion_unchecked(d, &xb) / mb;
    let holds = lhs >= rhs - tol::NUM * (1.0 + libm::fabs(rhs));
    Ok(UnionCheck { holds, lhs, rhs })
}
