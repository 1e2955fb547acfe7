//! Seeded instance generators.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{DistanceMatrix, DistanceSource, PointMetric, SetMetric, Transform};
use crate::{geometry, Error, Instance, Matroid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointCloud {
    UniformCube,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatroidChoice {
    Uniform {
        k: usize,
    },
    /// Contiguous, nearly equal blocks with a shared capacity.
    Partition {
        blocks: usize,
        capacity: usize,
    },
}

impl MatroidChoice {
    pub fn build(&self, n: usize) -> Result<Matroid> {
        match *self {
            MatroidChoice::Uniform { k } => Matroid::uniform(n, k),
            MatroidChoice::Partition { blocks, capacity } => Matroid::partition_even(n, blocks, capacity),
        }
    }
}

/// Everything needed to rebuild an instance bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub source: DistanceSource,
    pub transforms: Vec<Transform>,
    pub matroid: Matroid,
    pub scores: Option<Vec<f64>>,
    pub seed: u64,
}

impl GeneratedInstance {
    pub fn distance(&self) -> Result<DistanceMatrix> {
        geometry::apply_transforms(&self.source.build()?, &self.transforms)
    }

    pub fn build(&self) -> Result<Instance> {
        Instance::new(self.distance()?, self.matroid.clone(), self.scores.clone())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point_cloud<R: Rng + ?Sized>(n: usize, dim: usize, cloud: PointCloud, rng: &mut R) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| match cloud {
                    PointCloud::UniformCube => rng.gen::<f64>(),
                    PointCloud::Gaussian => rng.sample(StandardNormal),
                })
                .collect()
        })
        .collect()
}

pub fn random_points(
    n: usize,
    dim: usize,
    cloud: PointCloud,
    metric: PointMetric,
    matroid: &MatroidChoice,
    seed: u64,
) -> Result<GeneratedInstance> {
    if dim == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    let mut rng = rng(seed);
    let points = random_point_cloud(n, dim, cloud, &mut rng);
    Ok(GeneratedInstance {
        source: DistanceSource::Points { metric, points },
        transforms: Vec::new(),
        matroid: matroid.build(n)?,
        scores: None,
        seed,
    })
}

/// `n` random subsets of `{0..universe}`, each of exactly `set_size` elements.
pub fn random_sets(
    n: usize,
    universe: usize,
    set_size: usize,
    metric: SetMetric,
    matroid: &MatroidChoice,
    seed: u64,
) -> Result<GeneratedInstance> {
    if set_size > universe {
        return Err(Error::param("set size exceeds the universe"));
    }
    let mut rng = rng(seed);
    let sets = (0..n)
        .map(|_| {
            let mut s = index::sample(&mut rng, universe, set_size).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    Ok(GeneratedInstance {
        source: DistanceSource::Sets { metric, universe, sets },
        transforms: Vec::new(),
        matroid: matroid.build(n)?,
        scores: None,
        seed,
    })
}

/// All off-diagonal distances 1 under a rank-`k` uniform matroid.
pub fn integrality_gap(n: usize, k: usize) -> Result<GeneratedInstance> {
    if !(2..=n).contains(&k) {
        return Err(Error::param("integrality-gap family needs 2 <= k <= n"));
    }
    Ok(GeneratedInstance {
        source: DistanceSource::Explicit(DistanceMatrix::from_pairs(n, |_, _| 1.0)),
        transforms: Vec::new(),
        matroid: Matroid::uniform(n, k)?,
        scores: None,
        seed: 0,
    })
}

/// Fractional optimum `k²(n−1)/n` and integral optimum `k(k−1)` of the
/// integrality-gap family.
pub fn integrality_gap_values(n: usize, k: usize) -> (f64, f64) {
    let (n, k) = (n as f64, k as f64);
    (k * k * (n - 1.0) / n, k * (k - 1.0))
}

/// Distance 2 on edges and 1 elsewhere, raised to `log₂(n/(n−1))`, under
/// a rank-`k` uniform matroid. The best `k`-set is a densest `k`-subgraph.
pub fn dks_reduction(vertices: usize, edges: &[(usize, usize)], k: usize) -> Result<GeneratedInstance> {
    if vertices < 2 {
        return Err(Error::TooFewPoints(vertices));
    }
    let mut adj = vec![false; vertices * vertices];
    for &(u, v) in edges {
        if u >= vertices || v >= vertices {
            return Err(Error::ElementOutOfRange(u.max(v)));
        }
        if u == v {
            return Err(Error::param("self-loops are not allowed"));
        }
        adj[u * vertices + v] = true;
        adj[v * vertices + u] = true;
    }
    let d = DistanceMatrix::from_pairs(vertices, |i, j| if adj[i * vertices + j] { 2.0 } else { 1.0 });
    Ok(GeneratedInstance {
        source: DistanceSource::Explicit(d),
        transforms: vec![Transform::MetricPower],
        matroid: Matroid::uniform(vertices, k)?,
        scores: None,
        seed: 0,
    })
}

/// Erdős–Rényi edge list, pairs in lexicographic order.
pub fn random_graph<R: Rng + ?Sized>(vertices: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..vertices {
        for v in (u + 1)..vertices {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Uniform scores in `[0, scale)`.
pub fn random_scores<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| scale * rng.gen::<f64>()).collect()
}

/// Number of edges inside `set`.
pub fn induced_edges(edges: &[(usize, usize)], set: &[usize]) -> usize {
    edges.iter().filter(|(u, v)| set.contains(u) && set.contains(v)).count()
}
