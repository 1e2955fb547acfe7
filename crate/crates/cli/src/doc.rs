//! The JSON instance document.

use divmax_core::geometry::{apply_transforms, PointMetric, SetMetric};
use divmax_core::lab::GeneratedInstance;
use divmax_core::{DistanceMatrix, DistanceSource, Instance, Matroid, MatroidKind, Transform};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub schema_version: u32,
    pub n: usize,
    pub distance: DistanceDoc,
    pub matroid: MatroidDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceDoc {
    #[serde(flatten)]
    pub source: SourceDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transforms: Vec<TransformDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceDoc {
    L1 {
        points: Vec<Vec<f64>>,
    },
    L2 {
        points: Vec<Vec<f64>>,
    },
    Lp {
        p: f64,
        points: Vec<Vec<f64>>,
    },
    Cosine {
        points: Vec<Vec<f64>>,
    },
    Jaccard {
        universe: usize,
        sets: Vec<Vec<usize>>,
    },
    Dice {
        universe: usize,
        sets: Vec<Vec<usize>>,
    },
    SimpleMatching {
        universe: usize,
        sets: Vec<Vec<usize>>,
    },
    RussellRao {
        universe: usize,
        sets: Vec<Vec<usize>>,
    },
    /// Row-major `n × n` matrix.
    Explicit {
        matrix: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformDoc {
    Power { exponent: f64 },
    Ratio,
    Log1p,
    ExpDecay { lambda: f64 },
    MetricPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatroidDoc {
    Uniform {
        k: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    /// `ranks[mask]` is the rank of the subset with bitmask `mask`.
    ExplicitRank {
        ranks: Vec<u32>,
    },
}

impl From<Transform> for TransformDoc {
    fn from(t: Transform) -> Self {
        match t {
            Transform::Power(exponent) => TransformDoc::Power { exponent },
            Transform::Ratio => TransformDoc::Ratio,
            Transform::Log1p => TransformDoc::Log1p,
            Transform::ExpDecay(lambda) => TransformDoc::ExpDecay { lambda },
            Transform::MetricPower => TransformDoc::MetricPower,
        }
    }
}

impl From<TransformDoc> for Transform {
    fn from(t: TransformDoc) -> Self {
        match t {
            TransformDoc::Power { exponent } => Transform::Power(exponent),
            TransformDoc::Ratio => Transform::Ratio,
            TransformDoc::Log1p => Transform::Log1p,
            TransformDoc::ExpDecay { lambda } => Transform::ExpDecay(lambda),
            TransformDoc::MetricPower => Transform::MetricPower,
        }
    }
}

impl SourceDoc {
    fn to_source(&self, n: usize) -> Result<DistanceSource, CliError> {
        let points = |metric, points: &Vec<Vec<f64>>| DistanceSource::Points {
            metric,
            points: points.clone(),
        };
        let sets = |metric, universe: usize, sets: &Vec<Vec<usize>>| DistanceSource::Sets {
            metric,
            universe,
            sets: sets.clone(),
        };
        Ok(match self {
            SourceDoc::L1 { points: p } => points(PointMetric::L1, p),
            SourceDoc::L2 { points: p } => points(PointMetric::L2, p),
            SourceDoc::Lp { p, points: pts } => points(PointMetric::Lp(*p), pts),
            SourceDoc::Cosine { points: p } => points(PointMetric::Cosine, p),
            SourceDoc::Jaccard { universe, sets: s } => sets(SetMetric::Jaccard, *universe, s),
            SourceDoc::Dice { universe, sets: s } => sets(SetMetric::Dice, *universe, s),
            SourceDoc::SimpleMatching { universe, sets: s } => sets(SetMetric::SimpleMatching, *universe, s),
            SourceDoc::RussellRao { universe, sets: s } => sets(SetMetric::RussellRao, *universe, s),
            SourceDoc::Explicit { matrix } => {
                DistanceSource::Explicit(DistanceMatrix::from_row_major(n, matrix.clone())?)
            }
        })
    }

    fn from_source(source: &DistanceSource) -> Self {
        match source {
            DistanceSource::Points { metric, points } => {
                let points = points.clone();
                match *metric {
                    PointMetric::L1 => SourceDoc::L1 { points },
                    PointMetric::L2 => SourceDoc::L2 { points },
                    PointMetric::Lp(p) => SourceDoc::Lp { p, points },
                    PointMetric::Cosine => SourceDoc::Cosine { points },
                }
            }
            DistanceSource::Sets { metric, universe, sets } => {
                let (universe, sets) = (*universe, sets.clone());
                match metric {
                    SetMetric::Jaccard => SourceDoc::Jaccard { universe, sets },
                    SetMetric::Dice => SourceDoc::Dice { universe, sets },
                    SetMetric::SimpleMatching => SourceDoc::SimpleMatching { universe, sets },
                    SetMetric::RussellRao => SourceDoc::RussellRao { universe, sets },
                }
            }
            DistanceSource::Explicit(d) => SourceDoc::Explicit {
                matrix: d.as_row_major().to_vec(),
            },
        }
    }
}

impl MatroidDoc {
    pub fn to_matroid(&self, n: usize) -> Result<Matroid, CliError> {
        let m = match self {
            MatroidDoc::Uniform { k } => Matroid::uniform(n, *k)?,
            MatroidDoc::Partition { blocks, capacities } => Matroid::partition(n, blocks.clone(), capacities.clone())?,
            MatroidDoc::Graphic { vertices, edges } => Matroid::graphic(*vertices, edges.clone())?,
            MatroidDoc::ExplicitRank { ranks } => Matroid::explicit_rank(n, ranks.clone())?,
        };
        if m.n() != n {
            return Err(CliError::Invalid(format!(
                "matroid has {} elements, instance has {n}",
                m.n()
            )));
        }
        Ok(m)
    }

    pub fn from_matroid(m: &Matroid) -> Self {
        match m.kind() {
            MatroidKind::Uniform { k } => MatroidDoc::Uniform { k: *k },
            MatroidKind::Partition { blocks, capacities } => MatroidDoc::Partition {
                blocks: blocks.clone(),
                capacities: capacities.clone(),
            },
            MatroidKind::Graphic { vertices, edges } => MatroidDoc::Graphic {
                vertices: *vertices,
                edges: edges.clone(),
            },
            MatroidKind::ExplicitRank { table } => MatroidDoc::ExplicitRank { ranks: table.clone() },
        }
    }
}

impl InstanceDoc {
    pub fn from_generated(g: &GeneratedInstance) -> Self {
        InstanceDoc {
            schema_version: SCHEMA_VERSION,
            n: g.matroid.n(),
            distance: DistanceDoc {
                source: SourceDoc::from_source(&g.source),
                transforms: g.transforms.iter().map(|&t| t.into()).collect(),
            },
            matroid: MatroidDoc::from_matroid(&g.matroid),
            scores: g.scores.clone(),
            seed: Some(g.seed),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let source = self.distance.source.to_source(self.n)?;
        if source.len() != self.n {
            return Err(CliError::Invalid(format!(
                "distance has {} elements, n is {}",
                source.len(),
                self.n
            )));
        }
        let transforms: Vec<Transform> = self.distance.transforms.iter().map(|&t| t.into()).collect();
        let d = apply_transforms(&source.build()?, &transforms)?;
        let m = self.matroid.to_matroid(self.n)?;
        Ok(Instance::new(d, m, self.scores.clone())?)
    }
}
