use alloc::vec::Vec;

use crate::geometry::{self, DistanceMatrix, NegTypeCertificate, SchoenbergForm};
use crate::matroid::{indicator, Matroid};
use crate::{Error, Result};

/// Distances, a matroid over the same ground set, and optional nonnegative
/// linear scores. The objective is `g(x) = xᵀDx + wᵀx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    distance: DistanceMatrix,
    matroid: Matroid,
    scores: Option<Vec<f64>>,
}

impl Instance {
    pub fn new(distance: DistanceMatrix, matroid: Matroid, scores: Option<Vec<f64>>) -> Result<Self> {
        let n = distance.n();
        if matroid.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matroid.n(),
            });
        }
        if let Some(w) = &scores {
            if w.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: w.len(),
                });
            }
            if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::param("scores must be finite and nonnegative"));
            }
        }
        Ok(Self {
            distance,
            matroid,
            scores,
        })
    }

    pub fn n(&self) -> usize {
        self.distance.n()
    }

    pub fn distance(&self) -> &DistanceMatrix {
        &self.distance
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn scores(&self) -> Option<&[f64]> {
        self.scores.as_deref()
    }

    pub fn with_scores(mut self, scores: Option<Vec<f64>>) -> Result<Self> {
        self.scores = scores;
        Self::new(self.distance, self.matroid, self.scores)
    }

    /// `g(x)`; panics on a length mismatch.
    pub fn value(&self, x: &[f64]) -> f64 {
        geometry::dispersion(&self.distance, x, self.scores()).expect("x has one entry per element")
    }

    /// `xᵀDx` only.
    pub fn quadratic_value(&self, x: &[f64]) -> f64 {
        geometry::dispersion(&self.distance, x, None).expect("x has one entry per element")
    }

    pub fn set_value(&self, set: &[usize]) -> f64 {
        self.value(&indicator(self.n(), set))
    }
}

/// An instance together with its Schoenberg form and certificate.
///
/// Built by [`Problem::certify`], which refuses distances that are not of
/// negative type; [`Problem::assume_negative_type`] skips that refusal and
/// voids every guarantee.
#[derive(Debug, Clone)]
pub struct Problem {
    instance: Instance,
    form: SchoenbergForm,
    certificate: NegTypeCertificate,
}

impl Problem {
    pub fn certify(instance: Instance) -> Result<Self> {
        let p = Self::assume_negative_type(instance);
        if !p.certificate.is_negative_type() {
            return Err(Error::NotNegativeType(p.certificate.min_eigenvalue));
        }
        Ok(p)
    }

    pub fn assume_negative_type(instance: Instance) -> Self {
        let form = SchoenbergForm::new(instance.distance(), 0).expect("ground set is nonempty");
        let certificate = geometry::certify_form(instance.distance(), &form);
        Self {
            instance,
            form,
            certificate,
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn form(&self) -> &SchoenbergForm {
        &self.form
    }

    pub fn certificate(&self) -> &NegTypeCertificate {
        &self.certificate
    }

    pub fn distance(&self) -> &DistanceMatrix {
        self.instance.distance()
    }

    pub fn matroid(&self) -> &Matroid {
        self.instance.matroid()
    }

    pub fn scores(&self) -> Option<&[f64]> {
        self.instance.scores()
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    pub fn rank(&self) -> usize {
        self.matroid().full_rank()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.instance.value(x)
    }
}
