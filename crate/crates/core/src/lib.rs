//! Max-sum diversification under matroid constraints for distance spaces of
//! negative type.
//!
//! The pipeline is: certify the distance ([`geometry`]), solve one concave
//! program per slice `‖x‖₁ = α` over the matroid polytope ([`relaxation`]),
//! lift the best fractional point to the base polytope and round it with the
//! chain-of-tight-sets procedure ([`rounding`]). [`baselines`] and [`lab`]
//! provide exact oracles, comparison heuristics and instance generators.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod baselines;
mod error;
pub mod geometry;
pub mod lab;
pub mod matroid;
pub mod problem;
pub mod relaxation;
pub mod rounding;

pub use error::{Error, Result};
pub use geometry::{DistanceMatrix, DistanceSource, NegTypeCertificate, SchoenbergForm, Transform, Verdict};
pub use matroid::{Matroid, MatroidKind};
pub use problem::{Instance, Problem};
pub use relaxation::{RelaxationResult, SliceOptions, SliceSolution};
pub use rounding::{ChainState, RoundOptions, RoundingResult, RoundingTrace};

/// Numerical tolerances shared across modules.
pub mod tol {
    /// Relative factor for the PSD test: `τ_psd = PSD_REL · (1 + ‖Q‖_∞)`.
    pub const PSD_REL: f64 = 1e-8;
    /// Relative tolerance for floating comparisons of objective values.
    pub const NUM: f64 = 1e-9;
    /// Triangle inequality tolerance for the metric check.
    pub const METRIC: f64 = 1e-9;
    /// Absolute tolerance for tight sets and snapping to 0/1 during rounding.
    pub const TIGHT: f64 = 1e-7;
    /// Largest window scanned by brute force for oracle-only matroids.
    pub const WINDOW_MAX: usize = 20;
}

/// The approximation factor `1 − (4 + 2 ln k)/k` of the rounding procedure.
///
/// Returns a non-positive number for small `k`, where the guarantee is vacuous.
pub fn guarantee_factor(k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = k as f64;
    1.0 - (4.0 + 2.0 * libm::log(k)) / k
}
