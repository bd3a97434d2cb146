//! Benchmark generator and evaluation toolkit for correlation-structure
//! discovery in multivariate time series.
//!
//! The crate synthesizes labelled regime-switching datasets with prescribed
//! pairwise correlation structures under controlled degradations
//! (distribution shift, sparsification, downsampling), injects calibrated
//! clustering errors, and scores arbitrary clustering results against
//! reference thresholds.

pub mod datagen;
pub mod degrade;
pub mod estimators;
pub mod evaluation;
pub mod io;
pub mod matrix;
pub mod patterns;
pub mod reference;
pub mod stats;

mod dist;

pub use datagen::{GenerationConfig, SegmentPlan, SubjectDataset, SubjectDistributionParams};
pub use degrade::{Clustering, DegradationSuite, Provenance};
pub use evaluation::{DistanceSpec, EvaluationReport};
pub use patterns::{CanonicalPattern, CorrelationVector, ToleranceBands};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pattern {0} is not modelled (no PSD relaxation exists)")]
    UnmodelledPattern(usize),
    #[error("canonical coefficient must be -1, 0 or 1, got {0}")]
    InvalidCanonicalCoefficient(f64),
    #[error("segment plan infeasible: {n_segments} segments cannot give every one of {n_patterns} patterns 4-5 uses")]
    InfeasiblePlan {
        n_segments: usize,
        n_patterns: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "segment {segment_id} has {n_obs} observations, need at least 3 to estimate correlation"
    )]
    SegmentTooShort { segment_id: usize, n_obs: usize },
    #[error("column {0} has zero variance")]
    ZeroVariance(usize),
    #[error("block too short: {0} rows, need at least 3")]
    BlockTooShort(usize),
    #[error("non-finite value in column {0}")]
    NonFinite(usize),
    #[error("boundary shift {k} outside valid range [0, {max}]")]
    ShiftOutOfRange { k: usize, max: usize },
    #[error("misassignment count {m} outside valid range [0, {max}]")]
    MisassignOutOfRange { m: usize, max: usize },
    #[error("reduction fraction must be 0.5 or 0.25, got {0}")]
    InvalidFraction(f64),
    #[error("clustering needs at least 2 clusters, found {0}")]
    SingleCluster(usize),
    #[error("candidate covers {candidate} observations, ground truth {ground_truth}")]
    CoverageMismatch {
        candidate: usize,
        ground_truth: usize,
    },
    #[error("empty candidate clustering")]
    EmptyClustering,
    #[error("expected stage {expected}, got {got}")]
    WrongStage { expected: String, got: String },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("paired samples differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("all differences below threshold, nothing to test")]
    AllDifferencesDiscarded,
    #[error("sample too small: {0} pairs after discarding, need at least 5")]
    SampleTooSmall(usize),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: label span [{start}, {end}] does not match data rows ({detail})")]
    LabelSpanMismatch {
        path: String,
        start: i64,
        end: i64,
        detail: String,
    },
    #[error("{path}: timestamps not strictly increasing at row {row}")]
    NonMonotoneTimestamps { path: String, row: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
