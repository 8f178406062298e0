//! Class-balanced geographic sampling.
//!
//! Builds an acquisition plan from a neighborhood registry (how many
//! neighborhoods per risk class and how many images each), samples
//! coordinates uniformly inside neighborhood polygons, retries failed
//! probes up to a fixed budget, and replaces neighborhoods that exhaust
//! their budget with same-class alternatives.

pub mod dispersion;
pub mod points;
pub mod quota;
pub mod select;

pub use dispersion::{dispersion_diagnostic, DispersionOutcome, DispersionReport};
pub use points::{
    acquire_with_retry, plan_sample_points, run_acquisition_campaign, sample_point_in_geometry,
    sample_point_in_polygon, AcquisitionOutcome, CampaignResult, RetryPolicy, SamplePoint,
    SampleStatus,
};
pub use quota::{quota_for_class, ClassQuota, QuotaPlan};
pub use select::{neighborhood_rng, resample_replacements, select_neighborhoods, Selection};

/// Errors from planning and sampling.
#[derive(Debug, thiserror::Error)]
pub enum SamplerError {
    #[error("planning error: {0}")]
    Planning(String),
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("replacement pool exhausted for class {class}: need {needed}, have {available} (shortfall {shortfall})")]
    ReplacementShortfall {
        class: String,
        needed: usize,
        available: usize,
        shortfall: usize,
    },
    #[error("invalid input: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, SamplerError>;
