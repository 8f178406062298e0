//! Neighborhood-level health statistics and geometry.
//!
//! This crate ingests per-neighborhood mental-health survey data together
//! with polygon geometry, scores questionnaire responses, discretizes the
//! continuous risk percentage into ordinal classes, and reprojects Dutch
//! RD (EPSG:28992) coordinates to WGS84 (EPSG:4326).

pub mod geometry;
pub mod ingest;
pub mod kessler;
pub mod reproject;
pub mod risk;

pub use geometry::{PolygonGeom, Ring, Wgs84Point};
pub use ingest::{merge_health_geometry, HealthRow, MergeOutcome, NeighborhoodRecord};
pub use kessler::{kessler_high_risk, neighborhood_risk_percent, KesslerSpec};
pub use reproject::{rd_to_wgs84, wgs84_to_rd, RdPoint};
pub use risk::{discretize_risk, RiskBins, RiskClass};

/// Errors produced while validating or transforming neighborhood data.
#[derive(Debug, thiserror::Error)]
pub enum GeoError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("coordinate outside the supported domain: {0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),
    #[error("geojson parse error: {0}")]
    GeoJson(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
