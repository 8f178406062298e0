//! Street-view imagery client.
//!
//! A two-method provider contract (probe metadata, fetch image bytes) with a
//! deterministic mock for tests and an HTTP implementation for production.
//! The client layers month/source filtering, transport retries, a shared
//! rate limiter and an on-disk image cache on top of the provider.

pub mod cache;
pub mod client;
pub mod http;
pub mod mock;
pub mod provider;
pub mod rate_limit;

pub use cache::ImageCache;
pub use client::{CachedImage, SviClient, TransportRetry};
pub use http::{HttpProvider, HttpProviderConfig};
pub use mock::MockProvider;
pub use provider::{
    CaptureDate, ImageMetadata, ImageRequest, ImageSize, ImageSource, MonthWindow, ProbeResponse,
    ProbeStatus, Provider,
};
pub use rate_limit::{rate_limited_execute, RateLimiter};

/// Client errors. Retriable failures are transient transport conditions
/// that are retried with backoff without consuming the caller's probe
/// budget; permanent failures are configuration or integrity defects.
#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("retriable transport error: {0}")]
    Retriable(String),
    #[error("{0}")]
    Permanent(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl ClientError {
    pub fn is_retriable(&self) -> bool {
        matches!(self, ClientError::Retriable(_))
    }
}

pub type Result<T> = std::result::Result<T, ClientError>;
