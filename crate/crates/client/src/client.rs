//! The client proper: provider + transport retries + rate limiting + cache.

use std::path::PathBuf;
use std::time::Duration;

use svirisk_geo::Wgs84Point;

use crate::cache::ImageCache;
use crate::provider::{
    filter_probe, ImageMetadata, ImageSize, MonthWindow, Provider,
};
use crate::rate_limit::RateLimiter;
use crate::{ClientError, Result};

/// Retry policy for transient transport failures. These retries live below
/// the sampler's attempt budget: a transient failure never counts as an
/// "absent" probe.
#[derive(Debug, Clone, Copy)]
pub struct TransportRetry {
    pub max_retries: u32,
    pub base_backoff: Duration,
}

impl TransportRetry {
    pub const STANDARD: TransportRetry = TransportRetry {
        max_retries: 3,
        base_backoff: Duration::from_secs(1),
    };

    /// Immediate retries for tests.
    pub fn instant() -> Self {
        Self { max_retries: 3, base_backoff: Duration::from_millis(1) }
    }
}

impl Default for TransportRetry {
    fn default() -> Self {
        Self::STANDARD
    }
}

#[derive(Debug)]
pub struct CachedImage {
    pub path: PathBuf,
    pub from_cache: bool,
}

pub struct SviClient<P: Provider> {
    provider: P,
    limiter: RateLimiter,
    cache: ImageCache,
    retry: TransportRetry,
    window: MonthWindow,
}

impl<P: Provider> SviClient<P> {
    pub fn new(
        provider: P,
        cache: ImageCache,
        limit_per_second: f64,
        window: MonthWindow,
    ) -> Self {
        Self {
            provider,
            limiter: RateLimiter::new(limit_per_second),
            cache,
            retry: TransportRetry::STANDARD,
            window,
        }
    }

    pub fn with_retry(mut self, retry: TransportRetry) -> Self {
        self.retry = retry;
        self
    }

    pub fn provider(&self) -> &P {
        &self.provider
    }

    pub fn window(&self) -> MonthWindow {
        self.window
    }

    fn with_transport_retry<T>(&self, mut op: impl FnMut() -> Result<T>) -> Result<T> {
        let mut backoff = self.retry.base_backoff;
        let mut attempt = 0;
        loop {
            match op() {
                Err(e) if e.is_retriable() && attempt < self.retry.max_retries => {
                    attempt += 1;
                    std::thread::sleep(backoff);
                    backoff *= 2;
                }
                other => return other,
            }
        }
    }

    /// Probes metadata at a coordinate. `Ok(None)` means no acquirable
    /// imagery (missing, wrong source, or out-of-window month); transport
    /// failures surface as retriable errors after the internal retries.
    pub fn probe_metadata(&self, coordinate: &Wgs84Point) -> Result<Option<ImageMetadata>> {
        self.window.validate()?;
        let response = self.with_transport_retry(|| {
            self.limiter.acquire();
            self.provider.probe(coordinate)
        })?;
        Ok(filter_probe(&response, &self.window))
    }

    /// Fetches one image, serving repeats from the cache. The decoded image
    /// must match the requested dimensions exactly.
    pub fn fetch_image(&self, metadata: &ImageMetadata, size: ImageSize) -> Result<CachedImage> {
        if let Some(path) = self.cache.lookup(&metadata.pano_id, size) {
            return Ok(CachedImage { path, from_cache: true });
        }
        let bytes = self.with_transport_retry(|| {
            self.limiter.acquire();
            self.provider.fetch(&metadata.pano_id, size)
        })?;
        let decoded = image::load_from_memory(&bytes)
            .map_err(|e| ClientError::Permanent(format!("undecodable image: {e}")))?;
        if decoded.width() != size.width || decoded.height() != size.height {
            return Err(ClientError::Permanent(format!(
                "integrity: expected {}, got {}x{}",
                size.label(),
                decoded.width(),
                decoded.height()
            )));
        }
        let path = self.cache.store(metadata, size, &bytes)?;
        Ok(CachedImage { path, from_cache: false })
    }
}
