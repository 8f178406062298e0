//! Deterministic mock provider for tests and desk-scale pipeline runs.
//!
//! Probe outcomes and image pixels are pure functions of the coordinate and
//! the mock seed, so runs are reproducible. The pano id encodes the
//! quantized coordinate, letting `fetch` regenerate the same image without
//! shared state.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svirisk_geo::Wgs84Point;

use crate::provider::{
    CaptureDate, ImageSize, ImageSource, ProbeResponse, ProbeStatus, Provider,
};
use crate::{ClientError, Result};

pub struct MockProvider {
    seed: u64,
    availability: f64,
    official_fraction: f64,
    month_choices: Vec<u8>,
    image_size: ImageSize,
    /// Remaining forced transport failures, consumed probe-first.
    pub transport_failures: AtomicUsize,
    pub probe_calls: AtomicUsize,
    pub fetch_calls: AtomicUsize,
}

impl MockProvider {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            availability: 1.0,
            official_fraction: 1.0,
            month_choices: (1..=12).collect(),
            image_size: ImageSize::ACQUISITION,
            transport_failures: AtomicUsize::new(0),
            probe_calls: AtomicUsize::new(0),
            fetch_calls: AtomicUsize::new(0),
        }
    }

    /// Probability that a coordinate has any imagery at all.
    pub fn with_availability(mut self, p: f64) -> Self {
        self.availability = p;
        self
    }

    /// Fraction of available imagery owned by the official source.
    pub fn with_official_fraction(mut self, p: f64) -> Self {
        self.official_fraction = p;
        self
    }

    /// Restricts reported capture months to the given set.
    pub fn with_months(mut self, months: &[u8]) -> Self {
        self.month_choices = months.to_vec();
        self
    }

    /// Serves images of a non-standard size, for integrity-check tests.
    pub fn with_image_size(mut self, size: ImageSize) -> Self {
        self.image_size = size;
        self
    }

    /// The next `n` calls fail with a retriable transport error.
    pub fn with_transport_failures(self, n: usize) -> Self {
        self.transport_failures.store(n, Ordering::SeqCst);
        self
    }

    fn coordinate_rng(&self, coordinate: &Wgs84Point) -> ChaCha8Rng {
        let (lat_q, lon_q) = quantize(coordinate);
        let mut hash = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        for v in [lat_q as u64, lon_q as u64] {
            hash ^= v;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            hash ^= hash >> 29;
        }
        ChaCha8Rng::seed_from_u64(hash)
    }

    fn take_transport_failure(&self) -> bool {
        self.transport_failures
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
            .is_ok()
    }
}

fn quantize(coordinate: &Wgs84Point) -> (i64, i64) {
    (
        (coordinate.lat * 1e6).round() as i64,
        (coordinate.lon * 1e6).round() as i64,
    )
}

fn pano_id_for(coordinate: &Wgs84Point) -> String {
    let (lat_q, lon_q) = quantize(coordinate);
    format!("mock_{lat_q}_{lon_q}")
}

fn coordinate_of_pano(pano_id: &str) -> Option<Wgs84Point> {
    let rest = pano_id.strip_prefix("mock_")?;
    let (lat_q, lon_q) = rest.split_once('_')?;
    Some(Wgs84Point::new(
        lat_q.parse::<i64>().ok()? as f64 / 1e6,
        lon_q.parse::<i64>().ok()? as f64 / 1e6,
    ))
}

impl Provider for MockProvider {
    fn probe(&self, coordinate: &Wgs84Point) -> Result<ProbeResponse> {
        self.probe_calls.fetch_add(1, Ordering::SeqCst);
        if self.take_transport_failure() {
            return Err(ClientError::Retriable("mock transport failure".into()));
        }
        let mut rng = self.coordinate_rng(coordinate);
        if rng.random_range(0.0..1.0) >= self.availability {
            return Ok(ProbeResponse::not_found());
        }
        let month = self.month_choices[rng.random_range(0..self.month_choices.len())];
        let source = if rng.random_range(0.0..1.0) < self.official_fraction {
            ImageSource::Official
        } else {
            ImageSource::ThirdParty
        };
        Ok(ProbeResponse {
            status: ProbeStatus::Ok,
            pano_id: Some(pano_id_for(coordinate)),
            capture_date: Some(CaptureDate { year: 2021, month }),
            source: Some(source),
        })
    }

    fn fetch(&self, pano_id: &str, size: ImageSize) -> Result<Vec<u8>> {
        self.fetch_calls.fetch_add(1, Ordering::SeqCst);
        if self.take_transport_failure() {
            return Err(ClientError::Retriable(
                "mock transport failure: 403 rate limited".into(),
            ));
        }
        let coordinate = coordinate_of_pano(pano_id)
            .ok_or_else(|| ClientError::Permanent(format!("unknown pano id {pano_id:?}")))?;
        let _ = size; // the mock ignores the requested size, like a misbehaving provider would
        Ok(render_mock_jpeg(&coordinate, self.image_size, self.seed))
    }
}

/// Renders a synthetic street-scene-like image whose color statistics vary
/// smoothly with latitude, so labels derived from geography are learnable.
pub fn render_mock_jpeg(coordinate: &Wgs84Point, size: ImageSize, seed: u64) -> Vec<u8> {
    // Normalize latitude over the Dutch range; clamp elsewhere.
    let t = ((coordinate.lat - 50.7) / (53.6 - 50.7)).clamp(0.0, 1.0);
    let base = [
        (40.0 + 180.0 * t) as u8,
        (200.0 - 140.0 * t) as u8,
        (90.0 + 60.0 * (1.0 - t)) as u8,
    ];
    let (lat_q, lon_q) = quantize(coordinate);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (lat_q as u64).rotate_left(17) ^ lon_q as u64);

    let mut img = image::RgbImage::new(size.width, size.height);
    let horizon = size.height / 2 + rng.random_range(0..size.height / 8);
    for y in 0..size.height {
        let sky = y < horizon;
        let row_noise: i16 = rng.random_range(-18..=18);
        for x in 0..size.width {
            let px_noise: i16 = ((x.wrapping_mul(2654435761) >> 24) % 13) as i16 - 6;
            let shade = |c: u8, extra: i16| -> u8 {
                (i16::from(c) + row_noise + px_noise + extra).clamp(0, 255) as u8
            };
            let p = if sky {
                [shade(140, 30), shade(170, 30), shade(220, 20)]
            } else {
                [shade(base[0], 0), shade(base[1], 0), shade(base[2], 0)]
            };
            img.put_pixel(x, y, image::Rgb(p));
        }
    }
    let mut bytes = Vec::new();
    let mut encoder = image::codecs::jpeg::JpegEncoder::new_with_quality(&mut bytes, 90);
    encoder
        .encode_image(&img)
        .expect("in-memory jpeg encoding cannot fail");
    bytes
}
