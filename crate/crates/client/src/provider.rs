//! Provider contract and metadata filtering.

use serde::{Deserialize, Serialize};
use svirisk_geo::Wgs84Point;

use crate::{ClientError, Result};

/// Acquisition image size. Fixed at 512x512 for dataset collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

impl ImageSize {
    pub const ACQUISITION: ImageSize = ImageSize { width: 512, height: 512 };

    pub fn label(&self) -> String {
        format!("{}x{}", self.width, self.height)
    }
}

/// A request for one image. Heading and field of view are intentionally
/// absent: the provider default is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRequest {
    pub coordinate: Wgs84Point,
    pub size: ImageSize,
}

impl ImageRequest {
    pub fn at(coordinate: Wgs84Point) -> Self {
        Self { coordinate, size: ImageSize::ACQUISITION }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageSource {
    Official,
    ThirdParty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeStatus {
    Ok,
    NotFound,
}

/// Capture year and month as reported by the provider ("YYYY-MM").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureDate {
    pub year: i32,
    pub month: u8,
}

impl CaptureDate {
    pub fn parse(s: &str) -> Result<CaptureDate> {
        let (year, month) = s
            .split_once('-')
            .ok_or_else(|| ClientError::Permanent(format!("bad capture date {s:?}")))?;
        let year: i32 = year
            .parse()
            .map_err(|_| ClientError::Permanent(format!("bad capture year in {s:?}")))?;
        let month: u8 = month
            .parse()
            .map_err(|_| ClientError::Permanent(format!("bad capture month in {s:?}")))?;
        if !(1..=12).contains(&month) {
            return Err(ClientError::Permanent(format!("month out of range in {s:?}")));
        }
        Ok(CaptureDate { year, month })
    }
}

impl std::fmt::Display for CaptureDate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// Raw probe response before filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResponse {
    pub status: ProbeStatus,
    pub pano_id: Option<String>,
    pub capture_date: Option<CaptureDate>,
    pub source: Option<ImageSource>,
}

impl ProbeResponse {
    pub fn not_found() -> Self {
        Self { status: ProbeStatus::NotFound, pano_id: None, capture_date: None, source: None }
    }
}

/// Metadata of an acquirable image: probe succeeded, the source is official
/// and the capture month is inside the configured window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageMetadata {
    pub pano_id: String,
    pub capture_date: CaptureDate,
    pub source: ImageSource,
}

/// Months of the year (inclusive) during which imagery is acceptable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthWindow {
    pub first_month: u8,
    pub last_month: u8,
}

impl MonthWindow {
    /// May through September.
    pub const GREEN: MonthWindow = MonthWindow { first_month: 5, last_month: 9 };

    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.first_month && self.first_month <= self.last_month && self.last_month <= 12)
        {
            return Err(ClientError::Permanent(format!(
                "invalid month window {}-{}",
                self.first_month, self.last_month
            )));
        }
        Ok(())
    }

    pub fn contains(&self, month: u8) -> bool {
        (self.first_month..=self.last_month).contains(&month)
    }
}

impl Default for MonthWindow {
    fn default() -> Self {
        Self::GREEN
    }
}

/// The two-method provider contract. Implementations must be safe for
/// concurrent use.
pub trait Provider: Send + Sync {
    /// Raw metadata lookup near a coordinate.
    fn probe(&self, coordinate: &Wgs84Point) -> Result<ProbeResponse>;
    /// Image bytes (JPEG) for a previously probed panorama.
    fn fetch(&self, pano_id: &str, size: ImageSize) -> Result<Vec<u8>>;
}

/// Applies the acquisition filter to a raw probe response: only `ok` probes
/// of official imagery captured inside the window are acquirable.
pub fn filter_probe(response: &ProbeResponse, window: &MonthWindow) -> Option<ImageMetadata> {
    if response.status != ProbeStatus::Ok {
        return None;
    }
    let pano_id = response.pano_id.clone()?;
    let capture_date = response.capture_date?;
    let source = response.source?;
    if source != ImageSource::Official || !window.contains(capture_date.month) {
        return None;
    }
    Some(ImageMetadata { pano_id, capture_date, source })
}
