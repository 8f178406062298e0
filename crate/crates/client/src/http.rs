//! HTTP provider for the real imagery service.
//!
//! Endpoint URLs and parameter names are configurable; the API key is read
//! from the `SVI_API_KEY` environment variable and never logged.

use serde::Deserialize;
use svirisk_geo::Wgs84Point;

use crate::provider::{
    CaptureDate, ImageSize, ImageSource, ProbeResponse, ProbeStatus, Provider,
};
use crate::{ClientError, Result};

pub const API_KEY_ENV: &str = "SVI_API_KEY";

#[derive(Debug, Clone, Deserialize)]
pub struct HttpProviderConfig {
    /// Metadata endpoint returning JSON with `status`, `date`, `copyright`
    /// and `pano_id` fields.
    pub metadata_url: String,
    /// Image endpoint returning JPEG bytes.
    pub image_url: String,
    /// Substring of `copyright` that marks first-party imagery.
    #[serde(default = "default_official_marker")]
    pub official_marker: String,
}

fn default_official_marker() -> String {
    "Google".to_string()
}

pub struct HttpProvider {
    config: HttpProviderConfig,
    api_key: String,
    agent: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct MetadataBody {
    status: String,
    #[serde(default)]
    pano_id: Option<String>,
    #[serde(default)]
    date: Option<String>,
    #[serde(default)]
    copyright: Option<String>,
}

impl HttpProvider {
    pub fn new(config: HttpProviderConfig) -> Result<Self> {
        let api_key = std::env::var(API_KEY_ENV).map_err(|_| {
            ClientError::Permanent(format!("{API_KEY_ENV} is not set"))
        })?;
        let agent = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(30))
            .build()
            .map_err(|e| ClientError::Permanent(format!("http client: {e}")))?;
        Ok(Self { config, api_key, agent })
    }
}

impl Provider for HttpProvider {
    fn probe(&self, coordinate: &Wgs84Point) -> Result<ProbeResponse> {
        let response = self
            .agent
            .get(&self.config.metadata_url)
            .query(&[
                ("location", format!("{},{}", coordinate.lat, coordinate.lon)),
                ("key", self.api_key.clone()),
            ])
            .send()
            .map_err(|e| ClientError::Retriable(format!("metadata request: {e}")))?;
        if !response.status().is_success() {
            return Err(ClientError::Retriable(format!(
                "metadata endpoint returned {}",
                response.status()
            )));
        }
        let body: MetadataBody = response
            .json()
            .map_err(|e| ClientError::Retriable(format!("metadata body: {e}")))?;

        if body.status != "OK" {
            return Ok(ProbeResponse::not_found());
        }
        let capture_date = match &body.date {
            Some(d) => Some(CaptureDate::parse(d)?),
            None => None,
        };
        let source = body.copyright.as_deref().map(|c| {
            if c.contains(&self.config.official_marker) {
                ImageSource::Official
            } else {
                ImageSource::ThirdParty
            }
        });
        Ok(ProbeResponse {
            status: ProbeStatus::Ok,
            pano_id: body.pano_id,
            capture_date,
            source,
        })
    }

    fn fetch(&self, pano_id: &str, size: ImageSize) -> Result<Vec<u8>> {
        let response = self
            .agent
            .get(&self.config.image_url)
            .query(&[
                ("pano", pano_id.to_string()),
                ("size", size.label()),
                ("key", self.api_key.clone()),
            ])
            .send()
            .map_err(|e| ClientError::Retriable(format!("image request: {e}")))?;
        let status = response.status();
        if !status.is_success() {
            return Err(ClientError::Retriable(format!(
                "image endpoint returned {status}"
            )));
        }
        let bytes = response
            .bytes()
            .map_err(|e| ClientError::Retriable(format!("image body: {e}")))?;
        Ok(bytes.to_vec())
    }
}
