//! Discretization of the continuous neighborhood risk percentage.

use crate::{GeoError, Result};
use serde::{Deserialize, Serialize};

/// Ordinal risk class, lowest to highest. The top two source intervals are
/// merged into a single class, so four classes remain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskClass {
    VeryLow,
    Low,
    Moderate,
    HighVeryHigh,
}

impl RiskClass {
    pub const ALL: [RiskClass; 4] = [
        RiskClass::VeryLow,
        RiskClass::Low,
        RiskClass::Moderate,
        RiskClass::HighVeryHigh,
    ];

    pub fn index(self) -> usize {
        match self {
            RiskClass::VeryLow => 0,
            RiskClass::Low => 1,
            RiskClass::Moderate => 2,
            RiskClass::HighVeryHigh => 3,
        }
    }

    pub fn from_index(index: usize) -> Result<RiskClass> {
        Self::ALL
            .get(index)
            .copied()
            .ok_or_else(|| GeoError::Validation(format!("class index out of range: {index}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            RiskClass::VeryLow => "very_low",
            RiskClass::Low => "low",
            RiskClass::Moderate => "moderate",
            RiskClass::HighVeryHigh => "high_very_high",
        }
    }
}

impl std::fmt::Display for RiskClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Uniform binning of the risk percentage over the observed data range.
///
/// Five equal-width intervals over `[1.0, 22.9]`; the top two are merged
/// when mapping to [`RiskClass`]. Values beyond the data range clamp to the
/// nearest class since the range is data-derived, not a logical bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskBins {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub bin_count: usize,
}

impl RiskBins {
    pub const STANDARD: RiskBins = RiskBins {
        lower_bound: 1.0,
        upper_bound: 22.9,
        bin_count: 5,
    };

    pub fn width(&self) -> f64 {
        (self.upper_bound - self.lower_bound) / self.bin_count as f64
    }

    /// Bin edges `lower + k * width` for `k in 0..=bin_count`.
    pub fn edges(&self) -> Vec<f64> {
        (0..=self.bin_count)
            .map(|k| self.lower_bound + k as f64 * self.width())
            .collect()
    }
}

impl Default for RiskBins {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// Maps a risk percentage to its ordinal class.
///
/// Bins are left-open/right-closed so every 2-decimal value lands exactly on
/// the printed interval: `<=5.38` very_low, `<=9.76` low, `<=14.14` moderate,
/// above that the merged top class.
pub fn discretize_risk(percent: f64) -> Result<RiskClass> {
    if !percent.is_finite() || percent < 0.0 {
        return Err(GeoError::Validation(format!(
            "risk percent must be finite and non-negative, got {percent}"
        )));
    }
    Ok(if percent <= 5.38 {
        RiskClass::VeryLow
    } else if percent <= 9.76 {
        RiskClass::Low
    } else if percent <= 14.14 {
        RiskClass::Moderate
    } else {
        RiskClass::HighVeryHigh
    })
}
