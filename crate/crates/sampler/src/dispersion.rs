//! Nearest-neighbor dispersion diagnostic for sampled coordinates.
//!
//! Computes a Clark-Evans style ratio: observed mean nearest-neighbor
//! distance over the expectation for uniform points in the same area.
//! Ratios well below 1 indicate clustered sampling; the neighborhood is
//! flagged when the ratio falls under the threshold.

use serde::{Deserialize, Serialize};
use svirisk_geo::geometry::PolygonGeom;
use svirisk_geo::Wgs84Point;

pub const DEFAULT_FLAG_THRESHOLD: f64 = 0.7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    pub point_count: usize,
    pub mean_nn_distance: f64,
    pub expected_nn_distance: f64,
    pub ratio: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum DispersionOutcome {
    Skipped { notice: String },
    Report(DispersionReport),
}

/// Evaluates the dispersion of sampled points within their polygon.
///
/// Longitudes are rescaled by the cosine of the mean latitude so distances
/// are locally isotropic; the polygon area uses the same scaling.
pub fn dispersion_diagnostic(
    points: &[Wgs84Point],
    polygons: &[PolygonGeom],
    threshold: f64,
) -> DispersionOutcome {
    if points.len() < 2 {
        return DispersionOutcome::Skipped {
            notice: format!("need at least 2 points, got {}", points.len()),
        };
    }

    let mean_lat = points.iter().map(|p| p.lat).sum::<f64>() / points.len() as f64;
    let lon_scale = mean_lat.to_radians().cos();
    let scaled: Vec<(f64, f64)> = points.iter().map(|p| (p.lon * lon_scale, p.lat)).collect();

    let mut nn_sum = 0.0;
    for (i, &(xi, yi)) in scaled.iter().enumerate() {
        let mut best = f64::INFINITY;
        for (j, &(xj, yj)) in scaled.iter().enumerate() {
            if i != j {
                let d = ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt();
                best = best.min(d);
            }
        }
        nn_sum += best;
    }
    let mean_nn = nn_sum / points.len() as f64;

    let area: f64 = polygons.iter().map(|p| scaled_area(p, lon_scale)).sum();
    let expected = 0.5 * (area / points.len() as f64).sqrt();
    let ratio = if expected > 0.0 {
        mean_nn / expected
    } else if mean_nn == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };

    DispersionOutcome::Report(DispersionReport {
        point_count: points.len(),
        mean_nn_distance: mean_nn,
        expected_nn_distance: expected,
        ratio,
        flagged: ratio < threshold,
    })
}

fn scaled_area(polygon: &PolygonGeom, lon_scale: f64) -> f64 {
    let mut total = 0.0;
    for (i, ring) in polygon.rings.iter().enumerate() {
        let mut acc = 0.0;
        for w in ring.windows(2) {
            let (x1, y1) = (w[0].lon * lon_scale, w[0].lat);
            let (x2, y2) = (w[1].lon * lon_scale, w[1].lat);
            acc += x1 * y2 - x2 * y1;
        }
        let a = (acc / 2.0).abs();
        if i == 0 {
            total += a;
        } else {
            total -= a;
        }
    }
    total.max(0.0)
}
