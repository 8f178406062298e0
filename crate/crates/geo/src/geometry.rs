//! Polygon geometry in WGS84 coordinates.

use crate::{GeoError, Result};
use serde::{Deserialize, Serialize};

/// Latitude/longitude in degrees (EPSG:4326).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wgs84Point {
    pub lat: f64,
    pub lon: f64,
}

impl Wgs84Point {
    pub fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }

    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }
}

/// A closed ring of vertices; the first vertex equals the last.
pub type Ring = Vec<Wgs84Point>;

/// One polygon: an outer ring followed by zero or more hole rings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonGeom {
    pub rings: Vec<Ring>,
}

impl PolygonGeom {
    pub fn new(rings: Vec<Ring>) -> Self {
        Self { rings }
    }

    /// Validates ring closure and the minimum vertex count.
    pub fn validate(&self) -> Result<()> {
        if self.rings.is_empty() {
            return Err(GeoError::Validation("polygon has no rings".into()));
        }
        for ring in &self.rings {
            if ring.len() < 4 {
                return Err(GeoError::Validation(format!(
                    "ring must have at least 3 distinct vertices plus closure, got {} points",
                    ring.len()
                )));
            }
            let (first, last) = (ring[0], ring[ring.len() - 1]);
            if first != last {
                return Err(GeoError::Validation(
                    "ring is not closed: first vertex != last vertex".into(),
                ));
            }
            let mut distinct: Vec<Wgs84Point> = Vec::new();
            for p in &ring[..ring.len() - 1] {
                if !distinct.iter().any(|d| d == p) {
                    distinct.push(*p);
                }
            }
            if distinct.len() < 3 {
                return Err(GeoError::Validation(
                    "ring has fewer than 3 distinct vertices".into(),
                ));
            }
        }
        Ok(())
    }

    /// Axis-aligned bounding box as (min_lat, min_lon, max_lat, max_lon).
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        let mut min_lat = f64::INFINITY;
        let mut min_lon = f64::INFINITY;
        let mut max_lat = f64::NEG_INFINITY;
        let mut max_lon = f64::NEG_INFINITY;
        for ring in &self.rings {
            for p in ring {
                min_lat = min_lat.min(p.lat);
                min_lon = min_lon.min(p.lon);
                max_lat = max_lat.max(p.lat);
                max_lon = max_lon.max(p.lon);
            }
        }
        (min_lat, min_lon, max_lat, max_lon)
    }

    /// Planar shoelace area treating (lon, lat) as x/y; holes subtract.
    pub fn area(&self) -> f64 {
        let mut total = 0.0;
        for (i, ring) in self.rings.iter().enumerate() {
            let a = ring_area_abs(ring);
            if i == 0 {
                total += a;
            } else {
                total -= a;
            }
        }
        total.max(0.0)
    }

    /// Even-odd containment over all rings, so holes are excluded.
    pub fn contains(&self, p: &Wgs84Point) -> bool {
        let mut inside = false;
        for ring in &self.rings {
            if ring_contains(ring, p) {
                inside = !inside;
            }
        }
        inside
    }
}

fn ring_area_abs(ring: &Ring) -> f64 {
    let mut acc = 0.0;
    for w in ring.windows(2) {
        acc += w[0].lon * w[1].lat - w[1].lon * w[0].lat;
    }
    (acc / 2.0).abs()
}

/// Ray-casting test on a single closed ring. Points exactly on an edge are
/// treated as inside.
fn ring_contains(ring: &Ring, p: &Wgs84Point) -> bool {
    let (x, y) = (p.lon, p.lat);
    let mut inside = false;
    for w in ring.windows(2) {
        let (x1, y1) = (w[0].lon, w[0].lat);
        let (x2, y2) = (w[1].lon, w[1].lat);
        if on_segment(x1, y1, x2, y2, x, y) {
            return true;
        }
        if (y1 > y) != (y2 > y) {
            let x_cross = x1 + (y - y1) / (y2 - y1) * (x2 - x1);
            if x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn on_segment(x1: f64, y1: f64, x2: f64, y2: f64, x: f64, y: f64) -> bool {
    let cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1);
    if cross.abs() > 1e-12 {
        return false;
    }
    let dot = (x - x1) * (x2 - x1) + (y - y1) * (y2 - y1);
    let len2 = (x2 - x1).powi(2) + (y2 - y1).powi(2);
    dot >= 0.0 && dot <= len2
}

/// Convenience constructor for a rectangular test polygon.
pub fn rect_polygon(min_lat: f64, min_lon: f64, max_lat: f64, max_lon: f64) -> PolygonGeom {
    PolygonGeom::new(vec![vec![
        Wgs84Point::new(min_lat, min_lon),
        Wgs84Point::new(min_lat, max_lon),
        Wgs84Point::new(max_lat, max_lon),
        Wgs84Point::new(max_lat, min_lon),
        Wgs84Point::new(min_lat, min_lon),
    ]])
}
