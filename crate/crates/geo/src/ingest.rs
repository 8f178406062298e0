//! Health-statistics and geometry ingestion, plus the merge that produces
//! labeled neighborhood records.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::PolygonGeom;
use crate::reproject::reproject_polygon_rd;
use crate::risk::{discretize_risk, RiskClass};
use crate::{GeoError, Result, Wgs84Point};

/// One row of the health statistics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthRow {
    pub code: String,
    pub risk_percent: f64,
}

/// A neighborhood with its risk percentage, derived class and geometry.
/// Geometry is a multipolygon: one or more polygons, each with optional holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodRecord {
    pub code: String,
    pub risk_percent: f64,
    pub risk_class: RiskClass,
    pub polygon: Vec<PolygonGeom>,
}

impl NeighborhoodRecord {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=100.0).contains(&self.risk_percent) {
            return Err(GeoError::Validation(format!(
                "risk percent out of [0, 100]: {}",
                self.risk_percent
            )));
        }
        if discretize_risk(self.risk_percent)? != self.risk_class {
            return Err(GeoError::Validation(format!(
                "risk class {} inconsistent with percent {}",
                self.risk_class, self.risk_percent
            )));
        }
        if self.polygon.is_empty() {
            return Err(GeoError::Validation("record has no geometry".into()));
        }
        for poly in &self.polygon {
            poly.validate()?;
        }
        Ok(())
    }

    /// Total planar area across all sub-polygons.
    pub fn area(&self) -> f64 {
        self.polygon.iter().map(|p| p.area()).sum()
    }

    pub fn contains(&self, p: &Wgs84Point) -> bool {
        self.polygon.iter().any(|poly| poly.contains(p))
    }
}

/// Result of joining health rows with geometry. Unmatched codes are
/// reported rather than silently dropped: registries drift between releases.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergeOutcome {
    pub records: Vec<NeighborhoodRecord>,
    pub unmatched_health: Vec<String>,
    pub unmatched_geometry: Vec<String>,
}

/// Inner join of health rows and polygons on neighborhood code.
pub fn merge_health_geometry(
    health_rows: &[HealthRow],
    polygons: &[(String, Vec<PolygonGeom>)],
) -> Result<MergeOutcome> {
    let mut health_by_code: BTreeMap<&str, &HealthRow> = BTreeMap::new();
    for row in health_rows {
        if health_by_code.insert(row.code.as_str(), row).is_some() {
            return Err(GeoError::Validation(format!(
                "duplicate code in health table: {}",
                row.code
            )));
        }
    }
    let mut geom_by_code: BTreeMap<&str, &Vec<PolygonGeom>> = BTreeMap::new();
    for (code, polys) in polygons {
        if geom_by_code.insert(code.as_str(), polys).is_some() {
            return Err(GeoError::Validation(format!(
                "duplicate code in geometry table: {code}"
            )));
        }
    }

    let health_codes: BTreeSet<&str> = health_by_code.keys().copied().collect();
    let geom_codes: BTreeSet<&str> = geom_by_code.keys().copied().collect();

    let mut records = Vec::new();
    for code in health_codes.intersection(&geom_codes) {
        let row = health_by_code[code];
        let record = NeighborhoodRecord {
            code: row.code.clone(),
            risk_percent: row.risk_percent,
            risk_class: discretize_risk(row.risk_percent)?,
            polygon: geom_by_code[code].clone(),
        };
        record.validate()?;
        records.push(record);
    }

    Ok(MergeOutcome {
        records,
        unmatched_health: health_codes
            .difference(&geom_codes)
            .map(|c| c.to_string())
            .collect(),
        unmatched_geometry: geom_codes
            .difference(&health_codes)
            .map(|c| c.to_string())
            .collect(),
    })
}

/// Reads the health statistics CSV: header row with `code` and
/// `risk_percent` columns, dot-decimal numbers, UTF-8.
pub fn read_health_csv<R: Read>(reader: R) -> Result<Vec<HealthRow>> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let code_idx = headers
        .iter()
        .position(|h| h == "code")
        .ok_or_else(|| GeoError::Validation("health CSV missing `code` column".into()))?;
    let risk_idx = headers
        .iter()
        .position(|h| h == "risk_percent")
        .ok_or_else(|| GeoError::Validation("health CSV missing `risk_percent` column".into()))?;

    let mut rows = Vec::new();
    for record in csv_reader.records() {
        let record = record?;
        let code = record
            .get(code_idx)
            .ok_or_else(|| GeoError::Validation("short CSV row".into()))?
            .to_string();
        let risk_raw = record
            .get(risk_idx)
            .ok_or_else(|| GeoError::Validation("short CSV row".into()))?;
        let risk_percent: f64 = risk_raw.parse().map_err(|_| {
            GeoError::Validation(format!("invalid risk_percent for {code}: {risk_raw:?}"))
        })?;
        rows.push(HealthRow { code, risk_percent });
    }
    Ok(rows)
}

pub fn read_health_csv_path(path: &Path) -> Result<Vec<HealthRow>> {
    read_health_csv(std::fs::File::open(path)?)
}

/// Coordinate system of the GeoJSON positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryCrs {
    Wgs84,
    RdNew,
}

#[derive(Deserialize)]
struct FeatureCollection {
    #[serde(rename = "type")]
    kind: String,
    features: Vec<Feature>,
}

#[derive(Deserialize)]
struct Feature {
    properties: serde_json::Map<String, serde_json::Value>,
    geometry: Geometry,
}

#[derive(Deserialize)]
struct Geometry {
    #[serde(rename = "type")]
    kind: String,
    coordinates: serde_json::Value,
}

type RawRing = Vec<(f64, f64)>;

fn parse_ring(value: &serde_json::Value) -> Result<RawRing> {
    let arr = value
        .as_array()
        .ok_or_else(|| GeoError::GeoJson("ring is not an array".into()))?;
    let mut ring = Vec::with_capacity(arr.len());
    for pos in arr {
        let pair = pos
            .as_array()
            .ok_or_else(|| GeoError::GeoJson("position is not an array".into()))?;
        if pair.len() < 2 {
            return Err(GeoError::GeoJson("position has fewer than 2 ordinates".into()));
        }
        let x = pair[0]
            .as_f64()
            .ok_or_else(|| GeoError::GeoJson("non-numeric ordinate".into()))?;
        let y = pair[1]
            .as_f64()
            .ok_or_else(|| GeoError::GeoJson("non-numeric ordinate".into()))?;
        ring.push((x, y));
    }
    Ok(ring)
}

fn parse_polygon(value: &serde_json::Value) -> Result<Vec<RawRing>> {
    let arr = value
        .as_array()
        .ok_or_else(|| GeoError::GeoJson("polygon is not an array of rings".into()))?;
    arr.iter().map(parse_ring).collect()
}

fn rings_to_polygon(rings_xy: &[RawRing], crs: GeometryCrs) -> Result<PolygonGeom> {
    match crs {
        // GeoJSON positions are (lon, lat); records store (lat, lon).
        GeometryCrs::Wgs84 => Ok(PolygonGeom::new(
            rings_xy
                .iter()
                .map(|ring| ring.iter().map(|&(lon, lat)| Wgs84Point::new(lat, lon)).collect())
                .collect(),
        )),
        GeometryCrs::RdNew => reproject_polygon_rd(rings_xy),
    }
}

/// Parses a GeoJSON FeatureCollection into `(code, polygons)` pairs,
/// reprojecting RD positions when the declared CRS requires it.
pub fn read_geometry_geojson<R: Read>(
    reader: R,
    crs: GeometryCrs,
) -> Result<Vec<(String, Vec<PolygonGeom>)>> {
    let collection: FeatureCollection =
        serde_json::from_reader(reader).map_err(|e| GeoError::GeoJson(e.to_string()))?;
    if collection.kind != "FeatureCollection" {
        return Err(GeoError::GeoJson(format!(
            "expected FeatureCollection, got {}",
            collection.kind
        )));
    }
    let mut out = Vec::with_capacity(collection.features.len());
    for feature in &collection.features {
        let code = feature
            .properties
            .get("code")
            .and_then(|v| v.as_str())
            .ok_or_else(|| GeoError::GeoJson("feature missing string property `code`".into()))?
            .to_string();
        let polygons = match feature.geometry.kind.as_str() {
            "Polygon" => vec![rings_to_polygon(&parse_polygon(&feature.geometry.coordinates)?, crs)?],
            "MultiPolygon" => {
                let arr = feature
                    .geometry
                    .coordinates
                    .as_array()
                    .ok_or_else(|| GeoError::GeoJson("multipolygon is not an array".into()))?;
                arr.iter()
                    .map(|p| rings_to_polygon(&parse_polygon(p)?, crs))
                    .collect::<Result<Vec<_>>>()?
            }
            other => {
                return Err(GeoError::GeoJson(format!(
                    "unsupported geometry type for {code}: {other}"
                )))
            }
        };
        out.push((code, polygons));
    }
    Ok(out)
}

pub fn read_geometry_geojson_path(
    path: &Path,
    crs: GeometryCrs,
) -> Result<Vec<(String, Vec<PolygonGeom>)>> {
    read_geometry_geojson(std::fs::File::open(path)?, crs)
}
