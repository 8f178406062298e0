//! In-polygon coordinate sampling and the per-neighborhood retry loop.

use rand::Rng;
use serde::{Deserialize, Serialize};
use svirisk_geo::geometry::PolygonGeom;
use svirisk_geo::{NeighborhoodRecord, RiskClass, Wgs84Point};

use crate::select::{neighborhood_rng, resample_replacements, Selection};
use crate::quota::QuotaPlan;
use crate::{Result, SamplerError};

/// Bounding-box draws allowed per point before a polygon is declared
/// degenerate.
const MAX_REJECTIONS: u32 = 10_000;

/// One sampling slot for one neighborhood image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub code: String,
    pub coordinate: Option<Wgs84Point>,
    pub attempt_index: u32,
    pub status: SampleStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    Planned,
    Found,
    Exhausted,
}

impl SamplePoint {
    pub fn planned(code: &str) -> Self {
        Self {
            code: code.to_string(),
            coordinate: None,
            attempt_index: 0,
            status: SampleStatus::Planned,
        }
    }
}

/// Retry budget for probing imagery availability at sampled coordinates.
/// The budget applies per required image slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts_per_point: u32,
    pub replacement_enabled: bool,
}

impl RetryPolicy {
    pub const STANDARD: RetryPolicy = RetryPolicy {
        max_attempts_per_point: 300,
        replacement_enabled: true,
    };
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// Uniform draw inside one polygon by rejection over its bounding box.
pub fn sample_point_in_polygon<R: Rng>(polygon: &PolygonGeom, rng: &mut R) -> Result<Wgs84Point> {
    let (min_lat, min_lon, max_lat, max_lon) = polygon.bbox();
    if !(min_lat < max_lat && min_lon < max_lon) {
        return Err(SamplerError::DegeneratePolygon(
            "bounding box has no extent".into(),
        ));
    }
    for _ in 0..MAX_REJECTIONS {
        let p = Wgs84Point::new(
            rng.random_range(min_lat..max_lat),
            rng.random_range(min_lon..max_lon),
        );
        if polygon.contains(&p) {
            return Ok(p);
        }
    }
    Err(SamplerError::DegeneratePolygon(format!(
        "no interior point after {MAX_REJECTIONS} bounding-box draws"
    )))
}

/// Uniform draw inside a multipolygon: pick a sub-polygon with probability
/// proportional to its area, then sample within it.
pub fn sample_point_in_geometry<R: Rng>(
    polygons: &[PolygonGeom],
    rng: &mut R,
) -> Result<Wgs84Point> {
    match polygons.len() {
        0 => Err(SamplerError::Validation("geometry has no polygons".into())),
        1 => sample_point_in_polygon(&polygons[0], rng),
        _ => {
            let areas: Vec<f64> = polygons.iter().map(|p| p.area()).collect();
            let total: f64 = areas.iter().sum();
            if total <= 0.0 {
                return Err(SamplerError::DegeneratePolygon("total area is zero".into()));
            }
            let mut pick = rng.random_range(0.0..total);
            for (poly, area) in polygons.iter().zip(&areas) {
                if pick < *area {
                    return sample_point_in_polygon(poly, rng);
                }
                pick -= area;
            }
            sample_point_in_polygon(polygons.last().unwrap(), rng)
        }
    }
}

/// Outcome of acquiring all image slots for one neighborhood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionOutcome {
    pub points: Vec<SamplePoint>,
    pub exhausted: bool,
    pub attempts_total: u64,
}

/// Draws candidate coordinates for each required image and probes them until
/// one is found or the per-slot budget runs out. Exhaustion is a reported
/// outcome, not an error: the first failed slot marks the neighborhood
/// exhausted and remaining slots are not attempted.
pub fn acquire_with_retry<R, P>(
    record: &NeighborhoodRecord,
    images_needed: usize,
    policy: &RetryPolicy,
    rng: &mut R,
    probe: &mut P,
) -> Result<AcquisitionOutcome>
where
    R: Rng,
    P: FnMut(&str, &Wgs84Point) -> bool,
{
    if images_needed == 0 {
        return Err(SamplerError::Validation("images_needed must be >= 1".into()));
    }
    if policy.max_attempts_per_point == 0 {
        return Err(SamplerError::Validation("max_attempts_per_point must be >= 1".into()));
    }

    let mut points = Vec::with_capacity(images_needed);
    let mut attempts_total = 0u64;
    for _slot in 0..images_needed {
        let mut found = false;
        for attempt in 1..=policy.max_attempts_per_point {
            attempts_total += 1;
            let candidate = sample_point_in_geometry(&record.polygon, rng)?;
            if probe(&record.code, &candidate) {
                points.push(SamplePoint {
                    code: record.code.clone(),
                    coordinate: Some(candidate),
                    attempt_index: attempt,
                    status: SampleStatus::Found,
                });
                found = true;
                break;
            }
        }
        if !found {
            points.push(SamplePoint {
                code: record.code.clone(),
                coordinate: None,
                attempt_index: policy.max_attempts_per_point,
                status: SampleStatus::Exhausted,
            });
            return Ok(AcquisitionOutcome { points, exhausted: true, attempts_total });
        }
    }
    Ok(AcquisitionOutcome { points, exhausted: false, attempts_total })
}

/// Result of driving acquisition over a whole selection, including the
/// replacement rounds for exhausted neighborhoods.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignResult {
    /// Every sample point produced, including exhausted markers.
    pub points: Vec<SamplePoint>,
    /// Replacement picks as (class, exhausted code, replacement code).
    pub replacements: Vec<(RiskClass, String, String)>,
    /// Neighborhoods per class that delivered their full image count.
    pub fulfilled_counts: [usize; 4],
    /// Found image points per class.
    pub image_counts: [usize; 4],
}

/// Runs acquisition over the selected neighborhoods and keeps replacing
/// exhausted ones with same-class picks until the plan is fulfilled or the
/// pool runs dry (which is a planning error).
pub fn run_acquisition_campaign<P>(
    records: &[NeighborhoodRecord],
    selection: &Selection,
    plan: &QuotaPlan,
    policy: &RetryPolicy,
    seed: u64,
    probe: &mut P,
) -> Result<CampaignResult>
where
    P: FnMut(&str, &Wgs84Point) -> bool,
{
    let by_code: std::collections::BTreeMap<&str, &NeighborhoodRecord> =
        records.iter().map(|r| (r.code.as_str(), r)).collect();

    let mut result = CampaignResult {
        points: Vec::new(),
        replacements: Vec::new(),
        fulfilled_counts: [0; 4],
        image_counts: [0; 4],
    };
    let mut pool = selection.pool.clone();
    let mut queue: Vec<(RiskClass, String)> = Vec::new();
    for class in RiskClass::ALL {
        for code in &selection.selected[class.index()] {
            queue.push((class, code.clone()));
        }
    }

    let mut round = 0u64;
    while !queue.is_empty() {
        let mut exhausted: Vec<(RiskClass, String)> = Vec::new();
        for (class, code) in queue.drain(..) {
            let record = by_code.get(code.as_str()).ok_or_else(|| {
                SamplerError::Validation(format!("selected code not in registry: {code}"))
            })?;
            let images = plan.per_class[class.index()].images_per_neighborhood;
            let mut rng = neighborhood_rng(seed, &code);
            let outcome = acquire_with_retry(record, images, policy, &mut rng, probe)?;
            if outcome.exhausted {
                exhausted.push((class, code.clone()));
            } else {
                result.fulfilled_counts[class.index()] += 1;
                result.image_counts[class.index()] += outcome.points.len();
            }
            result.points.extend(outcome.points);
        }
        if exhausted.is_empty() {
            break;
        }
        if !policy.replacement_enabled {
            break;
        }
        let replacements = resample_replacements(&exhausted, &mut pool, seed.wrapping_add(round))?;
        for ((class, old_code), (_, new_code)) in exhausted.iter().zip(&replacements) {
            result
                .replacements
                .push((*class, old_code.clone(), new_code.clone()));
            queue.push((*class, new_code.clone()));
        }
        round += 1;
    }
    Ok(result)
}

/// Expands a selection into one planned sample point per image slot.
pub fn plan_sample_points(selection: &Selection, plan: &QuotaPlan) -> Vec<SamplePoint> {
    let mut out = Vec::new();
    for class in RiskClass::ALL {
        let images = plan.per_class[class.index()].images_per_neighborhood;
        for code in &selection.selected[class.index()] {
            for _ in 0..images {
                out.push(SamplePoint::planned(code));
            }
        }
    }
    out
}
