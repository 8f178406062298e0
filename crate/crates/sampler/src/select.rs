//! Random neighborhood selection and same-class replacement.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use svirisk_geo::{NeighborhoodRecord, RiskClass};

use crate::quota::QuotaPlan;
use crate::{Result, SamplerError};

/// Per-class neighborhood codes chosen for acquisition, plus the unselected
/// remainder that serves as the replacement pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub selected: [Vec<String>; 4],
    pub pool: [Vec<String>; 4],
}

/// FNV-1a hash of the neighborhood code, mixed with the global seed so each
/// neighborhood owns an independent random stream.
pub fn neighborhood_rng(global_seed: u64, code: &str) -> ChaCha8Rng {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in code.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(global_seed ^ hash)
}

/// Uniform selection without replacement, per class, deterministic under the
/// seed and independent of registry ordering.
pub fn select_neighborhoods(
    records: &[NeighborhoodRecord],
    plan: &QuotaPlan,
    seed: u64,
) -> Result<Selection> {
    let mut by_class: [Vec<String>; 4] = Default::default();
    for record in records {
        by_class[record.risk_class.index()].push(record.code.clone());
    }
    for codes in &mut by_class {
        codes.sort();
    }

    let mut selected: [Vec<String>; 4] = Default::default();
    let mut pool: [Vec<String>; 4] = Default::default();
    for class in RiskClass::ALL {
        let idx = class.index();
        let quota = plan.per_class[idx];
        let mut codes = by_class[idx].clone();
        let take = match quota.neighborhoods {
            Some(n) => {
                if codes.len() < n {
                    return Err(SamplerError::Planning(format!(
                        "class {class} has {} neighborhoods, {} requested",
                        codes.len(),
                        n
                    )));
                }
                n
            }
            None => codes.len(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
        codes.shuffle(&mut rng);
        let rest = codes.split_off(take);
        selected[idx] = codes;
        pool[idx] = rest;
    }
    Ok(Selection { selected, pool })
}

/// Draws same-class replacements for exhausted neighborhoods, removing the
/// drawn codes from the pool. Fails with the per-class shortfall when the
/// pool cannot cover the demand.
pub fn resample_replacements(
    exhausted: &[(RiskClass, String)],
    pool: &mut [Vec<String>; 4],
    seed: u64,
) -> Result<Vec<(RiskClass, String)>> {
    let mut needed = [0usize; 4];
    for (class, _) in exhausted {
        needed[class.index()] += 1;
    }
    for class in RiskClass::ALL {
        let idx = class.index();
        if needed[idx] > pool[idx].len() {
            return Err(SamplerError::ReplacementShortfall {
                class: class.name().to_string(),
                needed: needed[idx],
                available: pool[idx].len(),
                shortfall: needed[idx] - pool[idx].len(),
            });
        }
    }

    let mut replacements = Vec::with_capacity(exhausted.len());
    for class in RiskClass::ALL {
        let idx = class.index();
        if needed[idx] == 0 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5eed + idx as u64));
        pool[idx].sort();
        pool[idx].shuffle(&mut rng);
        for _ in 0..needed[idx] {
            let code = pool[idx].pop().expect("pool size checked above");
            replacements.push((class, code));
        }
    }
    Ok(replacements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use svirisk_geo::geometry::rect_polygon;
    use svirisk_geo::discretize_risk;

    fn registry(populations: [usize; 4]) -> Vec<NeighborhoodRecord> {
        // Percent values safely inside each class interval.
        let percents = [3.0, 7.0, 12.0, 20.0];
        let mut records = Vec::new();
        for (class_idx, &n) in populations.iter().enumerate() {
            for i in 0..n {
                let code = format!("C{class_idx}-{i:05}");
                records.push(NeighborhoodRecord {
                    code,
                    risk_percent: percents[class_idx],
                    risk_class: discretize_risk(percents[class_idx]).unwrap(),
                    polygon: vec![rect_polygon(52.0, 5.0, 52.001, 5.001)],
                });
            }
        }
        records
    }

    #[test]
    fn reference_populations_give_reference_subset_sizes() {
        let records = registry([7960, 4043, 944, 119]);
        let sel = select_neighborhoods(&records, &QuotaPlan::STANDARD, 7).unwrap();
        let sizes: Vec<usize> = sel.selected.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![2500, 2500, 833, 119]);
    }

    #[test]
    fn population_equal_to_request_returns_entire_class() {
        let mut plan = QuotaPlan::STANDARD;
        plan.per_class[0].neighborhoods = Some(10);
        plan.per_class[1].neighborhoods = Some(5);
        plan.per_class[2].neighborhoods = Some(4);
        let records = registry([10, 5, 4, 2]);
        let sel = select_neighborhoods(&records, &plan, 7).unwrap();
        assert_eq!(sel.selected[0].len(), 10);
        assert!(sel.pool[0].is_empty());
        assert_eq!(sel.selected[3].len(), 2);
    }

    #[test]
    fn insufficient_population_names_the_class() {
        let mut plan = QuotaPlan::STANDARD;
        plan.per_class[1].neighborhoods = Some(100);
        let records = registry([200, 50, 200, 10]);
        plan.per_class[0].neighborhoods = Some(10);
        plan.per_class[2].neighborhoods = Some(10);
        let err = select_neighborhoods(&records, &plan, 7).unwrap_err();
        assert!(err.to_string().contains("low"), "{err}");
    }

    #[test]
    fn same_seed_gives_identical_subsets() {
        let records = registry([100, 100, 100, 10]);
        let mut plan = QuotaPlan::STANDARD;
        plan.per_class[0].neighborhoods = Some(30);
        plan.per_class[1].neighborhoods = Some(30);
        plan.per_class[2].neighborhoods = Some(30);
        let a = select_neighborhoods(&records, &plan, 99).unwrap();
        let b = select_neighborhoods(&records, &plan, 99).unwrap();
        assert_eq!(a, b);
        let c = select_neighborhoods(&records, &plan, 100).unwrap();
        assert_ne!(a.selected, c.selected);
    }

    #[test]
    fn selection_is_input_order_independent() {
        let mut records = registry([50, 50, 50, 5]);
        let mut plan = QuotaPlan::STANDARD;
        plan.per_class[0].neighborhoods = Some(20);
        plan.per_class[1].neighborhoods = Some(20);
        plan.per_class[2].neighborhoods = Some(20);
        let a = select_neighborhoods(&records, &plan, 1).unwrap();
        records.reverse();
        let b = select_neighborhoods(&records, &plan, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn replacements_are_same_class_and_consume_pool() {
        let exhausted: Vec<(RiskClass, String)> = (0..70)
            .map(|i| (RiskClass::VeryLow, format!("C0-{i:05}")))
            .collect();
        let mut pool: [Vec<String>; 4] = Default::default();
        pool[0] = (100..300).map(|i| format!("C0-{i:05}")).collect();
        let before = pool[0].len();
        let replacements = resample_replacements(&exhausted, &mut pool, 3).unwrap();
        assert_eq!(replacements.len(), 70);
        assert!(replacements.iter().all(|(c, _)| *c == RiskClass::VeryLow));
        assert_eq!(pool[0].len(), before - 70);
    }

    #[test]
    fn no_exhaustions_no_replacements() {
        let mut pool: [Vec<String>; 4] = Default::default();
        pool[2] = vec!["a".into()];
        assert!(resample_replacements(&[], &mut pool, 3).unwrap().is_empty());
    }

    #[test]
    fn shortfall_reported() {
        let exhausted = vec![
            (RiskClass::Moderate, "x".to_string()),
            (RiskClass::Moderate, "y".to_string()),
            (RiskClass::Moderate, "z".to_string()),
        ];
        let mut pool: [Vec<String>; 4] = Default::default();
        pool[2] = vec!["a".into(), "b".into()];
        match resample_replacements(&exhausted, &mut pool, 3) {
            Err(SamplerError::ReplacementShortfall { class, needed, available, shortfall }) => {
                assert_eq!(class, "moderate");
                assert_eq!((needed, available, shortfall), (3, 2, 1));
            }
            other => panic!("expected shortfall, got {other:?}"),
        }
    }
}
