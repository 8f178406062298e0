//! Manifest construction and splitting.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use svirisk_geo::{NeighborhoodRecord, Wgs84Point};

use crate::{DatasetError, Result};

/// One successfully acquired image as logged by the acquisition stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionLogEntry {
    pub code: String,
    pub coordinate: Wgs84Point,
    pub pano_id: String,
    pub capture_month: u8,
    pub image_path: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

/// One labeled image in the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_path: String,
    pub label: usize,
    pub split: Option<Split>,
    pub code: String,
    pub coordinate: Wgs84Point,
    pub capture_month: u8,
}

/// Builds manifest entries from the acquisition log, labeling each image by
/// its neighborhood's risk class. Returns the entries and per-class counts.
pub fn build_manifest(
    log: &[AcquisitionLogEntry],
    records: &[NeighborhoodRecord],
) -> Result<(Vec<ManifestEntry>, [usize; 4])> {
    let by_code: BTreeMap<&str, &NeighborhoodRecord> =
        records.iter().map(|r| (r.code.as_str(), r)).collect();
    let mut entries = Vec::with_capacity(log.len());
    let mut counts = [0usize; 4];
    for item in log {
        let record = by_code.get(item.code.as_str()).ok_or_else(|| {
            DatasetError::Validation(format!("acquired image references unknown code {}", item.code))
        })?;
        let label = record.risk_class.index();
        counts[label] += 1;
        entries.push(ManifestEntry {
            image_path: item.image_path.clone(),
            label,
            split: None,
            code: item.code.clone(),
            coordinate: item.coordinate,
            capture_month: item.capture_month,
        });
    }
    Ok((entries, counts))
}

/// Split fractions and seed. Fractions must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_frac: f64,
    pub val_frac: f64,
    pub test_frac: f64,
    pub seed: u64,
    /// Stratify the split by class. Off by default: the reference split is
    /// a plain uniform partition.
    #[serde(default)]
    pub stratify: bool,
}

impl SplitSpec {
    pub fn standard(seed: u64) -> Self {
        Self { train_frac: 0.70, val_frac: 0.15, test_frac: 0.15, seed, stratify: false }
    }

    pub fn validate(&self) -> Result<()> {
        let sum = self.train_frac + self.val_frac + self.test_frac;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DatasetError::Validation(format!(
                "split fractions sum to {sum}, expected 1.0"
            )));
        }
        if self.train_frac < 0.0 || self.val_frac < 0.0 || self.test_frac < 0.0 {
            return Err(DatasetError::Validation("split fractions must be non-negative".into()));
        }
        Ok(())
    }
}

/// Target sizes: floors of the fractions, remainder assigned to train.
pub fn split_sizes(n: usize, spec: &SplitSpec) -> (usize, usize, usize) {
    // The epsilon shields the floor from representation error just below
    // an exact integer product.
    let floor_of = |frac: f64| ((n as f64) * frac + 1e-9).floor() as usize;
    let train = floor_of(spec.train_frac);
    let val = floor_of(spec.val_frac);
    let test = floor_of(spec.test_frac);
    let remainder = n - train - val - test;
    (train + remainder, val, test)
}

/// Assigns every entry to exactly one split by uniform random partition,
/// deterministic under the spec seed.
pub fn split_manifest(entries: &mut [ManifestEntry], spec: &SplitSpec) -> Result<()> {
    spec.validate()?;
    if spec.stratify {
        let mut by_class: [Vec<usize>; 4] = Default::default();
        for (i, e) in entries.iter().enumerate() {
            if e.label >= by_class.len() {
                return Err(DatasetError::Validation(format!("label out of range: {}", e.label)));
            }
            by_class[e.label].push(i);
        }
        for (class, indices) in by_class.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(class as u64));
            assign_partition(entries, indices.clone(), spec, &mut rng);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let indices: Vec<usize> = (0..entries.len()).collect();
        assign_partition(entries, indices, spec, &mut rng);
    }
    Ok(())
}

fn assign_partition(
    entries: &mut [ManifestEntry],
    mut indices: Vec<usize>,
    spec: &SplitSpec,
    rng: &mut ChaCha8Rng,
) {
    let (n_train, n_val, _n_test) = split_sizes(indices.len(), spec);
    indices.shuffle(rng);
    for (rank, idx) in indices.into_iter().enumerate() {
        entries[idx].split = Some(if rank < n_train {
            Split::Train
        } else if rank < n_train + n_val {
            Split::Val
        } else {
            Split::Test
        });
    }
}

/// Writes entries as JSON-lines.
pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for entry in entries {
        serde_json::to_writer(&mut file, entry)?;
        file.write_all(b"\n")?;
    }
    file.flush()?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut entries = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        entries.push(serde_json::from_str(&line)?);
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use svirisk_geo::geometry::rect_polygon;
    use svirisk_geo::discretize_risk;

    fn record(code: &str, percent: f64) -> NeighborhoodRecord {
        NeighborhoodRecord {
            code: code.into(),
            risk_percent: percent,
            risk_class: discretize_risk(percent).unwrap(),
            polygon: vec![rect_polygon(52.0, 5.0, 52.01, 5.01)],
        }
    }

    fn log_entry(code: &str, i: usize) -> AcquisitionLogEntry {
        AcquisitionLogEntry {
            code: code.into(),
            coordinate: Wgs84Point::new(52.005, 5.005),
            pano_id: format!("pano-{code}-{i}"),
            capture_month: 6,
            image_path: format!("images/{code}-{i}.jpg"),
        }
    }

    fn entries(n: usize) -> Vec<ManifestEntry> {
        (0..n)
            .map(|i| ManifestEntry {
                image_path: format!("img{i}.jpg"),
                label: i % 4,
                split: None,
                code: format!("c{i}"),
                coordinate: Wgs84Point::new(52.0, 5.0),
                capture_month: 7,
            })
            .collect()
    }

    #[test]
    fn manifest_reproduces_reference_class_counts() {
        // Per-class image counts shaped like the production dataset:
        // 2500 / 2500 / 2499 / 2380 over four one-neighborhood classes.
        let records = vec![
            record("vl", 3.0),
            record("lo", 7.0),
            record("mo", 12.0),
            record("hi", 20.0),
        ];
        let mut log = Vec::new();
        for (code, n) in [("vl", 2500), ("lo", 2500), ("mo", 2499), ("hi", 2380)] {
            for i in 0..n {
                log.push(log_entry(code, i));
            }
        }
        let (manifest, counts) = build_manifest(&log, &records).unwrap();
        assert_eq!(manifest.len(), 9879);
        assert_eq!(counts, [2500, 2500, 2499, 2380]);
    }

    #[test]
    fn empty_log_gives_empty_manifest() {
        let (manifest, counts) = build_manifest(&[], &[record("a", 3.0)]).unwrap();
        assert!(manifest.is_empty());
        assert_eq!(counts, [0; 4]);
    }

    #[test]
    fn orphan_code_is_an_error_naming_the_code() {
        let err = build_manifest(&[log_entry("ghost", 0)], &[record("a", 3.0)]).unwrap_err();
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn split_100_is_70_15_15() {
        let mut es = entries(100);
        split_manifest(&mut es, &SplitSpec::standard(1)).unwrap();
        let count = |s| es.iter().filter(|e| e.split == Some(s)).count();
        assert_eq!(
            (count(Split::Train), count(Split::Val), count(Split::Test)),
            (70, 15, 15)
        );
    }

    #[test]
    fn split_9879_goes_6917_1481_1481() {
        assert_eq!(split_sizes(9879, &SplitSpec::standard(0)), (6917, 1481, 1481));
        let mut es = entries(9879);
        split_manifest(&mut es, &SplitSpec::standard(5)).unwrap();
        let count = |s| es.iter().filter(|e| e.split == Some(s)).count();
        assert_eq!(
            (count(Split::Train), count(Split::Val), count(Split::Test)),
            (6917, 1481, 1481)
        );
    }

    #[test]
    fn same_seed_gives_identical_assignment() {
        let mut a = entries(500);
        let mut b = entries(500);
        split_manifest(&mut a, &SplitSpec::standard(9)).unwrap();
        split_manifest(&mut b, &SplitSpec::standard(9)).unwrap();
        assert_eq!(a, b);
        let mut c = entries(500);
        split_manifest(&mut c, &SplitSpec::standard(10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn stratified_split_balances_classes() {
        let mut es = entries(400); // 100 per class
        let spec = SplitSpec { stratify: true, ..SplitSpec::standard(3) };
        split_manifest(&mut es, &spec).unwrap();
        for class in 0..4 {
            let train = es
                .iter()
                .filter(|e| e.label == class && e.split == Some(Split::Train))
                .count();
            assert_eq!(train, 70, "class {class}");
        }
    }

    #[test]
    fn bad_fractions_rejected() {
        let spec = SplitSpec { train_frac: 0.8, val_frac: 0.15, test_frac: 0.15, seed: 0, stratify: false };
        assert!(split_manifest(&mut entries(10), &spec).is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.jsonl");
        let mut es = entries(25);
        split_manifest(&mut es, &SplitSpec::standard(2)).unwrap();
        write_manifest(&path, &es).unwrap();
        assert_eq!(read_manifest(&path).unwrap(), es);
    }

    proptest! {
        // Every entry lands in exactly one split and sizes follow the floor
        // arithmetic with the remainder going to train.
        #[test]
        fn partition_property(n in 1usize..400, seed in 0u64..1000) {
            let mut es = entries(n);
            split_manifest(&mut es, &SplitSpec::standard(seed)).unwrap();
            let (want_train, want_val, want_test) = split_sizes(n, &SplitSpec::standard(seed));
            let count = |s| es.iter().filter(|e| e.split == Some(s)).count();
            prop_assert_eq!(count(Split::Train), want_train);
            prop_assert_eq!(count(Split::Val), want_val);
            prop_assert_eq!(count(Split::Test), want_test);
            prop_assert!(es.iter().all(|e| e.split.is_some()));

            let mut paths: Vec<&str> = es.iter().map(|e| e.image_path.as_str()).collect();
            paths.sort_unstable();
            paths.dedup();
            prop_assert_eq!(paths.len(), n);
        }
    }
}
