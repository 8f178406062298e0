//! Per-class neighborhood and image quotas.

use serde::{Deserialize, Serialize};
use svirisk_geo::RiskClass;

/// Quota for one risk class: how many neighborhoods to select and how many
/// images to sample per neighborhood. `neighborhoods: None` takes every
/// available neighborhood of the class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassQuota {
    pub neighborhoods: Option<usize>,
    pub images_per_neighborhood: usize,
}

/// The full acquisition plan over the four ordinal classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotaPlan {
    pub per_class: [ClassQuota; 4],
}

impl QuotaPlan {
    /// The production plan: 2500 x 1, 2500 x 1, 833 x 3, and every
    /// remaining top-class neighborhood at 20 images each.
    pub const STANDARD: QuotaPlan = QuotaPlan {
        per_class: [
            ClassQuota { neighborhoods: Some(2500), images_per_neighborhood: 1 },
            ClassQuota { neighborhoods: Some(2500), images_per_neighborhood: 1 },
            ClassQuota { neighborhoods: Some(833), images_per_neighborhood: 3 },
            ClassQuota { neighborhoods: None, images_per_neighborhood: 20 },
        ],
    };

    pub fn quota(&self, class: RiskClass) -> ClassQuota {
        self.per_class[class.index()]
    }

    /// Planned image counts per class given the class populations.
    pub fn planned_images(&self, populations: [usize; 4]) -> [usize; 4] {
        let mut out = [0; 4];
        for (i, quota) in self.per_class.iter().enumerate() {
            let n = quota.neighborhoods.unwrap_or(populations[i]);
            out[i] = n * quota.images_per_neighborhood;
        }
        out
    }
}

impl Default for QuotaPlan {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// Images sampled per neighborhood of the given class: 1, 1, 3, 20.
pub fn quota_for_class(class: RiskClass) -> usize {
    QuotaPlan::STANDARD.per_class[class.index()].images_per_neighborhood
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_class_image_quotas() {
        assert_eq!(quota_for_class(RiskClass::VeryLow), 1);
        assert_eq!(quota_for_class(RiskClass::Low), 1);
        assert_eq!(quota_for_class(RiskClass::Moderate), 3);
        assert_eq!(quota_for_class(RiskClass::HighVeryHigh), 20);
    }

    #[test]
    fn planned_totals_for_reference_populations() {
        let planned = QuotaPlan::STANDARD.planned_images([7960, 4043, 944, 119]);
        assert_eq!(planned, [2500, 2500, 2499, 2380]);
        assert_eq!(planned.iter().sum::<usize>(), 9879);
    }
}
