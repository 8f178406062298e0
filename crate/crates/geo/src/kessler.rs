//! Kessler-10 questionnaire scoring.

use crate::{GeoError, Result};

/// Parameters of the 10-item distress questionnaire and its high-risk band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KesslerSpec {
    pub num_questions: usize,
    pub item_min: u8,
    pub item_max: u8,
    pub high_risk_low: u32,
    pub high_risk_high: u32,
}

impl KesslerSpec {
    pub const STANDARD: KesslerSpec = KesslerSpec {
        num_questions: 10,
        item_min: 1,
        item_max: 5,
        high_risk_low: 30,
        high_risk_high: 50,
    };
}

impl Default for KesslerSpec {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// Returns true when the summed item scores fall in the high-risk band.
///
/// Answers must be exactly 10 items, each an integer score in `[1, 5]`.
/// Incomplete or out-of-range vectors are rejected rather than imputed.
pub fn kessler_high_risk(answers: &[u8]) -> Result<bool> {
    let spec = KesslerSpec::STANDARD;
    if answers.len() != spec.num_questions {
        return Err(GeoError::Validation(format!(
            "expected {} answers, got {}",
            spec.num_questions,
            answers.len()
        )));
    }
    for (i, &a) in answers.iter().enumerate() {
        if a < spec.item_min || a > spec.item_max {
            return Err(GeoError::Validation(format!(
                "answer {} out of range [{}, {}]: {}",
                i, spec.item_min, spec.item_max, a
            )));
        }
    }
    let total: u32 = answers.iter().map(|&a| u32::from(a)).sum();
    Ok((spec.high_risk_low..=spec.high_risk_high).contains(&total))
}

/// Percentage of high-risk respondents among the given answer vectors.
pub fn neighborhood_risk_percent(respondent_answers: &[Vec<u8>]) -> Result<f64> {
    if respondent_answers.is_empty() {
        return Err(GeoError::Validation(
            "at least one respondent is required".into(),
        ));
    }
    let mut high = 0usize;
    for answers in respondent_answers {
        if kessler_high_risk(answers)? {
            high += 1;
        }
    }
    Ok(100.0 * high as f64 / respondent_answers.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_invariants_hold() {
        let s = KesslerSpec::STANDARD;
        assert_eq!(s.num_questions as u32 * u32::from(s.item_max), s.high_risk_high);
        assert!(s.high_risk_low <= s.high_risk_high);
    }

    #[test]
    fn minimal_sum_is_not_high_risk() {
        assert!(!kessler_high_risk(&[1; 10]).unwrap());
    }

    #[test]
    fn lower_threshold_is_high_risk() {
        assert!(kessler_high_risk(&[3; 10]).unwrap());
    }

    #[test]
    fn just_below_threshold_is_not_high_risk() {
        assert!(!kessler_high_risk(&[3, 3, 3, 3, 3, 3, 3, 3, 3, 2]).unwrap());
    }

    #[test]
    fn maximal_sum_is_high_risk() {
        assert!(kessler_high_risk(&[5; 10]).unwrap());
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(kessler_high_risk(&[3; 9]).is_err());
        assert!(kessler_high_risk(&[3; 11]).is_err());
    }

    #[test]
    fn out_of_range_item_rejected() {
        assert!(kessler_high_risk(&[1, 1, 1, 1, 1, 1, 1, 1, 1, 6]).is_err());
        assert!(kessler_high_risk(&[0, 1, 1, 1, 1, 1, 1, 1, 1, 1]).is_err());
    }

    #[test]
    fn percent_counts_high_risk_respondents() {
        let none: Vec<Vec<u8>> = (0..10).map(|_| vec![1; 10]).collect();
        assert_eq!(neighborhood_risk_percent(&none).unwrap(), 0.0);

        let mut one = none.clone();
        one[3] = vec![5; 10];
        assert_eq!(neighborhood_risk_percent(&one).unwrap(), 10.0);

        let all: Vec<Vec<u8>> = (0..3).map(|_| vec![4; 10]).collect();
        assert_eq!(neighborhood_risk_percent(&all).unwrap(), 100.0);
    }

    #[test]
    fn percent_rejects_empty_input() {
        assert!(neighborhood_risk_percent(&[]).is_err());
    }

    proptest! {
        // Brute-force sum check over random valid answer vectors.
        #[test]
        fn matches_sum_rule(answers in proptest::collection::vec(1u8..=5, 10)) {
            let total: u32 = answers.iter().map(|&a| u32::from(a)).sum();
            let expected = (30..=50).contains(&total);
            prop_assert_eq!(kessler_high_risk(&answers).unwrap(), expected);
        }
    }
}
