use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of walks to sample so that the empirical walk distribution is
/// within `epsilon` of the true one in L1 with probability at least
/// `1 - delta`:
///
/// `m = ceil( 2/ε² · (ln(2^η − 2) − ln δ) )`
///
/// `ln(2^η − 2)` is evaluated as `η·ln 2 + ln(1 − 2^(1−η))` so that large
/// vocabularies do not overflow. A vocabulary with a single walk needs one
/// sample.
///
/// # Panics
///
/// If `epsilon <= 0` or `delta` is outside `(0, 1)`.
pub fn required_samples(epsilon: f64, delta: f64, eta: usize) -> u64 {
    assert!(epsilon > 0.0, "epsilon must be positive");
    assert!(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    if eta < 2 {
        return 1;
    }
    let eta = eta as f64;
    let log_subsets = eta * std::f64::consts::LN_2 + (-(1.0 - eta).exp2()).ln_1p();
    (2.0 / (epsilon * epsilon) * (log_subsets - delta.ln())).ceil() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub samples: u64,
}

impl SamplingPlan {
    pub fn from_bound(epsilon: f64, delta: f64, eta: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Invalid(format!("delta must lie in (0, 1), got {delta}")));
        }
        Ok(SamplingPlan {
            epsilon: Some(epsilon),
            delta: Some(delta),
            samples: required_samples(epsilon, delta, eta),
        })
    }

    pub fn fixed(samples: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Invalid("sample count must be at least 1".into()));
        }
        Ok(SamplingPlan {
            epsilon: None,
            delta: None,
            samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reported_sample_counts() {
        assert_eq!(required_samples(0.5, 0.05, 877), 4888);
        // Exact value 122499.0495...
        assert_eq!(required_samples(0.1, 0.01, 877), 122_500);
        // 2 (ln 2 - ln 0.5) = 2.77
        assert_eq!(required_samples(1.0, 0.5, 2), 3);
    }

    #[test]
    fn huge_vocabulary_does_not_overflow() {
        let m = required_samples(0.1, 0.05, 115_975);
        assert!(m > 16_000_000 && m < 16_200_000);
    }

    #[test]
    fn monotone() {
        let base = required_samples(0.2, 0.05, 50);
        assert!(required_samples(0.1, 0.05, 50) > base);
        assert!(required_samples(0.2, 0.01, 50) > base);
        assert!(required_samples(0.2, 0.05, 51) > base);
    }

    #[test]
    fn plan_validation() {
        assert!(SamplingPlan::from_bound(0.0, 0.05, 5).is_err());
        assert!(SamplingPlan::from_bound(0.1, 1.0, 5).is_err());
        assert!(SamplingPlan::fixed(0).is_err());
        assert_eq!(SamplingPlan::from_bound(0.5, 0.05, 877).unwrap().samples, 4888);
    }
}
