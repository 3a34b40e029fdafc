//! The two benchmark error metrics: normalized coefficient error and
//! misclassification ratio.

use crate::float;
use crate::linalg::Vector;
use crate::pipeline::Label;

/// Normalized coefficient error `||a - b|| / (||a|| + ||b||)`.
///
/// Symmetric, scale-invariant under a common positive factor, and
/// bounded by `[0, 1]`. Two zero vectors are defined to agree exactly
/// (returns 0).
pub fn coef_error(theta: &Vector, theta_hat: &Vector) -> f64 {
    let denom = theta.norm() + theta_hat.norm();
    if denom == 0.0 {
        return 0.0;
    }
    let diff: f64 = theta
        .as_slice()
        .iter()
        .zip(theta_hat.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    float::sqrt(diff) / denom
}

/// Misclassified entries divided by the number of true inliers.
///
/// The denominator follows the benchmark definition even though it
/// permits ratios above one. With zero true inliers the ratio is
/// undefined and NaN is returned as the sentinel.
pub fn misclass_ratio(true_outlier_mask: &[bool], labels: &[Label]) -> f64 {
    debug_assert_eq!(true_outlier_mask.len(), labels.len());
    let true_inliers = true_outlier_mask.iter().filter(|&&m| !m).count();
    if true_inliers == 0 {
        return f64::NAN;
    }
    let mismatches = true_outlier_mask
        .iter()
        .zip(labels)
        .filter(|(&is_outlier, &label)| is_outlier != (label == Label::Outlier))
        .count();
    mismatches as f64 / true_inliers as f64
}

/// Per-trial benchmark record.
#[derive(Debug, Clone, Copy)]
pub struct TrialMetrics {
    pub coef_error: f64,
    pub misclass_ratio: f64,
    pub wall_time: f64,
}
