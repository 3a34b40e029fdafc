//! The two-stage detector: greedy erasure of a fixed fraction of
//! coordinates, exact consensus search on the survivors with a
//! greedy-derived warm start, then coefficient recovery and a final
//! classification of every ambient coordinate.
//!
//! Stage 1 is a search heuristic, not a verdict: a coordinate removed
//! by the greedy pass is reinstated whenever its residual under the
//! recovered coefficients is within tolerance.

use alloc::vec::Vec;

use crate::float;
use crate::greedy::{greedy_erase, GreedyConfig, GreedyTrace};
use crate::index_set::IndexSet;
use crate::linalg::{least_squares, Matrix, Vector};
use crate::milp::{
    solve_escalating, LambdaMode, MilpSolution, SolveContext, WarmStart, FEAS_TOL,
};
use crate::{Error, Result};

/// Per-coordinate verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Inlier,
    Outlier,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Inlier => "inlier",
            Label::Outlier => "outlier",
        }
    }
}

/// Detector configuration.
#[derive(Debug, Clone, Copy)]
pub struct GlimpsConfig {
    /// Fraction of the ambient dimension removed by stage 1.
    pub removal_fraction: f64,
    /// Noise handling for stage 2.
    pub lambda: LambdaMode,
    /// Wall-clock budget for stage 2 (including big-M escalations).
    pub time_limit: f64,
    /// Classification threshold; `None` selects
    /// `1e-6 * (1 + ||x||_inf)`, suited to noiseless data.
    pub tau: Option<f64>,
    /// Multiplier on the residual-derived big-M constant.
    pub big_m_safety: f64,
    /// Solver gap tolerance override.
    pub gap_tol: Option<f64>,
}

impl Default for GlimpsConfig {
    fn default() -> Self {
        Self {
            removal_fraction: 0.40,
            lambda: LambdaMode::Noiseless,
            time_limit: 60.0,
            tau: None,
            big_m_safety: 2.0,
            gap_tol: None,
        }
    }
}

/// Full detector output over the ambient dimension.
#[derive(Debug, Clone)]
pub struct DetectionResult {
    /// Final inlier set over all `d` coordinates.
    pub inliers: IndexSet,
    pub theta_hat: Vector,
    /// Absolute residuals `|x_i - U_i theta_hat|`.
    pub residuals: Vector,
    pub labels: Vec<Label>,
    pub stage1_trace: Option<GreedyTrace>,
    /// Stage-1 survivor set (equals the full set when no removal ran).
    pub survivors: Option<IndexSet>,
    pub stage2: Option<MilpSolution>,
    /// Whether the stage-2 zero set reached the r+1 identifiability
    /// floor, enabling the final reclassification.
    pub recovered: bool,
    /// Big-M constant the accepted stage-2 solve used.
    pub big_m: Option<f64>,
}

impl DetectionResult {
    /// Labels as seen by stage 2 alone: stage-1 removals count as
    /// outliers and survivors keep their solver flags. Falls back to
    /// the final labels when no stage-2 solve ran.
    pub fn stage2_labels(&self, d: usize) -> Vec<Label> {
        let (Some(survivors), Some(stage2)) = (&self.survivors, &self.stage2) else {
            return self.labels.clone();
        };
        let mut labels = alloc::vec![Label::Outlier; d];
        for (pos, amb) in survivors.iter().enumerate() {
            labels[amb] = if stage2.z[pos] { Label::Outlier } else { Label::Inlier };
        }
        labels
    }
}

/// Residual classification of every coordinate against `theta_hat`.
pub fn classify_all(
    u: &Matrix,
    x: &Vector,
    theta_hat: &Vector,
    tau: f64,
) -> Result<(Vec<Label>, Vector)> {
    if !(tau > 0.0) {
        return Err(Error::Config("tau must be positive"));
    }
    if u.rows() != x.len() || u.cols() != theta_hat.len() {
        return Err(Error::DimensionMismatch { expected: u.rows(), got: x.len() });
    }
    let fit = u.mul_vec(theta_hat)?;
    let mut labels = Vec::with_capacity(x.len());
    let mut residuals = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let r = float::abs(x.get(i) - fit.get(i));
        labels.push(if r <= tau { Label::Inlier } else { Label::Outlier });
        residuals.push(r);
    }
    Ok((labels, Vector::new(residuals)?))
}

/// Default noiseless classification threshold.
pub fn default_tau(x: &Vector) -> f64 {
    1e-6 * (1.0 + x.norm_inf())
}

/// Runs the full detector with a wall clock (requires `std`).
#[cfg(feature = "std")]
pub fn glimps_detect(u: &Matrix, x: &Vector, cfg: &GlimpsConfig) -> Result<DetectionResult> {
    let clock = crate::clock::WallClock::start();
    glimps_detect_with(u, x, cfg, &mut SolveContext::new(&clock))
}

/// Runs the full detector with no time source.
#[cfg(not(feature = "std"))]
pub fn glimps_detect(u: &Matrix, x: &Vector, cfg: &GlimpsConfig) -> Result<DetectionResult> {
    glimps_detect_with(u, x, cfg, &mut SolveContext::new(&crate::clock::NoClock))
}

pub fn glimps_detect_with(
    u: &Matrix,
    x: &Vector,
    cfg: &GlimpsConfig,
    ctx: &mut SolveContext,
) -> Result<DetectionResult> {
    let d = u.rows();
    let r = u.cols();
    if d < r + 2 {
        return Err(Error::Config("need d >= r + 2"));
    }
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    let tau = cfg.tau.unwrap_or_else(|| default_tau(x));
    if !(tau > 0.0) {
        return Err(Error::Config("tau must be positive"));
    }

    // Stage 1: greedy erasure.
    let greedy_cfg = GreedyConfig { removal_fraction: cfg.removal_fraction, min_survivors: r + 1 };
    let (survivors, trace) = greedy_erase(u, x, &greedy_cfg)?;
    let u_s = u.restrict_rows(&survivors)?;
    let x_s = x.restrict(&survivors)?;

    // Warm start: least squares on the survivors, flags from its
    // residuals at the classification threshold.
    let theta0 = least_squares(&u_s, &x_s)?;
    let resid0 = {
        let fit = u_s.mul_vec(&theta0)?;
        (0..x_s.len()).map(|i| float::abs(x_s.get(i) - fit.get(i))).collect::<Vec<_>>()
    };
    let z0: Vec<bool> = resid0.iter().map(|&r| r > tau).collect();
    let all_ones: Vec<bool> = alloc::vec![true; x_s.len()];

    // Feasibility of the thresholded warm start is mode-dependent; the
    // problem constructor checks it, so pick the fallback here.
    let warm_feasible = match cfg.lambda {
        LambdaMode::Noisy(_) => true,
        LambdaMode::Noiseless => {
            z0.iter().zip(&resid0).all(|(&flag, &r)| flag || r <= FEAS_TOL)
        }
    };
    let warm = WarmStart {
        z: if warm_feasible { z0 } else { all_ones },
        theta: theta0.clone(),
    };

    // Stage 2: branch and bound with the structural big-M policy.
    let escalated = solve_escalating(
        &u_s,
        &x_s,
        cfg.lambda,
        &theta0,
        cfg.big_m_safety,
        cfg.time_limit,
        cfg.gap_tol,
        Some(warm),
        ctx,
    )?;
    let stage2 = escalated.solution;

    // Consensus in ambient coordinates.
    let survivor_list: Vec<usize> = survivors.iter().collect();
    let consensus_ambient: Vec<usize> =
        stage2.consensus().iter().map(|&pos| survivor_list[pos]).collect();
    let recovered = consensus_ambient.len() > r;

    if recovered {
        let consensus_set = IndexSet::from_unsorted(consensus_ambient);
        let u_c = u.restrict_rows(&consensus_set)?;
        let x_c = x.restrict(&consensus_set)?;
        // Refit on the stage-2 inlier set; keep the solver coefficients
        // if the restriction degenerates.
        let theta_hat = least_squares(&u_c, &x_c).unwrap_or_else(|_| stage2.theta.clone());
        let (labels, residuals) = classify_all(u, x, &theta_hat, tau)?;
        let inliers = IndexSet::from_unsorted(
            labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == Label::Inlier)
                .map(|(i, _)| i)
                .collect(),
        );
        Ok(DetectionResult {
            inliers,
            theta_hat,
            residuals,
            labels,
            stage1_trace: Some(trace),
            survivors: Some(survivors),
            stage2: Some(stage2),
            recovered: true,
            big_m: Some(escalated.big_m),
        })
    } else {
        // Identifiability floor missed: report stage-2 flags verbatim,
        // stage-1 removals stay outliers.
        let theta_hat = stage2.theta.clone();
        let fit = u.mul_vec(&theta_hat)?;
        let residuals = Vector::new(
            (0..d).map(|i| float::abs(x.get(i) - fit.get(i))).collect::<Vec<_>>(),
        )?;
        let mut labels = alloc::vec![Label::Outlier; d];
        for (pos, &amb) in survivor_list.iter().enumerate() {
            if !stage2.z[pos] {
                labels[amb] = Label::Inlier;
            }
        }
        let inliers = IndexSet::from_unsorted(
            labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == Label::Inlier)
                .map(|(i, _)| i)
                .collect(),
        );
        Ok(DetectionResult {
            inliers,
            theta_hat,
            residuals,
            labels,
            stage1_trace: Some(trace),
            survivors: Some(survivors),
            stage2: Some(stage2),
            recovered: false,
            big_m: Some(escalated.big_m),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> (Matrix, Vector) {
        let u = Matrix::from_rows(&[&[1.0, 0.0], &[3.0, 2.0], &[5.0, 4.0], &[7.0, 6.0], &[9.0, 8.0]])
            .unwrap();
        let x = Vector::from_slice(&[4.0, 14.0, 0.0, 34.0, 44.0]).unwrap();
        (u, x)
    }

    #[test]
    fn classify_all_example1() {
        let (u, x) = example1();
        let theta = Vector::from_slice(&[4.0, 1.0]).unwrap();
        let (labels, residuals) = classify_all(&u, &x, &theta, 1e-6).unwrap();
        assert_eq!(residuals.as_slice(), &[0.0, 0.0, 24.0, 0.0, 0.0]);
        assert_eq!(
            labels,
            alloc::vec![Label::Inlier, Label::Inlier, Label::Outlier, Label::Inlier, Label::Inlier]
        );
    }

    #[test]
    fn classify_all_rejects_bad_tau() {
        let (u, x) = example1();
        let theta = Vector::from_slice(&[4.0, 1.0]).unwrap();
        assert!(classify_all(&u, &x, &theta, 0.0).is_err());
    }

    #[test]
    fn detect_example1() {
        let (u, x) = example1();
        let cfg = GlimpsConfig { removal_fraction: 0.2, ..Default::default() };
        let res = glimps_detect(&u, &x, &cfg).unwrap();
        assert!(res.recovered);
        assert_eq!(res.inliers.to_one_based(), alloc::vec![1, 2, 4, 5]);
        assert!((res.theta_hat.get(0) - 4.0).abs() < 1e-9);
        assert!((res.theta_hat.get(1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn detect_all_inliers_reinstates_stage1_removals() {
        let (u, _) = example1();
        let theta = Vector::from_slice(&[2.0, 3.0]).unwrap();
        let x = u.mul_vec(&theta).unwrap();
        let cfg = GlimpsConfig { removal_fraction: 0.2, ..Default::default() };
        let res = glimps_detect(&u, &x, &cfg).unwrap();
        assert!(res.recovered);
        // Stage 1 removed one coordinate; the final classification must
        // bring it back.
        assert_eq!(res.inliers.len(), 5);
        assert!((res.theta_hat.get(0) - 2.0).abs() < 1e-9);
        assert!((res.theta_hat.get(1) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn stage2_labels_mark_stage1_removals_as_outliers() {
        let (u, x) = example1();
        let cfg = GlimpsConfig { removal_fraction: 0.2, ..Default::default() };
        let res = glimps_detect(&u, &x, &cfg).unwrap();
        let s2 = res.stage2_labels(5);
        // Coordinate 3 (index 2) was removed or flagged either way.
        assert_eq!(s2[2], Label::Outlier);
    }
}
