//! Greedy erasure: iteratively remove the coordinate whose deletion
//! maximizes the projection ratio of the remaining observation onto
//! the restricted subspace.

use alloc::vec::Vec;

use crate::index_set::IndexSet;
use crate::linalg::{projection_ratio, Matrix, Vector};
use crate::{Error, Result};

/// Configuration for the erasure loop.
#[derive(Debug, Clone, Copy)]
pub struct GreedyConfig {
    /// Fraction of the ambient dimension to remove, in `[0, 1)`.
    pub removal_fraction: f64,
    /// Floor on surviving coordinates (in addition to the r+1 floor).
    pub min_survivors: usize,
}

impl GreedyConfig {
    pub fn new(removal_fraction: f64) -> Self {
        Self { removal_fraction, min_survivors: 0 }
    }
}

/// One removal decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyStep {
    /// Removed ambient coordinate (zero-based).
    pub removed_index: usize,
    /// Projection ratio achieved by the removal.
    pub ratio: f64,
    /// Active-set size before this removal.
    pub active_count_before: usize,
}

/// Record of an erasure run.
#[derive(Debug, Clone, Default)]
pub struct GreedyTrace {
    pub steps: Vec<GreedyStep>,
    /// Total candidate projections computed; for `c` removals from
    /// dimension `d` this is exactly `sum_{k=0}^{c-1} (d - k)`.
    pub projection_calls: usize,
}

impl GreedyTrace {
    /// Removed indices in removal order (zero-based).
    pub fn removed(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.removed_index).collect()
    }
}

/// Scans the active set for the single removal that maximizes the
/// projection ratio of the restriction; ties break to the smallest
/// index. Returns the chosen coordinate and its ratio.
pub fn best_removal(u: &Matrix, x: &Vector, active: &IndexSet) -> Result<(usize, f64)> {
    let r = u.cols();
    if active.len() < r + 2 {
        return Err(Error::Config("active set must keep an overdetermined system after removal"));
    }
    let (choice, calls) = scan_candidates(u, x, active)?;
    debug_assert_eq!(calls, active.len());
    Ok(choice)
}

/// Ratios within this window count as tied; ties break to the
/// smallest index so the scan order never matters.
const RATIO_TIE_TOL: f64 = 1e-12;

/// Inner candidate scan; also reports how many projections were computed.
fn scan_candidates(u: &Matrix, x: &Vector, active: &IndexSet) -> Result<((usize, f64), usize)> {
    let mut best: Option<(usize, f64)> = None;
    let mut calls = 0usize;
    for i in active.iter() {
        calls += 1;
        let candidate = active.without(i);
        let u_c = u.restrict_rows(&candidate)?;
        let x_c = x.restrict(&candidate)?;
        let ratio = match projection_ratio(&u_c, &x_c) {
            Ok(r) => r,
            // The zero vector lies in every subspace.
            Err(Error::ZeroVector) => 1.0,
            // A removal that destroys full rank cannot be scored; skip it.
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        };
        match best {
            Some((_, best_ratio)) if ratio <= best_ratio + RATIO_TIE_TOL => {}
            _ => best = Some((i, ratio)),
        }
    }
    match best {
        Some(choice) => Ok((choice, calls)),
        None => Err(Error::DegenerateActiveSet),
    }
}

/// Runs the erasure loop, removing `floor(removal_fraction * d)`
/// coordinates. Returns the survivor set and the step trace.
pub fn greedy_erase(u: &Matrix, x: &Vector, cfg: &GreedyConfig) -> Result<(IndexSet, GreedyTrace)> {
    if !(0.0..1.0).contains(&cfg.removal_fraction) {
        return Err(Error::Config("removal_fraction must lie in [0, 1)"));
    }
    let d = u.rows();
    let count = crate::float::floor(cfg.removal_fraction * d as f64 + 1e-9) as usize;
    greedy_erase_count(u, x, count, cfg.min_survivors)
}

/// Erasure with an explicit removal count (the "remove as many as the
/// true outliers" knob used by the greedy baselines).
pub fn greedy_erase_count(
    u: &Matrix,
    x: &Vector,
    count: usize,
    min_survivors: usize,
) -> Result<(IndexSet, GreedyTrace)> {
    let d = u.rows();
    let r = u.cols();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    let floor = min_survivors.max(r + 1);
    if count > d.saturating_sub(floor) {
        return Err(Error::Config("removal count leaves fewer survivors than the floor"));
    }
    let mut active = IndexSet::full(d);
    let mut trace = GreedyTrace::default();
    for _ in 0..count {
        let ((index, ratio), calls) = scan_candidates(u, x, &active)?;
        trace.projection_calls += calls;
        trace.steps.push(GreedyStep { removed_index: index, ratio, active_count_before: active.len() });
        active = active.without(index);
    }
    Ok((active, trace))
}
