//! Comparison methods: `l1` residual minimization, greedy-assisted
//! variants, the MILP-only wrapper, and the brute-force consensus
//! oracle used for verification.

use alloc::vec;
use alloc::vec::Vec;

use crate::index_set::IndexSet;
use crate::linalg::{least_squares, Matrix, QrFactorization, Vector};
use crate::lp::{solve_lp, LpProblem, LpStatus, Relation};
use crate::pipeline::{classify_all, DetectionResult, GlimpsConfig, Label};
use crate::{Error, Result};

/// Condition-estimate ceiling above which an oracle subset is skipped.
const ORACLE_CONDITION_LIMIT: f64 = 1e10;

/// Method tags for benchmark selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    GreedyOnly,
    MilpOnly,
    L1,
    GreedyPlusL1,
    Oracle,
}

/// Coefficients minimizing the absolute-residual sum `sum |x - U theta|`,
/// solved exactly as a linear program with split residuals.
pub fn l1_fit(u: &Matrix, x: &Vector) -> Result<Vector> {
    let d = u.rows();
    let r = u.cols();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    if d < r + 1 {
        return Err(Error::Config("need d >= r + 1"));
    }
    // Full column rank is a precondition; the LP cannot see it.
    let qr = QrFactorization::new(u)?;
    if !qr.is_full_rank() {
        return Err(Error::RankDeficient { rank: qr.rank(), cols: r });
    }
    // Variables: theta+ (r), theta- (r), pos (d), neg (d).
    let nvars = 2 * r + 2 * d;
    let mut lp = LpProblem::new(nvars);
    for i in 0..d {
        lp.objective[2 * r + i] = 1.0;
        lp.objective[2 * r + d + i] = 1.0;
    }
    for i in 0..d {
        let mut row = vec![0.0; nvars];
        for k in 0..r {
            let a = u.get(i, k);
            row[k] = a;
            row[r + k] = -a;
        }
        row[2 * r + i] = 1.0;
        row[2 * r + d + i] = -1.0;
        lp.push_row(row, Relation::Eq, x.get(i));
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {
            Vector::new((0..r).map(|k| sol.x[k] - sol.x[r + k]).collect::<Vec<_>>())
        }
        // Residual splitting is always feasible and bounded below by 0.
        _ => Err(Error::SimplexStall(sol.iterations)),
    }
}

/// Greedy erasure of `removal_count` coordinates followed by a
/// least-squares fit on the survivors and an ambient classification.
pub fn greedy_only(u: &Matrix, x: &Vector, removal_count: usize, tau: f64) -> Result<DetectionResult> {
    let (survivors, trace) = crate::greedy::greedy_erase_count(u, x, removal_count, 0)?;
    let u_s = u.restrict_rows(&survivors)?;
    let x_s = x.restrict(&survivors)?;
    let theta_hat = least_squares(&u_s, &x_s)?;
    finish_baseline(u, x, theta_hat, tau, Some(trace), Some(survivors))
}

/// Greedy erasure of `removal_count` coordinates followed by an `l1`
/// fit on the survivors and an ambient classification.
pub fn greedy_plus_l1(
    u: &Matrix,
    x: &Vector,
    removal_count: usize,
    tau: f64,
) -> Result<DetectionResult> {
    let (survivors, trace) = crate::greedy::greedy_erase_count(u, x, removal_count, 0)?;
    let u_s = u.restrict_rows(&survivors)?;
    let x_s = x.restrict(&survivors)?;
    let theta_hat = l1_fit(&u_s, &x_s)?;
    finish_baseline(u, x, theta_hat, tau, Some(trace), Some(survivors))
}

/// Plain `l1` fit over the full vector plus classification.
pub fn l1_baseline(u: &Matrix, x: &Vector, tau: f64) -> Result<DetectionResult> {
    let theta_hat = l1_fit(u, x)?;
    finish_baseline(u, x, theta_hat, tau, None, None)
}

/// Stage-2 solver over the full coordinate set: the detector pipeline
/// with the greedy stage disabled.
pub fn milp_only(u: &Matrix, x: &Vector, cfg: &GlimpsConfig) -> Result<DetectionResult> {
    let cfg = GlimpsConfig { removal_fraction: 0.0, ..*cfg };
    crate::pipeline::glimps_detect(u, x, &cfg)
}

/// Same, with an injected solve context.
pub fn milp_only_with(
    u: &Matrix,
    x: &Vector,
    cfg: &GlimpsConfig,
    ctx: &mut crate::milp::SolveContext,
) -> Result<DetectionResult> {
    let cfg = GlimpsConfig { removal_fraction: 0.0, ..*cfg };
    crate::pipeline::glimps_detect_with(u, x, &cfg, ctx)
}

fn finish_baseline(
    u: &Matrix,
    x: &Vector,
    theta_hat: Vector,
    tau: f64,
    trace: Option<crate::greedy::GreedyTrace>,
    survivors: Option<IndexSet>,
) -> Result<DetectionResult> {
    let (labels, residuals) = classify_all(u, x, &theta_hat, tau)?;
    let inliers = IndexSet::from_unsorted(
        labels.iter().enumerate().filter(|(_, &l)| l == Label::Inlier).map(|(i, _)| i).collect(),
    );
    let recovered = inliers.len() > u.cols();
    Ok(DetectionResult {
        inliers,
        theta_hat,
        residuals,
        labels,
        stage1_trace: trace,
        survivors,
        stage2: None,
        recovered,
        big_m: None,
    })
}

/// Number of `r`-subsets of `d` coordinates, saturating.
pub fn subset_count(d: usize, r: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..r {
        c = c.saturating_mul((d - i) as u128) / (i as u128 + 1);
    }
    c
}

/// Exhaustive consensus oracle with the default enumerability guard
/// (`d <= 25`).
pub fn brute_force_consensus(u: &Matrix, x: &Vector, tol: f64) -> Result<(IndexSet, Vector)> {
    if u.rows() > 25 {
        return Err(Error::Budget {
            required: subset_count(u.rows(), u.cols()),
            limit: subset_count(25, u.cols()),
        });
    }
    brute_force_consensus_with_budget(u, x, tol, u128::MAX)
}

/// Exhaustive consensus oracle: fit every full-rank `r`-subset, count
/// the coordinates within `tol`, and return a maximum-cardinality
/// consensus set (ties to the lexicographically smallest) with its
/// refit coefficients.
pub fn brute_force_consensus_with_budget(
    u: &Matrix,
    x: &Vector,
    tol: f64,
    max_subsets: u128,
) -> Result<(IndexSet, Vector)> {
    let d = u.rows();
    let r = u.cols();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    let required = subset_count(d, r);
    if required > max_subsets {
        return Err(Error::Budget { required, limit: max_subsets });
    }

    let mut best: Option<(Vec<usize>, usize)> = None; // (consensus, size)
    let mut subset: Vec<usize> = (0..r).collect();
    loop {
        if let Some(consensus) = consensus_of_subset(u, x, &subset, tol) {
            let size = consensus.len();
            let better = match &best {
                None => true,
                Some((bc, bs)) => size > *bs || (size == *bs && consensus < *bc),
            };
            if better {
                best = Some((consensus, size));
            }
        }
        if !advance_subset(&mut subset, d) {
            break;
        }
    }

    let (members, _) = best.ok_or(Error::DegenerateActiveSet)?;
    let consensus = IndexSet::new(members)?;
    let u_c = u.restrict_rows(&consensus)?;
    let x_c = x.restrict(&consensus)?;
    let theta = least_squares(&u_c, &x_c)?;
    Ok((consensus, theta))
}

/// Lexicographic successor of an ascending index combination.
fn advance_subset(subset: &mut [usize], d: usize) -> bool {
    let r = subset.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if subset[i] < d - (r - i) {
            subset[i] += 1;
            for k in (i + 1)..r {
                subset[k] = subset[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn consensus_of_subset(u: &Matrix, x: &Vector, subset: &[usize], tol: f64) -> Option<Vec<usize>> {
    let idx = IndexSet::new(subset.to_vec()).ok()?;
    let sub = u.restrict_rows(&idx).ok()?;
    let qr = QrFactorization::new(&sub).ok()?;
    if !qr.is_full_rank() || qr.condition_estimate() > ORACLE_CONDITION_LIMIT {
        return None;
    }
    let theta = qr.solve(&x.restrict(&idx).ok()?).ok()?;
    let fit = u.mul_vec(&theta).ok()?;
    let mut consensus = Vec::new();
    for i in 0..u.rows() {
        if crate::float::abs(x.get(i) - fit.get(i)) <= tol {
            consensus.push(i);
        }
    }
    Some(consensus)
}
