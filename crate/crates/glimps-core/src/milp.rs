//! Exact consensus search: big-M mixed-integer formulation of inlier
//! selection, solved by branch-and-bound.
//!
//! The noiseless problem minimizes the number of outlier flags `z`
//! subject to `|x - U theta| <= M z` componentwise with `z` binary.
//! Node lower bounds come from the LP relaxation (`z` in `[0, 1]`,
//! fixed components pinned) solved by the in-repo simplex. Once a
//! node's zero-fixed rows pin `theta` (full column rank), the entire
//! subtree collapses to an exact evaluation: every remaining
//! coordinate either fits the pinned coefficients or must be flagged.
//!
//! The noisy variant adds a slack vector `w` and minimizes
//! `sum z + lambda ||w||^2`; node bounds use the fixed-one count plus
//! `lambda` times the least-squares residual on the zero-fixed rows.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::clock::Clock;
use crate::float;
use crate::linalg::{least_squares, Matrix, QrFactorization, Vector};
use crate::lp::{solve_lp, LpProblem, LpStatus, Relation};
use crate::{Error, Result};

/// Componentwise feasibility tolerance for the big-M constraints.
pub const FEAS_TOL: f64 = 1e-7;

/// Noise handling mode of the formulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    /// No slack: inliers must fit exactly (within `FEAS_TOL`).
    Noiseless,
    /// Slack penalized by `lambda * ||w||^2`.
    Noisy(f64),
}

/// A feasible `(z, theta)` pair installed as the initial incumbent.
#[derive(Debug, Clone)]
pub struct WarmStart {
    pub z: Vec<bool>,
    pub theta: Vector,
}

/// Problem data for the stage-2 solver.
#[derive(Debug, Clone)]
pub struct MilpProblem {
    basis: Matrix,
    obs: Vector,
    big_m: f64,
    lambda: LambdaMode,
    time_limit: f64,
    gap_tol: f64,
    warm_start: Option<WarmStart>,
}

impl MilpProblem {
    /// Builds a problem; `basis` is the row-restricted subspace basis
    /// and `obs` the matching observation slice.
    pub fn new(basis: Matrix, obs: Vector, big_m: f64, lambda: LambdaMode) -> Result<Self> {
        if basis.rows() != obs.len() {
            return Err(Error::DimensionMismatch { expected: basis.rows(), got: obs.len() });
        }
        if !(big_m > 0.0) || !big_m.is_finite() {
            return Err(Error::Config("big_m must be positive and finite"));
        }
        if let LambdaMode::Noisy(l) = lambda {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::Config("lambda must be finite and nonnegative"));
            }
        }
        Ok(Self {
            basis,
            obs,
            big_m,
            lambda,
            time_limit: f64::INFINITY,
            gap_tol: match lambda {
                LambdaMode::Noiseless => 0.0,
                LambdaMode::Noisy(_) => 1e-6,
            },
            warm_start: None,
        })
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = seconds;
        self
    }

    pub fn with_gap_tol(mut self, gap_tol: f64) -> Self {
        self.gap_tol = gap_tol;
        self
    }

    /// Installs a warm start after checking it satisfies the big-M
    /// constraints it claims.
    pub fn with_warm_start(mut self, warm: WarmStart) -> Result<Self> {
        if warm.z.len() != self.obs.len() || warm.theta.len() != self.basis.cols() {
            return Err(Error::InfeasibleWarmStart);
        }
        let resid = residuals(&self.basis, &self.obs, &warm.theta);
        for (i, &r) in resid.iter().enumerate() {
            let limit = match (self.lambda, warm.z[i]) {
                (_, true) => self.big_m + FEAS_TOL,
                (LambdaMode::Noiseless, false) => FEAS_TOL,
                // Noisy zero-flagged rows absorb their residual into w.
                (LambdaMode::Noisy(_), false) => f64::INFINITY,
            };
            if float::abs(r) > limit {
                return Err(Error::InfeasibleWarmStart);
            }
        }
        self.warm_start = Some(warm);
        Ok(self)
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn obs(&self) -> &Vector {
        &self.obs
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    pub fn lambda(&self) -> LambdaMode {
        self.lambda
    }

    pub fn time_limit(&self) -> f64 {
        self.time_limit
    }

    pub fn gap_tol(&self) -> f64 {
        self.gap_tol
    }
}

/// Outcome quality of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Bound met the incumbent within the gap tolerance.
    Optimal,
    /// Wall clock expired; the incumbent is the best solution found.
    FeasibleTimeLimit,
    /// No assignment satisfies the constraints under the given big-M.
    Infeasible,
}

/// Solver output.
#[derive(Debug, Clone)]
pub struct MilpSolution {
    /// Outlier flags, one per restricted coordinate.
    pub z: Vec<bool>,
    pub theta: Vector,
    /// Slack vector; all-zero in noiseless mode.
    pub w: Vector,
    pub objective: f64,
    pub status: SolveStatus,
    pub nodes_explored: usize,
    pub wall_time: f64,
    /// Certified lower bound at exit.
    pub best_bound: f64,
    /// A candidate with a larger consensus was seen but rejected only
    /// because a flagged residual exceeded big-M; the constant is too
    /// small and the caller should escalate.
    pub m_saturated: bool,
}

impl MilpSolution {
    /// Indices with `z = 0`, i.e. the selected consensus (zero-based,
    /// within the restricted coordinate frame).
    pub fn consensus(&self) -> Vec<usize> {
        self.z.iter().enumerate().filter(|(_, &o)| !o).map(|(i, _)| i).collect()
    }

    pub fn consensus_size(&self) -> usize {
        self.z.iter().filter(|&&o| !o).count()
    }
}

/// Big-M from problem structure: `safety * max_i |x_i - U_i theta|`,
/// floored at `1e-6` so an exact fit still yields a usable constant.
pub fn choose_big_m(u: &Matrix, x: &Vector, theta_init: &Vector, safety: f64) -> Result<f64> {
    if safety < 1.0 {
        return Err(Error::Config("safety factor must be at least 1"));
    }
    if theta_init.len() != u.cols() || x.len() != u.rows() {
        return Err(Error::DimensionMismatch { expected: u.cols(), got: theta_init.len() });
    }
    let worst = residuals(u, x, theta_init).iter().fold(0.0f64, |acc, r| acc.max(float::abs(*r)));
    Ok((safety * worst).max(1e-6))
}

/// `x - U theta` componentwise.
pub(crate) fn residuals(u: &Matrix, x: &Vector, theta: &Vector) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.rows());
    for i in 0..u.rows() {
        let fit: f64 = u.row(i).iter().zip(theta.as_slice()).map(|(a, t)| a * t).sum();
        out.push(x.get(i) - fit);
    }
    out
}

/// Hooks injected into a solve: a time source and an optional log sink
/// receiving `node=<n> bound=<b> incumbent=<i> gap=<g> t=<s>` lines.
pub struct SolveContext<'a> {
    pub clock: &'a dyn Clock,
    pub log: Option<&'a mut dyn FnMut(&str)>,
    /// Emit a log line every this many nodes (when a sink is present).
    pub log_every: usize,
}

impl<'a> SolveContext<'a> {
    pub fn new(clock: &'a dyn Clock) -> Self {
        Self { clock, log: None, log_every: 256 }
    }

    pub fn with_log(clock: &'a dyn Clock, log: &'a mut dyn FnMut(&str), log_every: usize) -> Self {
        Self { clock, log: Some(log), log_every }
    }
}

/// Solves the noiseless formulation with a wall clock (requires `std`).
#[cfg(feature = "std")]
pub fn solve_noiseless(p: &MilpProblem) -> Result<MilpSolution> {
    let clock = crate::clock::WallClock::start();
    solve_noiseless_with(p, &mut SolveContext::new(&clock))
}

/// Solves the noiseless formulation with no time source; the time
/// limit is effectively disabled.
#[cfg(not(feature = "std"))]
pub fn solve_noiseless(p: &MilpProblem) -> Result<MilpSolution> {
    solve_noiseless_with(p, &mut SolveContext::new(&crate::clock::NoClock))
}

/// Solves the noisy formulation with a wall clock (requires `std`).
#[cfg(feature = "std")]
pub fn solve_noisy(p: &MilpProblem) -> Result<MilpSolution> {
    let clock = crate::clock::WallClock::start();
    solve_noisy_with(p, &mut SolveContext::new(&clock))
}

/// Solves the noisy formulation with no time source.
#[cfg(not(feature = "std"))]
pub fn solve_noisy(p: &MilpProblem) -> Result<MilpSolution> {
    solve_noisy_with(p, &mut SolveContext::new(&crate::clock::NoClock))
}

pub fn solve_noiseless_with(p: &MilpProblem, ctx: &mut SolveContext) -> Result<MilpSolution> {
    if !matches!(p.lambda, LambdaMode::Noiseless) {
        return Err(Error::Config("problem is not in noiseless mode"));
    }
    if p.obs.len() < p.basis.cols() + 1 {
        return Err(Error::Config("need at least r+1 coordinates"));
    }
    BranchAndBound::new(p, ctx).run()
}

pub fn solve_noisy_with(p: &MilpProblem, ctx: &mut SolveContext) -> Result<MilpSolution> {
    let LambdaMode::Noisy(_) = p.lambda else {
        return Err(Error::Config("problem is not in noisy mode"));
    };
    BranchAndBound::new(p, ctx).run()
}

/// LP-relaxation value of the full problem at the root node
/// (noiseless mode). Used by the MPS round-trip checks and tests.
pub fn root_relaxation_value(p: &MilpProblem) -> Result<f64> {
    if !matches!(p.lambda, LambdaMode::Noiseless) {
        return Err(Error::Config("LP relaxation applies to the noiseless mode"));
    }
    let lp = build_node_lp(&p.basis, &p.obs, p.big_m, &[], &[]);
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        LpStatus::Infeasible => Err(Error::Config("root relaxation infeasible")),
        LpStatus::Unbounded => Err(Error::Config("root relaxation unbounded")),
    }
}

// ---------------------------------------------------------------------------
// Branch and bound internals
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Node {
    fixed_zero: Vec<usize>,
    fixed_one: Vec<usize>,
    bound: f64,
    depth: usize,
}

struct HeapEntry {
    bound: f64,
    seq: u64,
    node: Node,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.seq == other.seq
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // Max-heap: best (smallest) bound wins; newest node on ties so
        // the search dives before it sweeps.
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(self.seq.cmp(&other.seq))
    }
}

#[derive(Clone)]
struct Incumbent {
    z: Vec<bool>,
    theta: Vector,
    objective: f64,
}

struct BranchAndBound<'a, 'b> {
    problem: &'a MilpProblem,
    ctx: &'a mut SolveContext<'b>,
    n: usize,
    r: usize,
    incumbent: Option<Incumbent>,
    nodes: usize,
    seq: u64,
    heap: BinaryHeap<HeapEntry>,
    /// Monotone global lower bound: the smallest open-node bound.
    frontier_bound: f64,
    /// Best objective among candidates that failed only on big-M.
    m_blocked_best: f64,
}

enum NodeOutcome {
    Closed,
    Branch { variable: usize, down_bound: f64, up_bound: f64 },
}

impl<'a, 'b> BranchAndBound<'a, 'b> {
    fn new(problem: &'a MilpProblem, ctx: &'a mut SolveContext<'b>) -> Self {
        let n = problem.obs.len();
        let r = problem.basis.cols();
        Self {
            problem,
            ctx,
            n,
            r,
            incumbent: None,
            nodes: 0,
            seq: 0,
            heap: BinaryHeap::new(),
            frontier_bound: 0.0,
            m_blocked_best: f64::INFINITY,
        }
    }

    fn noisy_lambda(&self) -> Option<f64> {
        match self.problem.lambda {
            LambdaMode::Noiseless => None,
            LambdaMode::Noisy(l) => Some(l),
        }
    }

    /// Objective value of a complete assignment.
    fn assignment_objective(&self, z: &[bool], theta: &Vector) -> f64 {
        let flags = z.iter().filter(|&&b| b).count() as f64;
        match self.noisy_lambda() {
            None => flags,
            Some(l) => {
                let resid = residuals(&self.problem.basis, &self.problem.obs, theta);
                let ssr: f64 = resid
                    .iter()
                    .zip(z)
                    .filter(|(_, &flag)| !flag)
                    .map(|(r, _)| r * r)
                    .sum();
                flags + l * ssr
            }
        }
    }

    /// Checks big-M feasibility of a complete assignment.
    fn assignment_feasible(&self, z: &[bool], theta: &Vector) -> bool {
        let resid = residuals(&self.problem.basis, &self.problem.obs, theta);
        for (i, &r) in resid.iter().enumerate() {
            let limit = if z[i] {
                self.problem.big_m * (1.0 + 1e-9) + FEAS_TOL
            } else if self.noisy_lambda().is_some() {
                f64::INFINITY
            } else {
                FEAS_TOL
            };
            if float::abs(r) > limit {
                return false;
            }
        }
        true
    }

    fn offer_incumbent(&mut self, z: Vec<bool>, theta: Vector) {
        let objective = self.assignment_objective(&z, &theta);
        let better = match &self.incumbent {
            None => true,
            Some(inc) => objective < inc.objective - 1e-12,
        };
        if !self.assignment_feasible(&z, &theta) {
            // Candidates are built by residual thresholding, so the
            // only way they can fail is a flagged residual above the
            // big-M ceiling. Remember the best assignment lost this
            // way; if it beats the final incumbent, the constant was
            // too small.
            if self.zero_rows_fit(&z, &theta) {
                self.m_blocked_best = self.m_blocked_best.min(objective);
            }
            let _ = better;
            return;
        }
        if better {
            self.incumbent = Some(Incumbent { z, theta, objective });
            self.log_line();
        }
    }

    /// True when every zero-flagged coordinate fits `theta` within the
    /// mode's tolerance, i.e. the assignment is sound apart from big-M.
    fn zero_rows_fit(&self, z: &[bool], theta: &Vector) -> bool {
        if self.noisy_lambda().is_some() {
            return true;
        }
        let resid = residuals(&self.problem.basis, &self.problem.obs, theta);
        resid.iter().zip(z).all(|(r, &flag)| flag || float::abs(*r) <= FEAS_TOL)
    }

    /// True when a candidate better than the incumbent was rejected
    /// solely for exceeding big-M.
    fn saturation_abort(&self) -> bool {
        match &self.incumbent {
            Some(inc) => self.m_blocked_best < inc.objective - 1e-9,
            None => self.m_blocked_best.is_finite(),
        }
    }

    fn prune_threshold(&self) -> f64 {
        match &self.incumbent {
            None => f64::INFINITY,
            Some(inc) => match self.problem.lambda {
                // Integral objective: a node must admit a strictly
                // better integer value to stay alive.
                LambdaMode::Noiseless => inc.objective - 1.0 + 1e-6,
                LambdaMode::Noisy(_) => {
                    inc.objective - self.problem.gap_tol * inc.objective.abs().max(1.0)
                }
            },
        }
    }

    fn log_line(&mut self) {
        if self.ctx.log.is_none() {
            return;
        }
        let bound = self.frontier_bound;
        let incumbent = self.incumbent.as_ref().map_or(f64::INFINITY, |i| i.objective);
        let gap = if incumbent.is_finite() {
            (incumbent - bound).max(0.0) / incumbent.abs().max(1.0)
        } else {
            f64::INFINITY
        };
        let elapsed = self.ctx.clock.elapsed_secs();
        let line: String = format!(
            "node={} bound={:.6} incumbent={:.6} gap={:.6e} t={:.3}",
            self.nodes, bound, incumbent, gap, elapsed
        );
        if let Some(log) = self.ctx.log.as_deref_mut() {
            log(&line);
        }
    }

    fn push_node(&mut self, node: Node) {
        if node.bound > self.prune_threshold() {
            return;
        }
        self.seq += 1;
        self.heap.push(HeapEntry { bound: node.bound, seq: self.seq, node });
    }

    fn run(mut self) -> Result<MilpSolution> {
        if let Some(warm) = self.problem.warm_start.clone() {
            self.offer_incumbent(warm.z, warm.theta);
        }
        // An incumbent at the trivial lower bound is optimal outright;
        // this also sidesteps the degenerate relaxations that a
        // floor-level big-M produces when every coordinate fits.
        if self.incumbent.as_ref().is_some_and(|inc| inc.objective <= 1e-12) {
            return Ok(self.finish(SolveStatus::Optimal));
        }

        // Root relaxation doubles as the structural feasibility check:
        // in noiseless mode the all-ones assignment is feasible iff
        // some theta keeps every residual within big-M. A feasible
        // incumbent overrides a numerically confused verdict.
        if self.noisy_lambda().is_none() && self.incumbent.is_none() {
            let lp = build_node_lp(&self.problem.basis, &self.problem.obs, self.problem.big_m, &[], &[]);
            match solve_lp(&lp) {
                Ok(sol) => match sol.status {
                    LpStatus::Infeasible => {
                        self.frontier_bound = f64::INFINITY;
                        return Ok(self.finish(SolveStatus::Infeasible));
                    }
                    LpStatus::Unbounded => return Err(Error::Config("relaxation unbounded")),
                    LpStatus::Optimal => {}
                },
                // A stalled root relaxation is inconclusive; the tree
                // settles feasibility on its own.
                Err(Error::SimplexStall(_)) => {}
                Err(e) => return Err(e),
            }
        }

        if self.noisy_lambda().is_none() {
            self.root_heuristics();
            if self.incumbent.as_ref().is_some_and(|inc| inc.objective <= 1e-12) {
                return Ok(self.finish(SolveStatus::Optimal));
            }
        }

        let root = Node { fixed_zero: Vec::new(), fixed_one: Vec::new(), bound: 0.0, depth: 0 };
        self.push_node(root);

        let mut status = SolveStatus::Optimal;
        while let Some(entry) = self.heap.pop() {
            self.frontier_bound = self.frontier_bound.max(entry.bound);
            if entry.bound > self.prune_threshold() {
                // Best-bound order: everything left is pruned too.
                if let Some(inc) = &self.incumbent {
                    self.frontier_bound = inc.objective;
                }
                break;
            }
            if self.ctx.clock.elapsed_secs() > self.problem.time_limit {
                status = SolveStatus::FeasibleTimeLimit;
                break;
            }
            if self.saturation_abort() {
                // A strictly better assignment is blocked only by the
                // big-M ceiling: searching under this constant cannot
                // reach it. Return the incumbent so the caller can
                // escalate with the remaining budget.
                status = SolveStatus::FeasibleTimeLimit;
                break;
            }
            self.nodes += 1;
            if self.ctx.log.is_some() && self.ctx.log_every > 0 && self.nodes.is_multiple_of(self.ctx.log_every) {
                self.log_line();
            }
            let node = entry.node;
            let outcome = match self.noisy_lambda() {
                None => self.process_noiseless(&node)?,
                Some(lambda) => self.process_noisy(&node, lambda)?,
            };
            if let NodeOutcome::Branch { variable, down_bound, up_bound } = outcome {
                let mut down_zero = node.fixed_zero.clone();
                down_zero.push(variable);
                let mut up_one = node.fixed_one.clone();
                up_one.push(variable);
                // Push the up child first so the down child, which pins
                // theta faster, is explored first on ties.
                self.push_node(Node {
                    fixed_zero: node.fixed_zero.clone(),
                    fixed_one: up_one,
                    bound: up_bound,
                    depth: node.depth + 1,
                });
                self.push_node(Node {
                    fixed_zero: down_zero,
                    fixed_one: node.fixed_one.clone(),
                    bound: down_bound,
                    depth: node.depth + 1,
                });
            }
        }

        if status == SolveStatus::Optimal {
            if let Some(inc) = &self.incumbent {
                self.frontier_bound = inc.objective;
            }
        }
        if self.incumbent.is_none() {
            // Exhausted without any feasible assignment: big-M excluded
            // even the all-ones fallback.
            return Ok(self.finish(SolveStatus::Infeasible));
        }
        Ok(self.finish(status))
    }

    fn finish(&mut self, status: SolveStatus) -> MilpSolution {
        self.log_line();
        let wall_time = self.ctx.clock.elapsed_secs();
        let best_bound = self.frontier_bound;
        match (&self.incumbent, status) {
            (Some(inc), SolveStatus::Optimal | SolveStatus::FeasibleTimeLimit) => {
                let w = match self.noisy_lambda() {
                    None => Vector::zeros(self.n),
                    Some(_) => {
                        let resid = residuals(&self.problem.basis, &self.problem.obs, &inc.theta);
                        let mut w = Vector::zeros(self.n);
                        for i in 0..self.n {
                            if !inc.z[i] {
                                w.set(i, resid[i]);
                            }
                        }
                        w
                    }
                };
                MilpSolution {
                    z: inc.z.clone(),
                    theta: inc.theta.clone(),
                    w,
                    objective: inc.objective,
                    status,
                    nodes_explored: self.nodes,
                    wall_time,
                    best_bound,
                    m_saturated: self.m_blocked_best < inc.objective - 1e-9,
                }
            }
            _ => MilpSolution {
                z: vec![true; self.n],
                theta: Vector::zeros(self.r),
                w: Vector::zeros(self.n),
                objective: f64::INFINITY,
                status: SolveStatus::Infeasible,
                nodes_explored: self.nodes,
                wall_time,
                best_bound,
                m_saturated: true,
            },
        }
    }

    /// Primal heuristics run once before the tree search: a residual
    /// peeling dive on the LP relaxation and seeded consensus
    /// sampling. Both only install incumbents; bounds and optimality
    /// proofs stay with the branch-and-bound tree.
    fn root_heuristics(&mut self) {
        let deadline = self
            .ctx
            .clock
            .elapsed_secs()
            + (0.25 * self.problem.time_limit).clamp(0.5, 8.0);
        self.peel_dive(deadline);
        self.consensus_sampling(deadline);
    }

    /// Iterated absolute-residual fit: solve the relaxation, flag the
    /// worst-fitting coordinate, repeat. Every iterate is rounded and
    /// polished into an incumbent candidate.
    fn peel_dive(&mut self, deadline: f64) {
        let root = Node { fixed_zero: Vec::new(), fixed_one: Vec::new(), bound: 0.0, depth: 0 };
        let mut flagged: Vec<usize> = Vec::new();
        while self.n - flagged.len() > self.r + 1 {
            if self.ctx.clock.elapsed_secs() > deadline {
                return;
            }
            let lp = build_node_lp(
                &self.problem.basis,
                &self.problem.obs,
                self.problem.big_m,
                &[],
                &flagged,
            );
            let Ok(sol) = solve_lp(&lp) else { return };
            if sol.status != LpStatus::Optimal {
                return;
            }
            let theta = match Vector::new(
                (0..self.r).map(|k| sol.x[k] - sol.x[self.r + k]).collect::<Vec<_>>(),
            ) {
                Ok(t) => t,
                Err(_) => return,
            };
            let resid = residuals(&self.problem.basis, &self.problem.obs, &theta);
            self.round_and_offer(&theta, &resid, &root);
            // Flag the worst remaining coordinate and peel again.
            let next = (0..self.n)
                .filter(|j| !flagged.contains(j))
                .max_by(|&a, &b| {
                    float::abs(resid[a])
                        .partial_cmp(&float::abs(resid[b]))
                        .unwrap_or(core::cmp::Ordering::Equal)
                });
            match next {
                Some(j) if float::abs(resid[j]) > FEAS_TOL => flagged.push(j),
                // Everything left fits; the rounding above captured it.
                _ => return,
            }
        }
    }

    /// Seeded sampling of r-subsets: pin coefficients on each subset,
    /// measure its consensus, and keep improvements. Half the draws
    /// are uniform, half are guided by the residuals of the incumbent.
    fn consensus_sampling(&mut self, deadline: f64) {
        use crate::rng::Xoshiro256PlusPlus;
        let n = self.n;
        let r = self.r;
        if n <= r + 1 {
            return;
        }
        let samples = (600 * n).min(60_000);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x5eed_c0de ^ (n as u64) << 8 ^ r as u64);
        let mut pool: Vec<usize> = (0..n).collect();
        let mut best_consensus = self
            .incumbent
            .as_ref()
            .map_or(0, |inc| inc.z.iter().filter(|&&b| !b).count());
        let mut subset = vec![0usize; r];
        for s in 0..samples {
            if s % 512 == 0 {
                if self.ctx.clock.elapsed_secs() > deadline {
                    return;
                }
                // Refresh the guided pool from the incumbent fit.
                if let Some(inc) = &self.incumbent {
                    let resid = residuals(&self.problem.basis, &self.problem.obs, &inc.theta);
                    pool.sort_by(|&a, &b| {
                        float::abs(resid[a])
                            .partial_cmp(&float::abs(resid[b]))
                            .unwrap_or(core::cmp::Ordering::Equal)
                    });
                }
            }
            let guided = self.incumbent.is_some() && s % 2 == 1;
            let limit = if guided { (n / 2).max(2 * (r + 1)).min(n) } else { n };
            // Draw r distinct indices from the pool prefix.
            let mut filled = 0;
            while filled < r {
                let pick = pool[(rng.next_u64() % limit as u64) as usize];
                if !subset[..filled].contains(&pick) {
                    subset[filled] = pick;
                    filled += 1;
                }
            }
            let Some(theta) = self.refit(&subset) else { continue };
            let resid = residuals(&self.problem.basis, &self.problem.obs, &theta);
            let consensus = resid.iter().filter(|rv| float::abs(**rv) <= FEAS_TOL).count();
            if consensus > best_consensus {
                best_consensus = consensus;
                // Polish on the full consensus before offering.
                let rows: Vec<usize> = (0..n).filter(|&i| float::abs(resid[i]) <= FEAS_TOL).collect();
                let theta_polished = self.refit(&rows).unwrap_or(theta);
                let resid2 = residuals(&self.problem.basis, &self.problem.obs, &theta_polished);
                let z: Vec<bool> = resid2.iter().map(|rv| float::abs(*rv) > FEAS_TOL).collect();
                self.offer_incumbent(z, theta_polished);
            }
        }
    }

    /// Noiseless node: pin theta when the zero-fixed rows reach full
    /// rank, otherwise bound through the LP relaxation.
    fn process_noiseless(&mut self, node: &Node) -> Result<NodeOutcome> {
        if node.fixed_zero.len() >= self.r {
            if let Some(outcome) = self.try_pinned_evaluation(node)? {
                return Ok(outcome);
            }
        }
        let lp = build_node_lp(
            &self.problem.basis,
            &self.problem.obs,
            self.problem.big_m,
            &node.fixed_zero,
            &node.fixed_one,
        );
        let lp_x = match solve_lp(&lp) {
            Ok(sol) => match sol.status {
                LpStatus::Infeasible => return Ok(NodeOutcome::Closed),
                LpStatus::Unbounded => return Err(Error::Config("node relaxation unbounded")),
                LpStatus::Optimal => sol.x,
            },
            // Degenerate relaxations may stall the simplex; branch on
            // the incumbent's residuals with the inherited bound.
            Err(Error::SimplexStall(_)) => {
                return Ok(self.stalled_branch(node));
            }
            Err(e) => return Err(e),
        };
        let r = self.r;
        let theta_lp = Vector::new(
            (0..r).map(|k| lp_x[k] - lp_x[r + k]).collect::<Vec<_>>(),
        )?;
        let resid = residuals(&self.problem.basis, &self.problem.obs, &theta_lp);

        // Free coordinates, aligned with the z columns of the LP.
        let mut is_fixed = vec![0u8; self.n];
        for &j in &node.fixed_zero {
            is_fixed[j] = 1;
        }
        for &j in &node.fixed_one {
            is_fixed[j] = 2;
        }
        let free: Vec<usize> = (0..self.n).filter(|&j| is_fixed[j] == 0).collect();
        let z_lp = &lp_x[2 * r..];
        debug_assert_eq!(z_lp.len(), free.len());

        let lp_value = node.fixed_one.len() as f64 + z_lp.iter().sum::<f64>();
        // Integral objective: round the bound up.
        let bound = node.fixed_one.len() as f64
            + float::ceil(z_lp.iter().sum::<f64>() - 1e-6).max(0.0);
        if bound > self.prune_threshold() {
            return Ok(NodeOutcome::Closed);
        }

        // Rounding heuristic: complete the LP point, then polish by
        // refitting on the smallest residuals.
        self.round_and_offer(&theta_lp, &resid, node);

        // Integer-feasible LP point closes the node.
        let mut fractional: Option<(usize, f64)> = None; // (free position, score)
        for (pos, &zv) in z_lp.iter().enumerate() {
            let frac = zv.min(1.0 - zv).max(0.0);
            if frac > 1e-7 {
                let score = frac;
                match fractional {
                    Some((best_pos, best))
                        if best > score
                            || (best == score
                                && float::abs(resid[free[best_pos]]) >= float::abs(resid[free[pos]])) => {}
                    _ => fractional = Some((pos, score)),
                }
            }
        }
        let Some((pos, _)) = fractional else {
            // All-integral relaxation: its value is attained exactly.
            let mut z = vec![false; self.n];
            for &j in &node.fixed_one {
                z[j] = true;
            }
            for (pos, &zv) in z_lp.iter().enumerate() {
                if zv > 0.5 {
                    z[free[pos]] = true;
                }
            }
            // Refit on the zero set for a numerically clean theta.
            let zero_rows: Vec<usize> = (0..self.n).filter(|&i| !z[i]).collect();
            let theta = self.refit(&zero_rows).unwrap_or(theta_lp);
            self.offer_incumbent(z, theta);
            return Ok(NodeOutcome::Closed);
        };

        let branch_var = free[pos];
        let up_bound = lp_value.max(node.fixed_one.len() as f64 + 1.0);
        Ok(NodeOutcome::Branch { variable: branch_var, down_bound: lp_value, up_bound })
    }

    /// When the zero-fixed rows pin theta exactly, the subtree has a
    /// closed-form optimum: flag precisely the coordinates that do not
    /// fit. Returns `None` when the restriction is rank-deficient.
    fn try_pinned_evaluation(&mut self, node: &Node) -> Result<Option<NodeOutcome>> {
        let rows = crate::index_set::IndexSet::from_unsorted(node.fixed_zero.clone());
        let sub = self.problem.basis.restrict_rows(&rows)?;
        let qr = QrFactorization::new(&sub)?;
        if !qr.is_full_rank() {
            return Ok(None);
        }
        let obs_sub = self.problem.obs.restrict(&rows)?;
        let theta = qr.solve(&obs_sub)?;
        let resid = residuals(&self.problem.basis, &self.problem.obs, &theta);
        // Zero-fixed rows must fit; otherwise the node is infeasible.
        for &j in &node.fixed_zero {
            if float::abs(resid[j]) > FEAS_TOL {
                return Ok(Some(NodeOutcome::Closed));
            }
        }
        let mut z = vec![false; self.n];
        for &j in &node.fixed_one {
            z[j] = true;
        }
        let mut is_fixed = vec![false; self.n];
        for &j in node.fixed_zero.iter().chain(&node.fixed_one) {
            is_fixed[j] = true;
        }
        for j in 0..self.n {
            if !is_fixed[j] && float::abs(resid[j]) > FEAS_TOL {
                z[j] = true;
            }
        }
        // The pinned completion is infeasible outright when a flagged
        // residual overflows big-M (no descendant can fix it).
        self.offer_incumbent(z, theta);
        Ok(Some(NodeOutcome::Closed))
    }

    /// Builds an integer candidate from a relaxation point and offers
    /// it (plus a least-squares polished variant) as incumbent.
    fn round_and_offer(&mut self, theta: &Vector, resid: &[f64], node: &Node) {
        let mut z = vec![false; self.n];
        for (i, &r) in resid.iter().enumerate() {
            if float::abs(r) > FEAS_TOL {
                z[i] = true;
            }
        }
        for &j in &node.fixed_one {
            z[j] = true;
        }
        self.offer_incumbent(z, theta.clone());

        // Polish: refit on the r+1 smallest residuals and reclassify.
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| {
            float::abs(resid[a]).partial_cmp(&float::abs(resid[b])).unwrap_or(core::cmp::Ordering::Equal)
        });
        let take = (self.r + 1).min(self.n);
        let seed_rows: Vec<usize> = order[..take].to_vec();
        if let Some(theta2) = self.refit(&seed_rows) {
            let resid2 = residuals(&self.problem.basis, &self.problem.obs, &theta2);
            let mut z2 = vec![false; self.n];
            for (i, &r) in resid2.iter().enumerate() {
                if float::abs(r) > FEAS_TOL {
                    z2[i] = true;
                }
            }
            for &j in &node.fixed_one {
                z2[j] = true;
            }
            self.offer_incumbent(z2, theta2);
        }
    }

    /// Branch selection when the node relaxation stalled: largest
    /// residual against the incumbent coefficients (or the zero
    /// vector), bound inherited from the parent.
    fn stalled_branch(&mut self, node: &Node) -> NodeOutcome {
        let theta = self
            .incumbent
            .as_ref()
            .map(|inc| inc.theta.clone())
            .unwrap_or_else(|| Vector::zeros(self.r));
        let resid = residuals(&self.problem.basis, &self.problem.obs, &theta);
        let mut is_fixed = vec![false; self.n];
        for &j in node.fixed_zero.iter().chain(&node.fixed_one) {
            is_fixed[j] = true;
        }
        let variable = (0..self.n)
            .filter(|&j| !is_fixed[j])
            .max_by(|&a, &b| {
                float::abs(resid[a])
                    .partial_cmp(&float::abs(resid[b]))
                    .unwrap_or(core::cmp::Ordering::Equal)
            });
        match variable {
            Some(variable) => NodeOutcome::Branch {
                variable,
                down_bound: node.bound,
                up_bound: node.bound.max(node.fixed_one.len() as f64 + 1.0),
            },
            None => NodeOutcome::Closed,
        }
    }

    fn refit(&self, rows: &[usize]) -> Option<Vector> {
        if rows.len() < self.r {
            return None;
        }
        let idx = crate::index_set::IndexSet::from_unsorted(rows.to_vec());
        let sub = self.problem.basis.restrict_rows(&idx).ok()?;
        let obs = self.problem.obs.restrict(&idx).ok()?;
        least_squares(&sub, &obs).ok()
    }

    /// Noisy node: bound by fixed-one count plus lambda times the
    /// least-squares residual on the zero-fixed rows.
    fn process_noisy(&mut self, node: &Node, lambda: f64) -> Result<NodeOutcome> {
        let (ssr, theta_fit) = self.zero_set_fit(&node.fixed_zero);
        let bound = node.fixed_one.len() as f64 + lambda * ssr;
        if bound > self.prune_threshold() {
            return Ok(NodeOutcome::Closed);
        }

        let mut is_fixed = vec![0u8; self.n];
        for &j in &node.fixed_zero {
            is_fixed[j] = 1;
        }
        for &j in &node.fixed_one {
            is_fixed[j] = 2;
        }
        let free: Vec<usize> = (0..self.n).filter(|&j| is_fixed[j] == 0).collect();

        // Reference coefficients for scoring: the zero-set fit when it
        // exists, otherwise a fit over everything not fixed to one.
        let theta_ref = match theta_fit {
            Some(t) => t,
            None => {
                let rows: Vec<usize> = (0..self.n).filter(|&j| is_fixed[j] != 2).collect();
                match self.refit(&rows) {
                    Some(t) => t,
                    None => Vector::zeros(self.r),
                }
            }
        };
        let resid = residuals(&self.problem.basis, &self.problem.obs, &theta_ref);

        if free.is_empty() {
            // Complete assignment; evaluate exactly.
            let mut z = vec![false; self.n];
            for &j in &node.fixed_one {
                z[j] = true;
            }
            self.offer_incumbent(z, theta_ref);
            return Ok(NodeOutcome::Closed);
        }

        // Myopic completion heuristic with a couple of refit rounds.
        self.noisy_completion(node, &free, &theta_ref, lambda);

        // Branch on the most ambiguous coordinate: implied z closest
        // to one half, ties to the largest residual.
        let mut best: Option<(usize, f64, f64)> = None; // (coord, frac score, |resid|)
        for &j in &free {
            let implied = (lambda * resid[j] * resid[j]).min(1.0);
            let frac = 0.5 - float::abs(implied - 0.5);
            let mag = float::abs(resid[j]);
            match best {
                Some((_, bf, bm)) if bf > frac || (bf == frac && bm >= mag) => {}
                _ => best = Some((j, frac, mag)),
            }
        }
        let (variable, _, _) = best.expect("free set nonempty");
        let up_bound = bound.max(node.fixed_one.len() as f64 + 1.0 + lambda * ssr);
        Ok(NodeOutcome::Branch { variable, down_bound: bound, up_bound })
    }

    /// Least-squares fit and SSR of the zero-fixed rows. Fewer than
    /// r+1 rows fit exactly, contributing zero.
    fn zero_set_fit(&self, fixed_zero: &[usize]) -> (f64, Option<Vector>) {
        if fixed_zero.len() <= self.r {
            return (0.0, None);
        }
        let idx = crate::index_set::IndexSet::from_unsorted(fixed_zero.to_vec());
        let Ok(sub) = self.problem.basis.restrict_rows(&idx) else {
            return (0.0, None);
        };
        let Ok(obs) = self.problem.obs.restrict(&idx) else {
            return (0.0, None);
        };
        match least_squares(&sub, &obs) {
            Ok(theta) => {
                let ssr = residuals(&sub, &obs, &theta).iter().map(|r| r * r).sum();
                (ssr, Some(theta))
            }
            // Rank-deficient restriction: zero is still a valid bound.
            Err(_) => (0.0, None),
        }
    }

    fn noisy_completion(&mut self, node: &Node, free: &[usize], theta_start: &Vector, lambda: f64) {
        let mut theta = theta_start.clone();
        for _ in 0..3 {
            let resid = residuals(&self.problem.basis, &self.problem.obs, &theta);
            let mut zero_rows: Vec<usize> = node.fixed_zero.clone();
            for &j in free {
                if lambda * resid[j] * resid[j] < 1.0 {
                    zero_rows.push(j);
                }
            }
            match self.refit(&zero_rows) {
                Some(t) => theta = t,
                None => break,
            }
        }
        let resid = residuals(&self.problem.basis, &self.problem.obs, &theta);
        let mut z = vec![false; self.n];
        for &j in &node.fixed_one {
            z[j] = true;
        }
        for &j in free {
            if lambda * resid[j] * resid[j] >= 1.0 {
                z[j] = true;
            }
        }
        self.offer_incumbent(z, theta);
    }
}

/// Node LP for the noiseless relaxation. Columns: `theta+ (r)`,
/// `theta- (r)`, then one `z` per free coordinate, bounded by `[0,1]`.
/// Zero-fixed rows become equalities, one-fixed rows keep their big-M
/// slack as constant bounds.
fn build_node_lp(
    basis: &Matrix,
    obs: &Vector,
    big_m: f64,
    fixed_zero: &[usize],
    fixed_one: &[usize],
) -> LpProblem {
    let n = obs.len();
    let r = basis.cols();
    let mut is_fixed = vec![0u8; n];
    for &j in fixed_zero {
        is_fixed[j] = 1;
    }
    for &j in fixed_one {
        is_fixed[j] = 2;
    }
    let free: Vec<usize> = (0..n).filter(|&j| is_fixed[j] == 0).collect();
    let num_vars = 2 * r + free.len();
    let mut lp = LpProblem::new(num_vars);
    for (pos, _) in free.iter().enumerate() {
        lp.objective[2 * r + pos] = 1.0;
        lp.upper[2 * r + pos] = 1.0;
    }
    let mut z_col = vec![usize::MAX; n];
    for (pos, &j) in free.iter().enumerate() {
        z_col[j] = 2 * r + pos;
    }
    for j in 0..n {
        let row_theta = |sign: f64| -> Vec<f64> {
            let mut c = vec![0.0; num_vars];
            for k in 0..r {
                let a = basis.get(j, k);
                c[k] = sign * a;
                c[r + k] = -sign * a;
            }
            c
        };
        match is_fixed[j] {
            1 => {
                // U_j theta = x_j
                lp.push_row(row_theta(1.0), Relation::Eq, obs.get(j));
            }
            2 => {
                // |x_j - U_j theta| <= M
                lp.push_row(row_theta(1.0), Relation::Ge, obs.get(j) - big_m);
                lp.push_row(row_theta(1.0), Relation::Le, obs.get(j) + big_m);
            }
            _ => {
                // |x_j - U_j theta| <= M z_j
                let mut lo = row_theta(1.0);
                lo[z_col[j]] = big_m;
                lp.push_row(lo, Relation::Ge, obs.get(j));
                let mut hi = row_theta(1.0);
                hi[z_col[j]] = -big_m;
                lp.push_row(hi, Relation::Le, obs.get(j));
            }
        }
    }
    lp
}

// ---------------------------------------------------------------------------
// Big-M escalation
// ---------------------------------------------------------------------------

/// Result of an escalating solve: the accepted solution, the big-M it
/// was solved with, and how many doublings were needed.
#[derive(Debug, Clone)]
pub struct EscalatedSolve {
    pub solution: MilpSolution,
    pub big_m: f64,
    pub escalations: usize,
}

/// Solves with the structural big-M policy: start from the residual
/// maximum under `theta_init` times `safety`, then re-solve with a
/// doubled constant until the optimal consensus is stable under one
/// further doubling (at most three escalations). The time limit spans
/// the whole loop.
#[allow(clippy::too_many_arguments)]
pub fn solve_escalating(
    basis: &Matrix,
    obs: &Vector,
    lambda: LambdaMode,
    theta_init: &Vector,
    safety: f64,
    time_limit: f64,
    gap_tol: Option<f64>,
    warm: Option<WarmStart>,
    ctx: &mut SolveContext,
) -> Result<EscalatedSolve> {
    let mut big_m = choose_big_m(basis, obs, theta_init, safety)?;
    let started = ctx.clock.elapsed_secs();
    let remaining = |ctx: &SolveContext| (time_limit - (ctx.clock.elapsed_secs() - started)).max(0.0);

    let build = |big_m: f64, warm: Option<WarmStart>, budget: f64, gap_tol: Option<f64>| -> Result<MilpProblem> {
        let mut p = MilpProblem::new(basis.clone(), obs.clone(), big_m, lambda)?.with_time_limit(budget);
        if let Some(g) = gap_tol {
            p = p.with_gap_tol(g);
        }
        if let Some(w) = warm {
            // A warm start that no longer fits the current constant is
            // dropped rather than rejected.
            if let Ok(q) = p.clone().with_warm_start(w) {
                p = q;
            }
        }
        Ok(p)
    };
    let solve = |p: &MilpProblem, ctx: &mut SolveContext| match lambda {
        LambdaMode::Noiseless => solve_noiseless_with(p, ctx),
        LambdaMode::Noisy(_) => solve_noisy_with(p, ctx),
    };

    let p = build(big_m, warm.clone(), remaining(ctx), gap_tol)?;
    let mut current = solve(&p, ctx)?;
    let mut escalations = 0usize;

    while escalations < 3 {
        if remaining(ctx) <= 0.0 {
            break;
        }
        if current.status == SolveStatus::Infeasible || current.m_saturated {
            // Either the constant excluded every assignment, or the
            // solver saw a better consensus blocked only by big-M.
            big_m *= 2.0;
            escalations += 1;
            let better_warm = if current.status == SolveStatus::Infeasible {
                warm.clone()
            } else {
                Some(WarmStart { z: current.z.clone(), theta: current.theta.clone() })
            };
            let p = build(big_m, better_warm, remaining(ctx), gap_tol)?;
            current = solve(&p, ctx)?;
            continue;
        }
        // Stability probe at twice the constant, warm-started from the
        // current solution.
        let probe_warm = WarmStart { z: current.z.clone(), theta: current.theta.clone() };
        let p2 = build(big_m * 2.0, Some(probe_warm), remaining(ctx), gap_tol)?;
        let probe = solve(&p2, ctx)?;
        let certified = current.status == SolveStatus::Optimal && probe.status == SolveStatus::Optimal;
        let unstable = certified && probe.consensus_size() != current.consensus_size();
        if unstable || probe.m_saturated {
            big_m *= 2.0;
            escalations += 1;
            current = probe;
            continue;
        }
        if !certified && probe.objective < current.objective - 1e-9 {
            // Time-limited regime: keep the better incumbent.
            big_m *= 2.0;
            current = probe;
        }
        break;
    }

    Ok(EscalatedSolve { solution: current, big_m, escalations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::NoClock;

    fn example1() -> (Matrix, Vector) {
        let u = Matrix::from_rows(&[&[1.0, 0.0], &[3.0, 2.0], &[5.0, 4.0], &[7.0, 6.0], &[9.0, 8.0]])
            .unwrap();
        let x = Vector::from_slice(&[4.0, 14.0, 0.0, 34.0, 44.0]).unwrap();
        (u, x)
    }

    #[test]
    fn choose_big_m_example1() {
        let (u, x) = example1();
        let theta = Vector::from_slice(&[4.0, 1.0]).unwrap();
        let m = choose_big_m(&u, &x, &theta, 1.0).unwrap();
        assert!((m - 24.0).abs() < 1e-12);
        let m2 = choose_big_m(&u, &x, &theta, 2.0).unwrap();
        assert!((m2 - 48.0).abs() < 1e-12);
    }

    #[test]
    fn choose_big_m_exact_fit_floors() {
        let (u, _) = example1();
        let theta = Vector::from_slice(&[4.0, 1.0]).unwrap();
        let x = u.mul_vec(&theta).unwrap();
        let m = choose_big_m(&u, &x, &theta, 1.0).unwrap();
        assert_eq!(m, 1e-6);
    }

    #[test]
    fn choose_big_m_rejects_small_safety() {
        let (u, x) = example1();
        let theta = Vector::from_slice(&[4.0, 1.0]).unwrap();
        assert!(matches!(choose_big_m(&u, &x, &theta, 0.5), Err(Error::Config(_))));
    }

    #[test]
    fn solve_noiseless_example1() {
        let (u, x) = example1();
        let p = MilpProblem::new(u, x, 100.0, LambdaMode::Noiseless).unwrap();
        let sol = solve_noiseless(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.z, vec![false, false, true, false, false]);
        assert!((sol.objective - 1.0).abs() < 1e-9);
        assert!((sol.theta.get(0) - 4.0).abs() < 1e-7);
        assert!((sol.theta.get(1) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn solve_noiseless_all_inliers() {
        let (u, _) = example1();
        let theta = Vector::from_slice(&[2.0, -3.0]).unwrap();
        let x = u.mul_vec(&theta).unwrap();
        let p = MilpProblem::new(u, x, 10.0, LambdaMode::Noiseless).unwrap();
        let sol = solve_noiseless(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.z.iter().all(|&b| !b));
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn warm_start_must_be_feasible() {
        let (u, x) = example1();
        let bad = WarmStart {
            z: vec![false; 5],
            theta: Vector::from_slice(&[4.0, 1.0]).unwrap(),
        };
        // Coordinate 3 (zero-based 2) misses the fit by 24, so an
        // all-zeros z is infeasible in noiseless mode.
        let p = MilpProblem::new(u, x, 100.0, LambdaMode::Noiseless).unwrap();
        assert!(matches!(p.with_warm_start(bad), Err(Error::InfeasibleWarmStart)));
    }

    #[test]
    fn noisy_lambda_zero_flags_nothing() {
        let (u, x) = example1();
        let p = MilpProblem::new(u, x, 100.0, LambdaMode::Noisy(0.0)).unwrap();
        let sol = solve_noisy(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.z.iter().all(|&b| !b), "lambda = 0 treats everything as inlier");
        assert!(sol.objective.abs() < 1e-9);
    }

    #[test]
    fn noisy_huge_lambda_matches_noiseless() {
        let (u, x) = example1();
        let p = MilpProblem::new(u.clone(), x.clone(), 100.0, LambdaMode::Noisy(1e12)).unwrap();
        let sol = solve_noisy(&p).unwrap();
        let p0 = MilpProblem::new(u, x, 100.0, LambdaMode::Noiseless).unwrap();
        let sol0 = solve_noiseless(&p0).unwrap();
        assert_eq!(sol.z, sol0.z);
    }

    #[test]
    fn infeasible_when_big_m_is_tiny() {
        // Two incompatible coordinates and a big-M too small for either
        // to be flagged away.
        let u = Matrix::from_vec(2, 1, vec![1.0, 1.0]).unwrap();
        let x = Vector::from_slice(&[0.0, 1000.0]).unwrap();
        let p = MilpProblem::new(u, x, 1e-3, LambdaMode::Noiseless).unwrap();
        let sol = solve_noiseless(&p);
        // n = 2 < r+1 = 2? r=1 so r+1=2, n=2 is allowed.
        let sol = sol.unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn escalation_recovers_from_small_m() {
        let (u, x) = example1();
        // theta_init deliberately wrong so the initial M is too small.
        let theta_init = Vector::from_slice(&[0.0, 0.0]).unwrap();
        let clock = NoClock;
        let mut ctx = SolveContext::new(&clock);
        let out = solve_escalating(
            &u,
            &x,
            LambdaMode::Noiseless,
            &theta_init,
            1.0,
            f64::INFINITY,
            None,
            None,
            &mut ctx,
        )
        .unwrap();
        assert_eq!(out.solution.consensus(), vec![0, 1, 3, 4]);
    }
}
