//! Dense two-phase primal simplex with per-variable upper bounds.
//!
//! Contract: minimize a linear objective subject to linear relations
//! (`<=`, `=`, `>=`) and variable bounds `0 <= x_j <= u_j` (upper may
//! be infinite). Callers encode free variables by splitting them into
//! positive and negative parts. This one routine backs both the
//! branch-and-bound node relaxations and the `l1` regression baseline.

use alloc::vec;
use alloc::vec::Vec;

use crate::float;
use crate::{Error, Result};

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;

/// Relation of a constraint row to its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// One constraint row `coeffs . x  (relation)  rhs`.
#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program in `num_vars` nonnegative variables.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    /// Per-variable upper bound; `f64::INFINITY` when absent.
    pub upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            upper: vec![f64::INFINITY; num_vars],
        }
    }

    pub fn push_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.rows.push(LpRow { coeffs, relation, rhs });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Values of the structural variables (empty unless optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

enum Step {
    Moved,
    Optimal,
    Unbounded,
}

struct Tableau {
    /// `B^-1 A`, dense, m rows by total-variable columns.
    tab: Vec<Vec<f64>>,
    /// Current values of the basic variables, row-aligned.
    xb: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    n_total: usize,
    iterations: usize,
}

impl Tableau {
    fn objective_value(&self) -> f64 {
        let mut v = 0.0;
        for (row, &b) in self.basis.iter().zip(&self.xb) {
            v += self.cost[*row] * b;
        }
        for j in 0..self.n_total {
            if let VarState::AtUpper = self.state[j] {
                v += self.cost[j] * self.upper[j];
            }
        }
        v
    }

    fn reduced_costs(&self) -> Vec<f64> {
        let mut d = self.cost.clone();
        for i in 0..self.basis.len() {
            let cb = self.cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.tab[i];
            for j in 0..self.n_total {
                d[j] -= cb * row[j];
            }
        }
        d
    }

    /// One priced simplex iteration.
    fn iterate(&mut self, enter_limit: usize, bland: bool) -> Step {
        let d = self.reduced_costs();
        // Entering variable: from lower wants negative reduced cost,
        // from upper wants positive.
        let mut entering: Option<(usize, f64, f64)> = None; // (var, score, dir)
        for j in 0..enter_limit {
            let dir = match self.state[j] {
                VarState::Basic(_) => continue,
                VarState::AtLower => {
                    if d[j] < -COST_TOL {
                        1.0
                    } else {
                        continue;
                    }
                }
                VarState::AtUpper => {
                    if d[j] > COST_TOL {
                        -1.0
                    } else {
                        continue;
                    }
                }
            };
            if bland {
                entering = Some((j, 0.0, dir));
                break;
            }
            let score = float::abs(d[j]);
            if entering.is_none_or(|(_, best, _)| score > best) {
                entering = Some((j, score, dir));
            }
        }
        let Some((j, _, dir)) = entering else {
            return Step::Optimal;
        };

        // Ratio test: how far can the entering variable move before a
        // basic variable hits a bound or the entering variable flips
        // to its own opposite bound?
        let m = self.basis.len();
        let mut t_max = self.upper[j];
        let mut leave: Option<(usize, bool)> = None; // (row, leaves_at_upper)
        for i in 0..m {
            let delta = -dir * self.tab[i][j];
            let (t, at_upper) = if delta < -PIVOT_TOL {
                (self.xb[i] / (-delta), false)
            } else if delta > PIVOT_TOL {
                let ub = self.upper[self.basis[i]];
                if !ub.is_finite() {
                    continue;
                }
                ((ub - self.xb[i]) / delta, true)
            } else {
                continue;
            };
            let t = t.max(0.0);
            let take = if t < t_max - PIVOT_TOL {
                true
            } else if t < t_max + PIVOT_TOL {
                // Near-tie: under Bland prefer the smallest leaving
                // variable index to guarantee termination.
                match leave {
                    Some((row, _)) => bland && self.basis[i] < self.basis[row],
                    None => t < t_max,
                }
            } else {
                false
            };
            if take {
                t_max = t;
                leave = Some((i, at_upper));
            }
        }

        if t_max.is_infinite() {
            return Step::Unbounded;
        }

        self.iterations += 1;

        // Apply the move to the basic values.
        for i in 0..m {
            let delta = -dir * self.tab[i][j];
            self.xb[i] += t_max * delta;
            if self.xb[i] < 0.0 && self.xb[i] > -1e-9 {
                self.xb[i] = 0.0;
            }
        }

        match leave {
            None => {
                // Bound flip: entering variable runs to its other bound.
                self.state[j] = match self.state[j] {
                    VarState::AtLower => VarState::AtUpper,
                    VarState::AtUpper => VarState::AtLower,
                    VarState::Basic(_) => unreachable!(),
                };
            }
            Some((row, leaves_at_upper)) => {
                let old = self.basis[row];
                self.state[old] = if leaves_at_upper { VarState::AtUpper } else { VarState::AtLower };
                let entering_value = match self.state[j] {
                    VarState::AtLower => dir * t_max,
                    VarState::AtUpper => self.upper[j] + dir * t_max,
                    VarState::Basic(_) => unreachable!(),
                };
                self.basis[row] = j;
                self.state[j] = VarState::Basic(row);
                self.xb[row] = entering_value;
                // Row reduction to restore B^-1 A.
                let piv = self.tab[row][j];
                let inv = 1.0 / piv;
                for v in &mut self.tab[row] {
                    *v *= inv;
                }
                let pivot_row = core::mem::take(&mut self.tab[row]);
                for i in 0..m {
                    if i == row {
                        continue;
                    }
                    let factor = self.tab[i][j];
                    if factor == 0.0 {
                        continue;
                    }
                    let dst = &mut self.tab[i];
                    for (v, p) in dst.iter_mut().zip(&pivot_row) {
                        *v -= factor * p;
                    }
                    dst[j] = 0.0;
                }
                self.tab[row] = pivot_row;
            }
        }
        Step::Moved
    }

    /// Runs priced iterations to optimality. `enter_limit` excludes the
    /// columns at and past it (used to lock artificials out of phase 2).
    fn run(&mut self, enter_limit: usize) -> Result<bool> {
        let cap = 20 * (self.basis.len() + self.n_total) + 500;
        let mut since_improve = 0usize;
        let mut last_obj = self.objective_value();
        loop {
            let bland = since_improve > self.basis.len() + 64;
            match self.iterate(enter_limit, bland) {
                Step::Moved => {}
                Step::Optimal => return Ok(true),
                Step::Unbounded => return Ok(false),
            }
            let obj = self.objective_value();
            if obj < last_obj - 1e-12 {
                last_obj = obj;
                since_improve = 0;
            } else {
                since_improve += 1;
            }
            if self.iterations > cap {
                return Err(Error::SimplexStall(self.iterations));
            }
        }
    }
}

/// Solves the linear program. Statuses: optimal, infeasible, unbounded.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    let n = p.num_vars;
    let m = p.rows.len();
    debug_assert_eq!(p.objective.len(), n);
    debug_assert_eq!(p.upper.len(), n);

    // Normalize rows to nonnegative rhs.
    let mut rows: Vec<LpRow> = Vec::with_capacity(m);
    for r in &p.rows {
        if r.rhs < 0.0 {
            let coeffs = r.coeffs.iter().map(|c| -c).collect();
            let relation = match r.relation {
                Relation::Le => Relation::Ge,
                Relation::Eq => Relation::Eq,
                Relation::Ge => Relation::Le,
            };
            rows.push(LpRow { coeffs, relation, rhs: -r.rhs });
        } else {
            rows.push(r.clone());
        }
    }

    // Column layout: structural | slack/surplus | artificial.
    let mut n_slack = 0usize;
    let mut n_art = 0usize;
    for r in &rows {
        match r.relation {
            Relation::Le => n_slack += 1,
            Relation::Ge => {
                n_slack += 1;
                n_art += 1;
            }
            Relation::Eq => n_art += 1,
        }
    }
    let n_total = n + n_slack + n_art;
    let mut tab = vec![vec![0.0; n_total]; m];
    let mut basis = vec![0usize; m];
    let mut xb = vec![0.0; m];
    let mut upper = p.upper.clone();
    upper.resize(n_total, f64::INFINITY);

    let mut slack_at = n;
    let mut art_at = n + n_slack;
    for (i, r) in rows.iter().enumerate() {
        tab[i][..n].copy_from_slice(&r.coeffs);
        xb[i] = r.rhs;
        match r.relation {
            Relation::Le => {
                tab[i][slack_at] = 1.0;
                basis[i] = slack_at;
                slack_at += 1;
            }
            Relation::Ge => {
                tab[i][slack_at] = -1.0;
                slack_at += 1;
                tab[i][art_at] = 1.0;
                basis[i] = art_at;
                art_at += 1;
            }
            Relation::Eq => {
                tab[i][art_at] = 1.0;
                basis[i] = art_at;
                art_at += 1;
            }
        }
    }

    let mut state = vec![VarState::AtLower; n_total];
    for (row, &b) in basis.iter().enumerate() {
        state[b] = VarState::Basic(row);
    }

    let artificial_start = n + n_slack;
    let mut t = Tableau {
        tab,
        xb,
        basis,
        state,
        upper,
        cost: vec![0.0; n_total],
        n_total,
        iterations: 0,
    };

    // Phase 1: drive artificial variables to zero.
    if n_art > 0 {
        for j in artificial_start..n_total {
            t.cost[j] = 1.0;
        }
        if !t.run(n_total)? {
            // Phase 1 is bounded below by zero; an unbounded ray means
            // the arithmetic broke down.
            return Err(Error::SimplexStall(t.iterations));
        }
        let scale = 1.0 + rows.iter().fold(0.0, |acc: f64, r| acc.max(float::abs(r.rhs)));
        if t.objective_value() > 1e-7 * scale {
            return Ok(LpSolution { status: LpStatus::Infeasible, x: Vec::new(), objective: 0.0, iterations: t.iterations });
        }
        // Freeze artificials at zero for phase 2.
        for j in artificial_start..n_total {
            t.upper[j] = 0.0;
        }
    }

    // Phase 2: the real objective.
    for j in 0..n_total {
        t.cost[j] = if j < n { p.objective[j] } else { 0.0 };
    }
    if !t.run(artificial_start)? {
        return Ok(LpSolution { status: LpStatus::Unbounded, x: Vec::new(), objective: f64::NEG_INFINITY, iterations: t.iterations });
    }

    let mut x = vec![0.0; n];
    for j in 0..n {
        x[j] = match t.state[j] {
            VarState::Basic(row) => t.xb[row],
            VarState::AtLower => 0.0,
            VarState::AtUpper => t.upper[j],
        };
    }
    let objective = x.iter().zip(&p.objective).map(|(v, c)| v * c).sum();
    Ok(LpSolution { status: LpStatus::Optimal, x, objective, iterations: t.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_le_problem() {
        // max x0 + x1 s.t. x0 + x1 <= 1.5, binaries relaxed to [0,1].
        let mut p = LpProblem::new(2);
        p.objective = vec![-1.0, -1.0];
        p.upper = vec![1.0, 1.0];
        p.push_row(vec![1.0, 1.0], Relation::Le, 1.5);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 1.5).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge() {
        // min x0 + 2 x1 s.t. x0 + x1 = 4, x0 >= 1.
        let mut p = LpProblem::new(2);
        p.objective = vec![1.0, 2.0];
        p.push_row(vec![1.0, 1.0], Relation::Eq, 4.0);
        p.push_row(vec![1.0, 0.0], Relation::Ge, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 4.0).abs() < 1e-9);
        assert!(s.x[1].abs() < 1e-9);
        assert!((s.objective - 4.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        let mut p = LpProblem::new(1);
        p.objective = vec![1.0];
        p.upper = vec![1.0];
        p.push_row(vec![1.0], Relation::Ge, 2.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut p = LpProblem::new(1);
        p.objective = vec![-1.0];
        p.push_row(vec![-1.0], Relation::Le, 0.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_normalization() {
        // x0 - x1 <= -2 forces x1 >= 2 at the optimum of min x1.
        let mut p = LpProblem::new(2);
        p.objective = vec![0.0, 1.0];
        p.push_row(vec![1.0, -1.0], Relation::Le, -2.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bound_flip_path() {
        // min -x0 - 0.5 x1 with x <= 1 each and a slack row: both at upper.
        let mut p = LpProblem::new(2);
        p.objective = vec![-1.0, -0.5];
        p.upper = vec![1.0, 1.0];
        p.push_row(vec![1.0, 1.0], Relation::Le, 10.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-9);
        assert!((s.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_square_system() {
        // Equalities pinning both variables exactly.
        let mut p = LpProblem::new(2);
        p.objective = vec![3.0, -1.0];
        p.push_row(vec![1.0, 1.0], Relation::Eq, 2.0);
        p.push_row(vec![1.0, -1.0], Relation::Eq, 0.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-9);
        assert!((s.x[1] - 1.0).abs() < 1e-9);
    }
}
