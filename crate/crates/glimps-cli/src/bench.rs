//! Seeded benchmark sweeps over outlier fraction, removal fraction,
//! noise level, and timing, with resumable CSV output.
//!
//! Instances are derived deterministically from
//! `(base_seed, d, r, p, sigma, trial)`, so changing the method list
//! or the removal grid never changes the data a method sees. Trials
//! run on a worker pool (`GLIMPS_WORKERS` overrides the width); rows
//! are appended through a single writer and the file is rewritten in
//! canonical key order at the end, so parallelism never changes the
//! artifact.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use glimps_core::baselines;
use glimps_core::metrics::{coef_error, misclass_ratio};
use glimps_core::milp::LambdaMode;
use glimps_core::pipeline::{default_tau, glimps_detect, DetectionResult, GlimpsConfig};
use glimps_core::rng::derive_seed;
use glimps_core::synth::{generate, InstanceSpec};

use crate::{io::append_lines, CliError};

/// Which figure-style experiment a sweep reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    OutlierFraction,
    RemovalFraction,
    Noise,
    Timing,
}

impl FromStr for SweepKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "outliers" => Ok(Self::OutlierFraction),
            "removal" => Ok(Self::RemovalFraction),
            "noise" => Ok(Self::Noise),
            "timing" => Ok(Self::Timing),
            other => Err(format!("unknown sweep kind {other:?}")),
        }
    }
}

impl SweepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::OutlierFraction => "outliers",
            Self::RemovalFraction => "removal",
            Self::Noise => "noise",
            Self::Timing => "timing",
        }
    }
}

/// A benchmarked method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Greedy,
    Milp,
    Glimps,
    L1,
    GreedyL1,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Greedy => "greedy",
            Self::Milp => "milp",
            Self::Glimps => "glimps",
            Self::L1 => "l1",
            Self::GreedyL1 => "greedy-l1",
        }
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(Self::Greedy),
            "milp" => Ok(Self::Milp),
            "glimps" => Ok(Self::Glimps),
            "l1" => Ok(Self::L1),
            "greedy-l1" => Ok(Self::GreedyL1),
            other => Err(format!("unknown method {other:?} (expected greedy,milp,glimps,l1,greedy-l1)")),
        }
    }
}

/// Sweep configuration.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub d: usize,
    pub r: usize,
    pub p_grid: Vec<f64>,
    pub removal_grid: Vec<f64>,
    pub sigma_grid: Vec<f64>,
    pub lambda: LambdaMode,
    pub trials: usize,
    pub time_limit: f64,
    pub base_seed: u64,
    pub methods: Vec<Method>,
}

impl SweepSpec {
    /// Default grids mirroring the benchmark figures.
    pub fn new(kind: SweepKind, d: usize, r: usize) -> Self {
        let p_default: Vec<f64> = (2..=18).map(|k| k as f64 * 0.05).collect();
        let (p_grid, removal_grid, sigma_grid, lambda) = match kind {
            SweepKind::OutlierFraction | SweepKind::Timing => {
                (p_default, vec![0.40], vec![0.0], LambdaMode::Noiseless)
            }
            SweepKind::RemovalFraction => {
                let p: Vec<f64> = (14..=18).map(|k| k as f64 * 0.05).collect();
                (p, vec![0.30, 0.40, 0.50], vec![0.0], LambdaMode::Noiseless)
            }
            SweepKind::Noise => {
                let p: Vec<f64> = (2..=14).map(|k| k as f64 * 0.05).collect();
                (p, vec![0.30], vec![1e-9, 1e-3, 1e-1], LambdaMode::Noisy(1000.0))
            }
        };
        Self {
            kind,
            d,
            r,
            p_grid,
            removal_grid,
            sigma_grid,
            lambda,
            trials: 50,
            time_limit: 60.0,
            base_seed: 0,
            methods: vec![Method::Greedy, Method::Milp, Method::Glimps],
        }
    }

    pub fn experiment_id(&self) -> String {
        format!("{}-d{}-r{}-seed{}", self.kind.as_str(), self.d, self.r, self.base_seed)
    }

    /// Cartesian grid of (p, removal, sigma) cells.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &sigma in &self.sigma_grid {
            for &removal in &self.removal_grid {
                for &p in &self.p_grid {
                    out.push(GridPoint { p, removal, sigma });
                }
            }
        }
        out
    }

    /// Instance seed for a grid cell and trial; independent of method
    /// and of the removal fraction (those only configure detectors).
    pub fn instance_seed(&self, gp: &GridPoint, trial: usize) -> u64 {
        derive_seed(
            self.base_seed,
            &[self.d as u64, self.r as u64, gp.p.to_bits(), gp.sigma.to_bits(), trial as u64],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub p: f64,
    pub removal: f64,
    pub sigma: f64,
}

/// One benchmark record; the CSV schema in column order.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub experiment_id: String,
    pub method: Method,
    pub d: usize,
    pub r: usize,
    pub p: f64,
    pub sigma: f64,
    pub lambda: Option<f64>,
    pub removal_fraction: f64,
    pub trial: usize,
    pub seed: u64,
    pub coef_error: f64,
    pub misclass_ratio: f64,
    pub misclass_ratio_stage2: f64,
    pub wall_time_s: f64,
    pub solver_status: String,
    pub nodes_explored: usize,
}

pub const CSV_HEADER: &str = "experiment_id,method,d,r,p,sigma,lambda,removal_fraction,trial,seed,coef_error,misclass_ratio,misclass_ratio_stage2,wall_time_s,solver_status,nodes_explored";

impl ResultRow {
    pub fn to_csv(&self) -> String {
        let lambda = match self.lambda {
            None => "none".to_string(),
            Some(v) => format!("{v}"),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment_id,
            self.method.as_str(),
            self.d,
            self.r,
            self.p,
            self.sigma,
            lambda,
            self.removal_fraction,
            self.trial,
            self.seed,
            self.coef_error,
            self.misclass_ratio,
            self.misclass_ratio_stage2,
            self.wall_time_s,
            self.solver_status,
            self.nodes_explored
        )
    }

    pub fn from_csv(line: &str) -> Option<ResultRow> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 16 {
            return None;
        }
        Some(ResultRow {
            experiment_id: f[0].to_string(),
            method: f[1].parse().ok()?,
            d: f[2].parse().ok()?,
            r: f[3].parse().ok()?,
            p: f[4].parse().ok()?,
            sigma: f[5].parse().ok()?,
            lambda: if f[6] == "none" { None } else { Some(f[6].parse().ok()?) },
            removal_fraction: f[7].parse().ok()?,
            trial: f[8].parse().ok()?,
            seed: f[9].parse().ok()?,
            coef_error: f[10].parse().ok()?,
            misclass_ratio: f[11].parse().ok()?,
            misclass_ratio_stage2: f[12].parse().ok()?,
            wall_time_s: f[13].parse().ok()?,
            solver_status: f[14].to_string(),
            nodes_explored: f[15].parse().ok()?,
        })
    }

    /// Resume/sort key.
    pub fn key(&self) -> (String, u64, u64, u64, usize) {
        (
            self.method.as_str().to_string(),
            self.p.to_bits(),
            self.sigma.to_bits(),
            self.removal_fraction.to_bits(),
            self.trial,
        )
    }
}

/// Runs one method on one generated instance.
pub fn run_trial(spec: &SweepSpec, method: Method, gp: &GridPoint, trial: usize) -> ResultRow {
    let seed = spec.instance_seed(gp, trial);
    let inst_spec = InstanceSpec::new(spec.d, spec.r, gp.p, gp.sigma, seed)
        .expect("sweep grids keep spec invariants");
    let inst = generate(&inst_spec);
    let tau = if gp.sigma > 0.0 { 3.0 * gp.sigma } else { default_tau(&inst.x) };
    let lambda_col = match spec.lambda {
        LambdaMode::Noiseless => None,
        LambdaMode::Noisy(l) => Some(l),
    };

    // Greedy-assisted baselines remove as many coordinates as there
    // are true outliers (the ground-truth knob), clamped to keep r+1
    // survivors.
    let removal_count = inst.num_outliers().min(spec.d - (spec.r + 1));

    let started = Instant::now();
    let outcome: Result<(DetectionResult, String, usize), String> = match method {
        Method::Greedy => baselines::greedy_only(&inst.u, &inst.x, removal_count, tau)
            .map(|r| (r, "-".to_string(), 0))
            .map_err(|e| e.to_string()),
        Method::GreedyL1 => baselines::greedy_plus_l1(&inst.u, &inst.x, removal_count, tau)
            .map(|r| (r, "-".to_string(), 0))
            .map_err(|e| e.to_string()),
        Method::L1 => baselines::l1_baseline(&inst.u, &inst.x, tau)
            .map(|r| (r, "-".to_string(), 0))
            .map_err(|e| e.to_string()),
        Method::Milp | Method::Glimps => {
            let cfg = GlimpsConfig {
                removal_fraction: if method == Method::Milp { 0.0 } else { gp.removal },
                lambda: spec.lambda,
                time_limit: spec.time_limit,
                tau: Some(tau),
                ..Default::default()
            };
            glimps_detect(&inst.u, &inst.x, &cfg)
                .map(|r| {
                    let (status, nodes) = match &r.stage2 {
                        Some(s) => (format!("{:?}", s.status), s.nodes_explored),
                        None => ("-".to_string(), 0),
                    };
                    (r, status, nodes)
                })
                .map_err(|e| e.to_string())
        }
    };
    let wall_time_s = started.elapsed().as_secs_f64();

    let (coef, mis, mis2, status, nodes) = match outcome {
        Ok((res, status, nodes)) => {
            let coef = coef_error(&inst.theta_true, &res.theta_hat);
            let mis = misclass_ratio(&inst.outlier_mask, &res.labels);
            let mis2 = misclass_ratio(&inst.outlier_mask, &res.stage2_labels(spec.d));
            (coef, mis, mis2, status, nodes)
        }
        Err(e) => (f64::NAN, f64::NAN, f64::NAN, format!("error:{e}"), 0),
    };

    ResultRow {
        experiment_id: spec.experiment_id(),
        method,
        d: spec.d,
        r: spec.r,
        p: gp.p,
        sigma: gp.sigma,
        lambda: lambda_col,
        removal_fraction: gp.removal,
        trial,
        seed,
        coef_error: coef,
        misclass_ratio: mis,
        misclass_ratio_stage2: mis2,
        wall_time_s,
        solver_status: status,
        nodes_explored: nodes,
    }
}

/// Sweep outcome counters.
#[derive(Debug, Clone, Copy)]
pub struct SweepReport {
    pub rows_total: usize,
    pub rows_new: usize,
    pub rows_skipped: usize,
    pub failures: usize,
}

fn worker_count(tasks: usize) -> usize {
    let from_env = std::env::var("GLIMPS_WORKERS").ok().and_then(|v| v.parse::<usize>().ok());
    let fallback = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    from_env.unwrap_or(fallback).clamp(1, tasks.max(1))
}

/// Runs every (method, grid point, trial) task, appending rows to
/// `out` as they arrive and finishing with a canonical sorted rewrite.
/// Existing rows in `out` are kept and their keys skipped.
pub fn run_sweep(
    spec: &SweepSpec,
    out: &Path,
    summary: Option<&Path>,
) -> Result<SweepReport, CliError> {
    let mut existing: Vec<ResultRow> = Vec::new();
    let mut done: HashSet<(String, u64, u64, u64, usize)> = HashSet::new();
    if out.exists() {
        let text = fs::read_to_string(out).map_err(|e| CliError::io(out, e))?;
        for line in text.lines().skip_while(|l| *l == CSV_HEADER).filter(|l| !l.is_empty()) {
            if let Some(row) = ResultRow::from_csv(line) {
                done.insert(row.key());
                existing.push(row);
            }
        }
    } else {
        append_lines(out, &[CSV_HEADER.to_string()])?;
    }

    let grid = spec.grid();
    let mut tasks: Vec<(Method, GridPoint, usize)> = Vec::new();
    for &method in &spec.methods {
        for gp in &grid {
            for trial in 0..spec.trials {
                let probe = ResultRow {
                    experiment_id: String::new(),
                    method,
                    d: spec.d,
                    r: spec.r,
                    p: gp.p,
                    sigma: gp.sigma,
                    lambda: None,
                    removal_fraction: gp.removal,
                    trial,
                    seed: 0,
                    coef_error: 0.0,
                    misclass_ratio: 0.0,
                    misclass_ratio_stage2: 0.0,
                    wall_time_s: 0.0,
                    solver_status: String::new(),
                    nodes_explored: 0,
                };
                if !done.contains(&probe.key()) {
                    tasks.push((method, *gp, trial));
                }
            }
        }
    }
    let expected_total = spec.methods.len() * grid.len() * spec.trials;
    let rows_skipped = expected_total - tasks.len();

    let cursor = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<ResultRow>();
    let workers = worker_count(tasks.len());
    let mut new_rows: Vec<ResultRow> = Vec::with_capacity(tasks.len());

    std::thread::scope(|scope| -> Result<(), CliError> {
        for _ in 0..workers {
            let tx = tx.clone();
            let tasks = &tasks;
            let cursor = &cursor;
            scope.spawn(move || loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                let Some((method, gp, trial)) = tasks.get(i).copied() else {
                    break;
                };
                let row = run_trial(spec, method, &gp, trial);
                if tx.send(row).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        // Single serialized sink; incremental append keeps partial
        // sweeps resumable after interruption.
        while let Ok(row) = rx.recv() {
            append_lines(out, &[row.to_csv()])?;
            new_rows.push(row);
        }
        Ok(())
    })?;

    let failures = new_rows.iter().filter(|r| r.solver_status.starts_with("error:")).count();
    let rows_new = new_rows.len();

    let mut all_rows = existing;
    all_rows.extend(new_rows);
    all_rows.sort_by_key(|a| a.key());

    // Canonical rewrite.
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for r in &all_rows {
        text.push_str(&r.to_csv());
        text.push('\n');
    }
    fs::write(out, text).map_err(|e| CliError::io(out, e))?;

    if let Some(summary_path) = summary {
        write_summary(summary_path, &all_rows)?;
    }

    Ok(SweepReport { rows_total: all_rows.len(), rows_new, rows_skipped, failures })
}

/// Per-cell aggregate of a group of rows.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub experiment_id: String,
    pub method: Method,
    pub d: usize,
    pub r: usize,
    pub p: f64,
    pub sigma: f64,
    pub lambda: Option<f64>,
    pub removal_fraction: f64,
    pub n: usize,
    pub coef_error_mean: f64,
    pub coef_error_std: f64,
    pub misclass_mean: f64,
    pub misclass_std: f64,
    pub wall_time_mean: f64,
    pub wall_time_std: f64,
    /// Fraction of trials with coefficient error under the success
    /// threshold (1e-6 noiseless, 10 sigma noisy).
    pub success_rate: f64,
}

pub const SUMMARY_HEADER: &str = "experiment_id,method,d,r,p,sigma,lambda,removal_fraction,n,coef_error_mean,coef_error_std,misclass_mean,misclass_std,wall_time_mean,wall_time_std,success_rate";

fn mean_std(values: &[f64]) -> (f64, f64) {
    let clean: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if clean.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = clean.len() as f64;
    let mean = clean.iter().sum::<f64>() / n;
    if clean.len() < 2 {
        return (mean, 0.0);
    }
    let var = clean.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups rows by (method, grid point) and aggregates.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: Vec<(&ResultRow, Vec<&ResultRow>)> = Vec::new();
    for row in rows {
        let cell = (row.method, row.p.to_bits(), row.sigma.to_bits(), row.removal_fraction.to_bits());
        match groups.iter_mut().find(|(head, _)| {
            (head.method, head.p.to_bits(), head.sigma.to_bits(), head.removal_fraction.to_bits()) == cell
        }) {
            Some((_, members)) => members.push(row),
            None => groups.push((row, vec![row])),
        }
    }
    groups
        .into_iter()
        .map(|(head, members)| {
            let coef: Vec<f64> = members.iter().map(|r| r.coef_error).collect();
            let mis: Vec<f64> = members.iter().map(|r| r.misclass_ratio).collect();
            let wall: Vec<f64> = members.iter().map(|r| r.wall_time_s).collect();
            let (cm, cs) = mean_std(&coef);
            let (mm, ms) = mean_std(&mis);
            let (wm, ws) = mean_std(&wall);
            let success_tol = if head.sigma > 0.0 { 10.0 * head.sigma } else { 1e-6 };
            let succ = coef.iter().filter(|v| v.is_finite() && **v < success_tol).count() as f64
                / members.len() as f64;
            SummaryRow {
                experiment_id: head.experiment_id.clone(),
                method: head.method,
                d: head.d,
                r: head.r,
                p: head.p,
                sigma: head.sigma,
                lambda: head.lambda,
                removal_fraction: head.removal_fraction,
                n: members.len(),
                coef_error_mean: cm,
                coef_error_std: cs,
                misclass_mean: mm,
                misclass_std: ms,
                wall_time_mean: wm,
                wall_time_std: ws,
                success_rate: succ,
            }
        })
        .collect()
}

fn write_summary(path: &Path, rows: &[ResultRow]) -> Result<(), CliError> {
    let mut text = String::from(SUMMARY_HEADER);
    text.push('\n');
    for s in summarize(rows) {
        let lambda = match s.lambda {
            None => "none".to_string(),
            Some(v) => format!("{v}"),
        };
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.experiment_id,
            s.method.as_str(),
            s.d,
            s.r,
            s.p,
            s.sigma,
            lambda,
            s.removal_fraction,
            s.n,
            s.coef_error_mean,
            s.coef_error_std,
            s.misclass_mean,
            s.misclass_std,
            s.wall_time_mean,
            s.wall_time_std,
            s.success_rate
        ));
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Convenience for tests: sweep into a temp dir and return the rows.
pub fn run_sweep_collect(spec: &SweepSpec, dir: &Path) -> Result<Vec<ResultRow>, CliError> {
    let out = PathBuf::from(dir).join(format!("{}.csv", spec.experiment_id()));
    run_sweep(spec, &out, None)?;
    let text = fs::read_to_string(&out).map_err(|e| CliError::io(&out, e))?;
    Ok(text.lines().filter_map(ResultRow::from_csv).collect())
}
