//! Plain numeric CSV readers and writers for the CLI file contract.
//!
//! Matrix and vector files are headerless, one row per matrix row,
//! comma-separated. Index-bearing outputs (detection results, traces,
//! truth files) are one-based to match the text interfaces.

use std::fs;
use std::io::Write;
use std::path::Path;

use glimps_core::greedy::GreedyTrace;
use glimps_core::pipeline::Label;
use glimps_core::synth::Instance;
use glimps_core::{Matrix, Vector};

use crate::CliError;

/// Reads a headerless numeric CSV as a matrix (rows of equal width).
pub fn read_matrix_csv(path: &Path) -> Result<Matrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_numeric_row(line, path, lineno + 1)?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::Parse {
                    path: path.display().to_string(),
                    line: lineno + 1,
                    reason: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Parse {
            path: path.display().to_string(),
            line: 0,
            reason: "empty matrix file".into(),
        });
    }
    let cols = rows[0].len();
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    let rows_n = data.len() / cols;
    Matrix::from_vec(rows_n, cols, data).map_err(CliError::Core)
}

/// Reads a vector: either one value per line or a single CSV row.
pub fn read_vector_csv(path: &Path) -> Result<Vector, CliError> {
    let m = read_matrix_csv(path)?;
    let data: Vec<f64> = if m.cols() == 1 {
        (0..m.rows()).map(|i| m.get(i, 0)).collect()
    } else if m.rows() == 1 {
        m.row(0).to_vec()
    } else {
        return Err(CliError::Parse {
            path: path.display().to_string(),
            line: 0,
            reason: format!("expected a vector, found a {}x{} matrix", m.rows(), m.cols()),
        });
    };
    Vector::new(data).map_err(CliError::Core)
}

fn parse_numeric_row(line: &str, path: &Path, lineno: usize) -> Result<Vec<f64>, CliError> {
    line.split(',')
        .map(|field| {
            field.trim().parse::<f64>().map_err(|_| CliError::Parse {
                path: path.display().to_string(),
                line: lineno,
                reason: format!("bad number {field:?}"),
            })
        })
        .collect()
}

pub fn write_matrix_csv(path: &Path, m: &Matrix) -> Result<(), CliError> {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn write_vector_csv(path: &Path, v: &Vector) -> Result<(), CliError> {
    let mut out = String::new();
    for i in 0..v.len() {
        out.push_str(&format!("{}\n", v.get(i)));
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Detection output: `index,residual,label`, one-based indices.
pub fn write_result_csv(
    path: &Path,
    residuals: &Vector,
    labels: &[Label],
) -> Result<(), CliError> {
    let mut out = String::new();
    for (i, label) in labels.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", i + 1, residuals.get(i), label.as_str()));
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Greedy trace export: `step,removed_index,ratio`, one-based indices.
pub fn write_trace_csv(path: &Path, trace: &GreedyTrace) -> Result<(), CliError> {
    let mut out = String::new();
    for (step, s) in trace.steps.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", step + 1, s.removed_index + 1, s.ratio));
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Ground truth export: `index,outlier_flag,clean_value` per
/// coordinate, where `clean_value` is the uncorrupted `U theta` entry.
pub fn write_truth_csv(path: &Path, inst: &Instance) -> Result<(), CliError> {
    let clean = inst.u.mul_vec(&inst.theta_true).map_err(CliError::Core)?;
    let mut out = String::new();
    for i in 0..inst.outlier_mask.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            i + 1,
            u8::from(inst.outlier_mask[i]),
            clean.get(i)
        ));
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Writes the noiseless consensus model as a fixed-format MPS file.
pub fn export_mps(
    problem: &glimps_core::milp::MilpProblem,
    path: &Path,
) -> Result<(), CliError> {
    let mut text = String::new();
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("GLIMPS")
        .to_uppercase();
    glimps_core::mps::write_mps(problem, &name, &mut text).map_err(CliError::Core)?;
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Append lines to a file, creating it when missing.
pub fn append_lines(path: &Path, lines: &[String]) -> Result<(), CliError> {
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    for line in lines {
        writeln!(f, "{line}").map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}
