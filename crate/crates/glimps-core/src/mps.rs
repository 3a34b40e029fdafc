//! Fixed-format MPS export of the noiseless consensus model, plus a
//! small reader used to round-trip the file back into an LP.
//!
//! The model written for an `n`-coordinate problem has one objective
//! row `COST`, two constraint rows per coordinate (`RG<j>` for the
//! lower big-M side, `RL<j>` for the upper), `n` binary columns
//! `Z<j>`, and `r` free columns `T<k>`. Field positions follow the
//! classic fixed layout (2-3, 5-12, 15-22, 25-36); values that need
//! more than twelve characters to round-trip exactly are written in
//! full, which whitespace-tolerant readers accept.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::lp::{LpProblem, LpStatus, Relation};
use crate::milp::{LambdaMode, MilpProblem};
use crate::{Error, Result};

/// Writes the problem in MPS form. Noiseless mode only: the quadratic
/// slack term of the noisy variant has no MPS encoding.
pub fn write_mps<W: core::fmt::Write>(p: &MilpProblem, name: &str, out: &mut W) -> Result<()> {
    if !matches!(p.lambda(), LambdaMode::Noiseless) {
        return Err(Error::Config("MPS export covers the noiseless (linear) mode"));
    }
    let n = p.obs().len();
    let r = p.basis().cols();
    let m = p.big_m();
    let mut text = String::new();
    push_line(&mut text, &format!("NAME          {name}"));
    push_line(&mut text, "ROWS");
    push_line(&mut text, " N  COST");
    for j in 1..=n {
        push_line(&mut text, &format!(" G  RG{j}"));
        push_line(&mut text, &format!(" L  RL{j}"));
    }
    push_line(&mut text, "COLUMNS");
    for k in 1..=r {
        let col = format!("T{k}");
        for j in 1..=n {
            let a = p.basis().get(j - 1, k - 1);
            if a != 0.0 {
                push_line(&mut text, &pair_line(&col, &format!("RG{j}"), a));
                push_line(&mut text, &pair_line(&col, &format!("RL{j}"), a));
            }
        }
    }
    push_line(&mut text, "    MARKER                 'MARKER'                 'INTORG'");
    for j in 1..=n {
        let col = format!("Z{j}");
        push_line(&mut text, &pair_line(&col, "COST", 1.0));
        push_line(&mut text, &pair_line(&col, &format!("RG{j}"), m));
        push_line(&mut text, &pair_line(&col, &format!("RL{j}"), -m));
    }
    push_line(&mut text, "    MARKER                 'MARKER'                 'INTEND'");
    push_line(&mut text, "RHS");
    for j in 1..=n {
        let x = p.obs().get(j - 1);
        if x != 0.0 {
            push_line(&mut text, &pair_line("RHS1", &format!("RG{j}"), x));
            push_line(&mut text, &pair_line("RHS1", &format!("RL{j}"), x));
        }
    }
    push_line(&mut text, "BOUNDS");
    for j in 1..=n {
        push_line(&mut text, &format!(" BV BND       Z{j}"));
    }
    for k in 1..=r {
        push_line(&mut text, &format!(" FR BND       T{k}"));
    }
    push_line(&mut text, "ENDATA");
    out.write_str(&text).map_err(|_| Error::Config("MPS formatting failed"))?;
    Ok(())
}

fn push_line(buf: &mut String, line: &str) {
    buf.push_str(line);
    buf.push('\n');
}

/// One `column row value` line with classic field alignment.
fn pair_line(col: &str, row: &str, value: f64) -> String {
    format!("    {:<10}{:<10}{}", col, row, fmt_value(value))
}

/// Shortest representation that round-trips the double exactly.
fn fmt_value(v: f64) -> String {
    let s = v.to_string();
    if s.len() < 12 {
        format!("{s:<12}")
    } else {
        s
    }
}

// ---------------------------------------------------------------------------
// Reader
// ---------------------------------------------------------------------------

/// Bounds for one parsed column.
#[derive(Debug, Clone, Copy)]
pub struct MpsBounds {
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

impl Default for MpsBounds {
    fn default() -> Self {
        Self { lower: 0.0, upper: f64::INFINITY, integer: false }
    }
}

/// A parsed MPS model: linear objective, relational rows, bounds.
#[derive(Debug, Clone, Default)]
pub struct MpsModel {
    pub name: String,
    pub row_names: Vec<String>,
    pub row_relations: Vec<Relation>,
    pub objective_row: String,
    pub column_names: Vec<String>,
    /// Entries as (row index, column index, coefficient); objective
    /// entries use `usize::MAX` as the row index.
    pub entries: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
    pub bounds: Vec<MpsBounds>,
}

impl MpsModel {
    pub fn num_constraint_rows(&self) -> usize {
        self.row_names.len()
    }

    pub fn num_binary_columns(&self) -> usize {
        self.bounds.iter().filter(|b| b.integer && b.lower == 0.0 && b.upper == 1.0).count()
    }

    pub fn num_free_columns(&self) -> usize {
        self.bounds.iter().filter(|b| b.lower == f64::NEG_INFINITY).count()
    }
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    Done,
}

/// Parses the (fixed or free format) MPS dialect written by
/// [`write_mps`]: N/G/L/E rows, INTORG markers, RHS, BV/UP/LO/FR/MI
/// bounds.
pub fn parse_mps(text: &str) -> Result<MpsModel> {
    let mut model = MpsModel::default();
    let mut section = Section::Preamble;
    let mut row_index: Vec<(String, usize)> = Vec::new();
    let mut col_index: Vec<(String, usize)> = Vec::new();
    let mut in_integer_block = false;

    let find_row = |rows: &[(String, usize)], name: &str| -> Option<usize> {
        rows.iter().find(|(n, _)| n == name).map(|(_, i)| *i)
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') {
            // Section header.
            match toks[0] {
                "NAME" => {
                    model.name = toks.get(1).unwrap_or(&"").to_string();
                    continue;
                }
                "ROWS" => {
                    section = Section::Rows;
                    continue;
                }
                "COLUMNS" => {
                    section = Section::Columns;
                    continue;
                }
                "RHS" => {
                    section = Section::Rhs;
                    continue;
                }
                "RANGES" => {
                    section = Section::Ranges;
                    continue;
                }
                "BOUNDS" => {
                    section = Section::Bounds;
                    continue;
                }
                "ENDATA" => {
                    section = Section::Done;
                    break;
                }
                _ => return Err(Error::MpsParse { line, reason: "unknown section" }),
            }
        }
        match section {
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(Error::MpsParse { line, reason: "rows need a type and a name" });
                }
                match toks[0] {
                    "N" => {
                        if model.objective_row.is_empty() {
                            model.objective_row = toks[1].to_string();
                        }
                    }
                    "G" | "L" | "E" => {
                        let rel = match toks[0] {
                            "G" => Relation::Ge,
                            "L" => Relation::Le,
                            _ => Relation::Eq,
                        };
                        row_index.push((toks[1].to_string(), model.row_names.len()));
                        model.row_names.push(toks[1].to_string());
                        model.row_relations.push(rel);
                        model.rhs.push(0.0);
                    }
                    _ => return Err(Error::MpsParse { line, reason: "unknown row type" }),
                }
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1] == "'MARKER'" {
                    match toks[2] {
                        "'INTORG'" => in_integer_block = true,
                        "'INTEND'" => in_integer_block = false,
                        _ => return Err(Error::MpsParse { line, reason: "unknown marker" }),
                    }
                    continue;
                }
                if toks.len() < 3 || toks.len().is_multiple_of(2) {
                    return Err(Error::MpsParse { line, reason: "column entries come in pairs" });
                }
                let col = match col_index.iter().find(|(n, _)| n == toks[0]) {
                    Some((_, i)) => *i,
                    None => {
                        let i = model.column_names.len();
                        col_index.push((toks[0].to_string(), i));
                        model.column_names.push(toks[0].to_string());
                        model.bounds.push(MpsBounds {
                            integer: in_integer_block,
                            ..MpsBounds::default()
                        });
                        i
                    }
                };
                let mut k = 1;
                while k + 1 < toks.len() + 1 && k < toks.len() {
                    let row_name = toks[k];
                    let value: f64 = toks[k + 1]
                        .parse()
                        .map_err(|_| Error::MpsParse { line, reason: "bad numeric value" })?;
                    if row_name == model.objective_row {
                        model.entries.push((usize::MAX, col, value));
                    } else {
                        let row = find_row(&row_index, row_name)
                            .ok_or(Error::MpsParse { line, reason: "unknown row" })?;
                        model.entries.push((row, col, value));
                    }
                    k += 2;
                }
            }
            Section::Rhs => {
                if toks.len() < 3 || toks.len().is_multiple_of(2) {
                    return Err(Error::MpsParse { line, reason: "rhs entries come in pairs" });
                }
                let mut k = 1;
                while k < toks.len() {
                    let row = find_row(&row_index, toks[k])
                        .ok_or(Error::MpsParse { line, reason: "unknown rhs row" })?;
                    let value: f64 = toks[k + 1]
                        .parse()
                        .map_err(|_| Error::MpsParse { line, reason: "bad rhs value" })?;
                    model.rhs[row] = value;
                    k += 2;
                }
            }
            Section::Ranges => {
                return Err(Error::MpsParse { line, reason: "ranges are not supported" });
            }
            Section::Bounds => {
                if toks.len() < 3 {
                    return Err(Error::MpsParse { line, reason: "bounds need type, set, column" });
                }
                let col = col_index
                    .iter()
                    .find(|(n, _)| n == toks[2])
                    .map(|(_, i)| *i)
                    .ok_or(Error::MpsParse { line, reason: "unknown bound column" })?;
                let value = || -> Result<f64> {
                    toks.get(3)
                        .ok_or(Error::MpsParse { line, reason: "bound needs a value" })?
                        .parse()
                        .map_err(|_| Error::MpsParse { line, reason: "bad bound value" })
                };
                match toks[0] {
                    "BV" => {
                        model.bounds[col] = MpsBounds { lower: 0.0, upper: 1.0, integer: true };
                    }
                    "FR" => {
                        model.bounds[col].lower = f64::NEG_INFINITY;
                        model.bounds[col].upper = f64::INFINITY;
                    }
                    "MI" => model.bounds[col].lower = f64::NEG_INFINITY,
                    "UP" => model.bounds[col].upper = value()?,
                    "LO" => model.bounds[col].lower = value()?,
                    "FX" => {
                        let v = value()?;
                        model.bounds[col].lower = v;
                        model.bounds[col].upper = v;
                    }
                    _ => return Err(Error::MpsParse { line, reason: "unknown bound type" }),
                }
            }
            Section::Preamble | Section::Done => {}
        }
    }
    if section != Section::Done {
        return Err(Error::MpsParse { line: text.lines().count(), reason: "missing ENDATA" });
    }
    Ok(model)
}

/// Value of the parsed model's LP relaxation (integrality dropped),
/// solved by the in-repo simplex.
pub fn relaxation_value(model: &MpsModel) -> Result<f64> {
    let ncols = model.column_names.len();
    // Split columns with a negative-infinite lower bound.
    let mut lp_col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(ncols);
    let mut nvars = 0usize;
    for b in &model.bounds {
        if b.lower == f64::NEG_INFINITY {
            lp_col_of.push((nvars, Some(nvars + 1)));
            nvars += 2;
        } else {
            lp_col_of.push((nvars, None));
            nvars += 1;
        }
    }
    let mut lp = LpProblem::new(nvars);
    for (c, b) in model.bounds.iter().enumerate() {
        let (pos, neg) = lp_col_of[c];
        if b.lower == f64::NEG_INFINITY {
            if b.upper.is_finite() {
                lp.upper[pos] = b.upper.max(0.0);
            }
        } else {
            // Shift a nonzero finite lower bound is not needed for the
            // models written here; reject to stay honest.
            if b.lower != 0.0 {
                return Err(Error::Config("nonzero lower bounds are not supported"));
            }
            lp.upper[pos] = b.upper;
        }
        let _ = neg;
    }
    let mut row_coeffs: Vec<Vec<f64>> = vec![vec![0.0; nvars]; model.row_names.len()];
    for &(row, col, v) in &model.entries {
        let (pos, neg) = lp_col_of[col];
        if row == usize::MAX {
            lp.objective[pos] += v;
            if let Some(neg) = neg {
                lp.objective[neg] -= v;
            }
        } else {
            row_coeffs[row][pos] += v;
            if let Some(neg) = neg {
                row_coeffs[row][neg] -= v;
            }
        }
    }
    for (row, coeffs) in row_coeffs.into_iter().enumerate() {
        lp.push_row(coeffs, model.row_relations[row], model.rhs[row]);
    }
    let sol = crate::lp::solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        LpStatus::Infeasible => Err(Error::Config("parsed relaxation infeasible")),
        LpStatus::Unbounded => Err(Error::Config("parsed relaxation unbounded")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Matrix, Vector};

    fn example1_problem() -> MilpProblem {
        let u = Matrix::from_rows(&[&[1.0, 0.0], &[3.0, 2.0], &[5.0, 4.0], &[7.0, 6.0], &[9.0, 8.0]])
            .unwrap();
        let x = Vector::from_slice(&[4.0, 14.0, 0.0, 34.0, 44.0]).unwrap();
        MilpProblem::new(u, x, 100.0, LambdaMode::Noiseless).unwrap()
    }

    #[test]
    fn writes_expected_structure() {
        let p = example1_problem();
        let mut text = String::new();
        write_mps(&p, "EX1", &mut text).unwrap();
        let model = parse_mps(&text).unwrap();
        assert_eq!(model.num_constraint_rows(), 10);
        assert_eq!(model.num_binary_columns(), 5);
        assert_eq!(model.num_free_columns(), 2);
        assert_eq!(model.objective_row, "COST");
    }

    #[test]
    fn noisy_mode_is_rejected() {
        let u = Matrix::identity(3);
        let x = Vector::from_slice(&[1.0, 2.0, 3.0]).unwrap();
        let p = MilpProblem::new(u, x, 10.0, LambdaMode::Noisy(5.0)).unwrap();
        let mut buf = String::new();
        assert!(matches!(write_mps(&p, "N", &mut buf), Err(Error::Config(_))));
    }

    #[test]
    fn round_trip_reproduces_relaxation_value() {
        let p = example1_problem();
        let mut text = String::new();
        write_mps(&p, "EX1", &mut text).unwrap();
        let model = parse_mps(&text).unwrap();
        let parsed = relaxation_value(&model).unwrap();
        let direct = crate::milp::root_relaxation_value(&p).unwrap();
        assert!(
            (parsed - direct).abs() <= 1e-8 * (1.0 + direct.abs()),
            "parsed {parsed} vs direct {direct}"
        );
    }

    #[test]
    fn parse_rejects_missing_endata() {
        assert!(matches!(parse_mps("ROWS\n N  COST\n"), Err(Error::MpsParse { .. })));
    }
}
