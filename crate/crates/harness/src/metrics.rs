//! Per-update metrics rows and their CSV form.

use std::fmt::Write as _;
use thiserror::Error;

pub const COLUMNS: [&str; 9] = [
    "update_index",
    "cumulative_env_steps",
    "train_return_mean",
    "train_cvar_alpha",
    "train_var_alpha",
    "eval_cvar_alpha",
    "eval_return_mean",
    "cap_value",
    "wall_seconds",
];

#[derive(Debug, Error)]
#[error("metrics line {line}: {message}")]
pub struct CsvError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub update_index: usize,
    pub cumulative_env_steps: u64,
    pub train_return_mean: f64,
    pub train_cvar_alpha: f64,
    pub train_var_alpha: f64,
    /// Empty on updates without an evaluation.
    pub eval_cvar_alpha: Option<f64>,
    pub eval_return_mean: Option<f64>,
    /// Empty for algorithms without a cap.
    pub cap_value: Option<f64>,
    pub wall_seconds: f64,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

impl MetricsRow {
    /// Values in [`COLUMNS`] order; `None` for empty cells.
    pub fn values(&self) -> [Option<f64>; 9] {
        [
            Some(self.update_index as f64),
            Some(self.cumulative_env_steps as f64),
            Some(self.train_return_mean),
            Some(self.train_cvar_alpha),
            Some(self.train_var_alpha),
            self.eval_cvar_alpha,
            self.eval_return_mean,
            self.cap_value,
            Some(self.wall_seconds),
        ]
    }
}

pub fn to_csv(rows: &[MetricsRow]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:?},{:?},{:?},{},{},{},{:?}",
            r.update_index,
            r.cumulative_env_steps,
            r.train_return_mean,
            r.train_cvar_alpha,
            r.train_var_alpha,
            opt(r.eval_cvar_alpha),
            opt(r.eval_return_mean),
            opt(r.cap_value),
            r.wall_seconds
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<MetricsRow>, CsvError> {
    let bad = |line: usize, message: String| CsvError { line, message };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == COLUMNS.join(",") => {}
        _ => return Err(bad(1, "unexpected header".into())),
    }
    let mut rows = Vec::new();
    for (i, l) in lines {
        let n = i + 1;
        let cells: Vec<&str> = l.split(',').collect();
        if cells.len() != COLUMNS.len() {
            return Err(bad(n, format!("expected {} cells, found {}", COLUMNS.len(), cells.len())));
        }
        let num = |k: usize| -> Result<f64, CsvError> {
            cells[k]
                .parse()
                .map_err(|_| bad(n, format!("{} is not a number: {:?}", COLUMNS[k], cells[k])))
        };
        let maybe = |k: usize| -> Result<Option<f64>, CsvError> {
            if cells[k].is_empty() {
                Ok(None)
            } else {
                num(k).map(Some)
            }
        };
        let int = |k: usize| -> Result<u64, CsvError> {
            cells[k]
                .parse()
                .map_err(|_| bad(n, format!("{} is not an integer: {:?}", COLUMNS[k], cells[k])))
        };
        rows.push(MetricsRow {
            update_index: int(0)? as usize,
            cumulative_env_steps: int(1)?,
            train_return_mean: num(2)?,
            train_cvar_alpha: num(3)?,
            train_var_alpha: num(4)?,
            eval_cvar_alpha: maybe(5)?,
            eval_return_mean: maybe(6)?,
            cap_value: maybe(7)?,
            wall_seconds: num(8)?,
        });
    }
    Ok(rows)
}
