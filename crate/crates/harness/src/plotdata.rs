//! Merges per-seed metrics into one table of across-seed summaries.

use crate::fsutil::write_atomic;
use crate::metrics::{parse_csv, MetricsRow, COLUMNS};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

/// Metric columns summarised across seeds.
pub const SUMMARISED: [usize; 6] = [2, 3, 4, 5, 6, 7];

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("no metrics.csv files under {0}")]
    NoRuns(PathBuf),
    #[error("{path}: {message}")]
    Bad { path: PathBuf, message: String },
    #[error("{path} does not share the update grid of {reference}: {message}")]
    Grid {
        path: PathBuf,
        reference: PathBuf,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Mean, range and normal-approximation 95% interval. The interval has zero
/// width for a single value.
pub fn summarise(values: &[f64]) -> Summary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let half = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        Z95 * var.sqrt() / n.sqrt()
    } else {
        0.0
    };
    Summary {
        mean,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ci_low: mean - half,
        ci_high: mean + half,
    }
}

/// Every `metrics.csv` below `dir`, sorted by path.
pub fn find_runs(dir: &Path) -> Result<Vec<PathBuf>, PlotError> {
    let mut found = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries = std::fs::read_dir(&d).map_err(|source| PlotError::Io { path: d.clone(), source })?;
        for entry in entries {
            let path = entry.map_err(|source| PlotError::Io { path: d.clone(), source })?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n == "metrics.csv") {
                found.push(path);
            }
        }
    }
    found.sort();
    if found.is_empty() {
        return Err(PlotError::NoRuns(dir.to_path_buf()));
    }
    Ok(found)
}

/// Builds the merged CSV from already-loaded runs.
pub fn merge(runs: &[(PathBuf, Vec<MetricsRow>)]) -> Result<String, PlotError> {
    let (ref_path, reference) = runs.first().ok_or_else(|| PlotError::NoRuns(PathBuf::new()))?;
    for (path, rows) in &runs[1..] {
        let grid = |message: String| PlotError::Grid {
            path: path.clone(),
            reference: ref_path.clone(),
            message,
        };
        if rows.len() != reference.len() {
            return Err(grid(format!("{} rows against {}", rows.len(), reference.len())));
        }
        for (a, b) in rows.iter().zip(reference) {
            if a.update_index != b.update_index || a.cumulative_env_steps != b.cumulative_env_steps {
                return Err(grid(format!("update {} at {} steps", a.update_index, a.cumulative_env_steps)));
            }
            for &k in &SUMMARISED {
                if a.values()[k].is_some() != b.values()[k].is_some() {
                    return Err(grid(format!("{} present in only one run at update {}", COLUMNS[k], a.update_index)));
                }
            }
        }
    }
    let mut out = String::from("cumulative_env_steps,update_index,seeds");
    for &k in &SUMMARISED {
        for stat in ["mean", "min", "max", "ci95_low", "ci95_high"] {
            let _ = write!(out, ",{}_{stat}", COLUMNS[k]);
        }
    }
    out.push('\n');
    for (i, r) in reference.iter().enumerate() {
        let _ = write!(out, "{},{},{}", r.cumulative_env_steps, r.update_index, runs.len());
        for &k in &SUMMARISED {
            let values: Vec<f64> = runs.iter().filter_map(|(_, rows)| rows[i].values()[k]).collect();
            if values.is_empty() {
                out.push_str(",,,,,");
            } else {
                let s = summarise(&values);
                let _ = write!(out, ",{:?},{:?},{:?},{:?},{:?}", s.mean, s.min, s.max, s.ci_low, s.ci_high);
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Merges every run below `dir` into `dir/plotdata.csv` and returns its path.
pub fn emit_plotdata(dir: &Path) -> Result<PathBuf, PlotError> {
    let mut runs = Vec::new();
    for path in find_runs(dir)? {
        let text = std::fs::read_to_string(&path).map_err(|source| PlotError::Io {
            path: path.clone(),
            source,
        })?;
        let rows = parse_csv(&text).map_err(|e| PlotError::Bad {
            path: path.clone(),
            message: e.to_string(),
        })?;
        runs.push((path, rows));
    }
    let text = merge(&runs)?;
    let out = dir.join("plotdata.csv");
    write_atomic(&out, text.as_bytes()).map_err(|source| PlotError::Io {
        path: out.clone(),
        source,
    })?;
    Ok(out)
}
