use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::warn;

use super::results::{read_results, write_atomic, ResultRow, Status, RESULTS_FILE};
use crate::error::{Error, Result};

pub const SUMMARY_HEADER: &str = "truth,prior,n,reps,abs_l1_mean,abs_l1_sd,rel_l1_mean,rel_l1_sd";

/// Mean and sample standard deviation (`0` for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (k - 1.0)).sqrt())
}

fn fmt_pair(values: &[f64]) -> String {
    if values.is_empty() {
        return "NA,NA".to_string();
    }
    let (m, s) = mean_sd(values);
    format!("{m},{s}")
}

/// One line per `(truth, prior, n)` over its `ok` rows. Cells where every
/// replication failed are left out with a warning.
pub fn summarize(rows: &[ResultRow]) -> String {
    let mut cells: BTreeMap<(&str, &str, usize), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        cells.entry((&r.truth, &r.prior, r.n)).or_default().push(r);
    }
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for ((truth, prior, n), group) in cells {
        let ok: Vec<&ResultRow> = group.iter().copied().filter(|r| r.status == Status::Ok).collect();
        if ok.is_empty() {
            warn!("{truth} {prior} n={n}: no successful replications, omitted");
            continue;
        }
        if ok.len() < group.len() {
            warn!("{truth} {prior} n={n}: {} of {} replications failed", group.len() - ok.len(), group.len());
        }
        let abs: Vec<f64> = ok.iter().filter_map(|r| r.abs_l1).collect();
        let rel: Vec<f64> = ok.iter().filter_map(|r| r.rel_l1).collect();
        let _ = writeln!(out, "{truth},{prior},{n},{},{},{}", ok.len(), fmt_pair(&abs), fmt_pair(&rel));
    }
    out
}

/// Reads `results.csv` from a directory (or the file itself) and writes the
/// per-cell summary to `out_file`.
pub fn aggregate(input: &Path, out_file: &Path) -> Result<PathBuf> {
    let path = if input.is_dir() { input.join(RESULTS_FILE) } else { input.to_path_buf() };
    if !path.exists() {
        return Err(Error::config(format!("no results file at {}", path.display())));
    }
    let rows = read_results(&path)?;
    if let Some(parent) = out_file.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    write_atomic(out_file, &summarize(&rows))?;
    Ok(out_file.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(prior: &str, rep: usize, abs: Option<f64>, status: Status) -> ResultRow {
        ResultRow {
            truth: "step1d".into(),
            prior: prior.into(),
            n: 200,
            rep,
            abs_l1: abs,
            rel_l1: abs.map(|a| a * 2.0),
            wall_s: None,
            acc_alpha: None,
            acc_field: None,
            seed: rep as u64,
            status,
        }
    }

    #[test]
    fn two_rows() {
        let rows = [
            row("laplace", 1, Some(0.05), Status::Ok),
            row("laplace", 2, Some(0.07), Status::Ok),
            row("laplace", 3, None, Status::Failed),
            row("gaussian", 1, None, Status::Failed),
        ];
        let text = summarize(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let f: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(&f[..4], &["step1d", "laplace", "200", "2"]);
        let mean: f64 = f[4].parse().unwrap();
        let sd: f64 = f[5].parse().unwrap();
        assert!((mean - 0.06).abs() < 1e-12);
        assert!((sd - 0.0141421356).abs() < 1e-9);
        assert!((f[6].parse::<f64>().unwrap() - 0.12).abs() < 1e-12);
    }

    #[test]
    fn single_value_has_zero_sd() {
        assert_eq!(mean_sd(&[0.3]), (0.3, 0.0));
    }
}
