use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const RESULTS_HEADER: &str = "truth,prior,n,rep,abs_l1,rel_l1,wall_s,acc_alpha,acc_field,seed,status";
pub const RESULTS_FILE: &str = "results.csv";
pub const TIMINGS_FILE: &str = "timings.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

impl Status {
    fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
        }
    }
}

/// One replication of one `(truth, prior, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub truth: String,
    pub prior: String,
    pub n: usize,
    /// One-based replication index.
    pub rep: usize,
    pub abs_l1: Option<f64>,
    pub rel_l1: Option<f64>,
    pub wall_s: Option<f64>,
    /// Post-burn-in acceptance of the hyper-parameter block.
    pub acc_alpha: Option<f64>,
    pub acc_field: Option<f64>,
    /// Data seed of the replication; the chain seed is derived from it and
    /// the prior.
    pub seed: u64,
    pub status: Status,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn parse_opt(field: &str) -> Result<Option<f64>> {
    if field == "NA" {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::parse("results value", field))
}

impl ResultRow {
    pub fn key(&self) -> (&str, &str, usize, usize) {
        (&self.truth, &self.prior, self.n, self.rep)
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.truth,
            self.prior,
            self.n,
            self.rep,
            opt(self.abs_l1),
            opt(self.rel_l1),
            opt(self.wall_s),
            opt(self.acc_alpha),
            opt(self.acc_field),
            self.seed,
            self.status.as_str()
        )
    }

    pub fn from_csv_line(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 11 {
            return Err(Error::parse("results row", line));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| Error::parse("results index", s));
        let row = ResultRow {
            truth: f[0].to_string(),
            prior: f[1].to_string(),
            n: int(f[2])?,
            rep: int(f[3])?,
            abs_l1: parse_opt(f[4])?,
            rel_l1: parse_opt(f[5])?,
            wall_s: parse_opt(f[6])?,
            acc_alpha: parse_opt(f[7])?,
            acc_field: parse_opt(f[8])?,
            seed: f[9].parse().map_err(|_| Error::parse("results seed", f[9]))?,
            status: match f[10] {
                "ok" => Status::Ok,
                "failed" => Status::Failed,
                other => return Err(Error::parse("results status", other)),
            },
        };
        if row.abs_l1.is_some_and(|v| v < 0.0) || row.rel_l1.is_some_and(|v| v < 0.0) {
            return Err(Error::parse("results row", "negative L1 error"));
        }
        Ok(row)
    }
}

/// Sorted by `(truth, prior, n, rep)`, with header.
pub fn results_to_csv(rows: &[ResultRow]) -> String {
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.key().cmp(&b.key()));
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in sorted {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn results_from_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == RESULTS_HEADER => {}
        other => return Err(Error::parse("results header", other.unwrap_or(""))),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(ResultRow::from_csv_line)
        .collect()
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    results_from_csv(&text)
}

pub(crate) fn timings_to_csv(rows: &[(ResultRow, f64)]) -> String {
    let mut sorted: Vec<&(ResultRow, f64)> = rows.iter().collect();
    sorted.sort_by(|a, b| a.0.key().cmp(&b.0.key()));
    let mut out = String::from("truth,prior,n,rep,wall_s\n");
    for (r, t) in sorted {
        let _ = writeln!(out, "{},{},{},{},{:.3}", r.truth, r.prior, r.n, r.rep, t);
    }
    out
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(prior: &str, rep: usize) -> ResultRow {
        ResultRow {
            truth: "step1d".into(),
            prior: prior.into(),
            n: 200,
            rep,
            abs_l1: Some(0.0625),
            rel_l1: None,
            wall_s: None,
            acc_alpha: Some(0.3),
            acc_field: Some(0.28),
            seed: 99,
            status: Status::Ok,
        }
    }

    #[test]
    fn csv_round_trip_sorts() {
        let rows = vec![row("laplace", 2), row("gaussian", 1), row("laplace", 1)];
        let text = results_to_csv(&rows);
        assert!(text.starts_with(RESULTS_HEADER));
        assert_eq!(text.lines().nth(1).unwrap(), "step1d,gaussian,200,1,0.0625,NA,NA,0.3,0.28,99,ok");
        let back = results_from_csv(&text).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[2], row("laplace", 2));
    }

    #[test]
    fn malformed_rows_are_rejected() {
        assert!(ResultRow::from_csv_line("a,b,c").is_err());
        assert!(ResultRow::from_csv_line("t,p,1,1,-0.5,NA,NA,NA,NA,3,ok").is_err());
        assert!(ResultRow::from_csv_line("t,p,1,1,0.5,NA,NA,NA,NA,3,maybe").is_err());
        assert!(results_from_csv("wrong header\n").is_err());
    }
}
