use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::Arc;
use std::time::Instant;

use log::{info, warn};

use super::config::ExperimentConfig;
use super::results::{read_results, results_to_csv, timings_to_csv, write_atomic, ResultRow, Status};
use super::results::{RESULTS_FILE, TIMINGS_FILE};
use crate::error::{Error, Result};
use crate::model::{generate_data, l1_error, GroundTruth};
use crate::priors::GaussianComparatorSpec;
use crate::rng::mix_seed;
use crate::samplers::{run_chain, ChainSetup, GaussianSetup, LaplaceSetup, PriorKind, SamplerConfig};
use crate::wavelet::{GridShape, WaveletBasis};

/// One work item of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub prior: PriorKind,
    pub n: usize,
    /// One-based.
    pub rep: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Sequential,
    /// Needs the `parallel` feature; falls back to sequential without it.
    Parallel { workers: usize },
}

/// `(data seed, chain seed)` of a cell. The data seed mixes the master
/// seed with `(truth id, n, rep)`, so both priors see the same data; the
/// chain seed mixes the data seed with the prior id.
pub fn cell_seeds(master: u64, truth: &GroundTruth, cell: &Cell) -> (u64, u64) {
    let data = mix_seed(master, &[truth.id(), cell.n as u64, cell.rep as u64]);
    (data, mix_seed(data, &[cell.prior.id()]))
}

pub fn cell_dir(root: &Path, truth: &GroundTruth, cell: &Cell) -> PathBuf {
    root.join("cells").join(format!(
        "{}_{}_n{}_rep{}",
        truth.name(),
        cell.prior.name(),
        cell.n,
        cell.rep
    ))
}

pub fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for prior in cfg.prior.kinds() {
        for &n in &cfg.n_list {
            for rep in 1..=cfg.replications {
                out.push(Cell { prior, n, rep });
            }
        }
    }
    out
}

pub fn build_basis(cfg: &ExperimentConfig) -> Result<Arc<WaveletBasis>> {
    let d = cfg.truth.dim();
    let b = &cfg.basis;
    Ok(Arc::new(WaveletBasis::new(b.family, b.boundary, d, b.level_for(d), b.truncation)?))
}

pub fn chain_setup(cfg: &ExperimentConfig, basis: &Arc<WaveletBasis>, prior: PriorKind, n: usize) -> Result<ChainSetup> {
    match prior {
        PriorKind::Laplace => {
            let mut s = LaplaceSetup::hierarchical(Arc::clone(basis), n)?;
            s.laplace_scale = cfg.laplace_scale;
            Ok(ChainSetup::Laplace(s))
        }
        PriorKind::Gaussian => {
            let d = basis.dim();
            let g = &cfg.gaussian;
            let level = g.level.unwrap_or(if d == 2 { 5 } else { 7 });
            let mut gp = GaussianComparatorSpec::new(GridShape::new(d, level)?);
            gp.jitter_start = g.jitter_start;
            gp.jitter_max = g.jitter_max;
            Ok(ChainSetup::Gaussian(GaussianSetup {
                gp,
                output: basis.grid(),
                a_init: g.a_init,
            }))
        }
    }
}

fn write_artifacts(dir: &Path, data: &crate::model::Dataset, out: &crate::samplers::ChainOutput) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let s = &out.summary;
    write_atomic(&dir.join("mean_p.csv"), &s.mean_p.to_csv())?;
    write_atomic(&dir.join("band_low.csv"), &s.band_low.to_csv())?;
    write_atomic(&dir.join("band_high.csv"), &s.band_high.to_csv())?;
    write_atomic(&dir.join("data.csv"), &data.to_csv())?;
    if let Some(trace) = &out.trace {
        write_atomic(&dir.join("trace.csv"), trace)?;
    }
    Ok(())
}

/// Runs one cell, writes its artifacts under `root` (if given) and returns
/// the row with the wall-clock seconds. Failures become `failed` rows.
pub fn run_cell(cfg: &ExperimentConfig, basis: &Arc<WaveletBasis>, cell: &Cell, root: Option<&Path>) -> (ResultRow, f64) {
    let start = Instant::now();
    let (data_seed, chain_seed) = cell_seeds(cfg.master_seed, &cfg.truth, cell);
    let outcome = (|| -> Result<_> {
        let data = generate_data(&cfg.truth, cell.n, data_seed)?;
        let setup = chain_setup(cfg, basis, cell.prior, cell.n)?;
        let sampler = SamplerConfig {
            seed: chain_seed,
            ..cfg.sampler.clone()
        };
        let out = run_chain(&setup, &data, &sampler)?;
        let err = l1_error(&out.summary.mean_p, &cfg.truth)?;
        if let Some(root) = root {
            write_artifacts(&cell_dir(root, &cfg.truth, cell), &data, &out)?;
        }
        Ok((err, out.summary.acc_hyper, out.summary.acc_field))
    })();
    let wall = start.elapsed().as_secs_f64();
    let mut row = ResultRow {
        truth: cfg.truth.name().to_string(),
        prior: cell.prior.name().to_string(),
        n: cell.n,
        rep: cell.rep,
        abs_l1: None,
        rel_l1: None,
        wall_s: cfg.timing.then_some(wall),
        acc_alpha: None,
        acc_field: None,
        seed: data_seed,
        status: Status::Failed,
    };
    match outcome {
        Ok((err, acc_hyper, acc_field)) => {
            row.abs_l1 = Some(err.absolute);
            row.rel_l1 = err.relative;
            row.acc_alpha = acc_hyper;
            row.acc_field = acc_field;
            row.status = Status::Ok;
            info!(
                "{} {} n={} rep={}: abs L1 {:.4} ({wall:.1}s)",
                row.truth, row.prior, row.n, row.rep, err.absolute
            );
        }
        Err(e) => warn!("{} {} n={} rep={} failed: {e}", row.truth, row.prior, row.n, row.rep),
    }
    (row, wall)
}

/// Runs `cells` on the given schedule. Rows are handed to `sink` on the
/// calling thread in completion order.
pub fn run_cells(
    cfg: &ExperimentConfig,
    basis: &Arc<WaveletBasis>,
    cells: &[Cell],
    root: Option<&Path>,
    schedule: Schedule,
    mut sink: impl FnMut(ResultRow, f64) -> Result<()>,
) -> Result<()> {
    match schedule {
        Schedule::Sequential => {
            for cell in cells {
                let (row, wall) = run_cell(cfg, basis, cell, root);
                sink(row, wall)?;
            }
            Ok(())
        }
        Schedule::Parallel { workers } => run_parallel(cfg, basis, cells, root, workers, &mut sink),
    }
}

#[cfg(feature = "parallel")]
fn run_parallel(
    cfg: &ExperimentConfig,
    basis: &Arc<WaveletBasis>,
    cells: &[Cell],
    root: Option<&Path>,
    workers: usize,
    sink: &mut impl FnMut(ResultRow, f64) -> Result<()>,
) -> Result<()> {
    use rayon::prelude::*;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| {
        scope.spawn(move || {
            pool.install(|| {
                cells.par_iter().for_each_with(tx, |tx, cell| {
                    let _ = tx.send(run_cell(cfg, basis, cell, root));
                });
            });
        });
        let mut first_error = None;
        for (row, wall) in rx {
            if first_error.is_none() {
                first_error = sink(row, wall).err();
            }
        }
        first_error.map_or(Ok(()), Err)
    })
}

#[cfg(not(feature = "parallel"))]
fn run_parallel(
    cfg: &ExperimentConfig,
    basis: &Arc<WaveletBasis>,
    cells: &[Cell],
    root: Option<&Path>,
    workers: usize,
    sink: &mut impl FnMut(ResultRow, f64) -> Result<()>,
) -> Result<()> {
    if workers > 1 {
        warn!("built without the `parallel` feature; running {} cells sequentially", cells.len());
    }
    let (tx, rx) = mpsc::channel();
    for cell in cells {
        let _ = tx.send(run_cell(cfg, basis, cell, root));
        for (row, wall) in rx.try_iter() {
            sink(row, wall)?;
        }
    }
    Ok(())
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs the sweep and returns the path of `results.csv`. The results file
/// is rewritten (temporary file plus rename) after every finished cell.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<PathBuf> {
    cfg.validate()?;
    let root = cfg.output.as_path();
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let results_path = root.join(RESULTS_FILE);

    let mut rows: Vec<ResultRow> = Vec::new();
    if cfg.resume && results_path.exists() {
        rows = read_results(&results_path)?
            .into_iter()
            .filter(|r| r.status == Status::Ok && r.truth == cfg.truth.name())
            .collect();
        info!("resuming: {} finished rows kept", rows.len());
    }
    let done: HashSet<(String, usize, usize)> = rows.iter().map(|r| (r.prior.clone(), r.n, r.rep)).collect();
    let todo: Vec<Cell> = cells(cfg)
        .into_iter()
        .filter(|c| !done.contains(&(c.prior.name().to_string(), c.n, c.rep)))
        .collect();

    let basis = build_basis(cfg)?;
    let workers = cfg.workers.unwrap_or_else(default_workers);
    let schedule = if workers > 1 { Schedule::Parallel { workers } } else { Schedule::Sequential };
    info!("{} cells to run on {workers} worker(s)", todo.len());

    write_atomic(&results_path, &results_to_csv(&rows))?;
    let mut timings = Vec::with_capacity(todo.len());
    run_cells(cfg, &basis, &todo, Some(root), schedule, |row, wall| {
        timings.push((row.clone(), wall));
        rows.push(row);
        write_atomic(&results_path, &results_to_csv(&rows))
    })?;
    write_atomic(&root.join(TIMINGS_FILE), &timings_to_csv(&timings))?;
    Ok(results_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priors_share_data_seeds() {
        let t = GroundTruth::Step1D;
        let a = cell_seeds(7, &t, &Cell { prior: PriorKind::Laplace, n: 200, rep: 1 });
        let b = cell_seeds(7, &t, &Cell { prior: PriorKind::Gaussian, n: 200, rep: 1 });
        let c = cell_seeds(7, &t, &Cell { prior: PriorKind::Laplace, n: 200, rep: 2 });
        assert_eq!(a.0, b.0);
        assert_ne!(a.1, b.1);
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn cell_enumeration() {
        let cfg = ExperimentConfig {
            n_list: vec![200, 1000],
            replications: 3,
            ..Default::default()
        };
        let all = cells(&cfg);
        assert_eq!(all.len(), 12);
        assert_eq!(all[0], Cell { prior: PriorKind::Laplace, n: 200, rep: 1 });
        let dir = cell_dir(Path::new("out"), &cfg.truth, &all[0]);
        assert_eq!(dir, Path::new("out/cells/sigmoid1d_laplace_n200_rep1"));
    }
}
