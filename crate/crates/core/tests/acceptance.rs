//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails. Pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test --release --test acceptance -- 2 4`.

use std::collections::HashMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use besov_laplace::harness::{
    build_basis, prior_recovery_draws, run_cell, run_cells, Cell, ExperimentConfig, PriorChoice, ResultRow, Schedule,
    Status,
};
use besov_laplace::model::{generate_data, GroundTruth};
use besov_laplace::priors::{whiten_coordinate, BesovLaplaceSpec, SmoothnessHyperPrior};
use besov_laplace::rng::stream_rng;
use besov_laplace::samplers::{AlphaPrior, LaplaceChain, LaplaceSetup, PriorKind};
use besov_laplace::wavelet::{Boundary, EvalMode, WaveletBasis, WaveletFamily};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

const SEED: u64 = 20250101;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn ks(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let m = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / m - f).max(f - i as f64 / m);
    }
    d
}

fn laplace_cdf(x: f64, b: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / b).exp()
    } else {
        1.0 - 0.5 * (-x / b).exp()
    }
}

/// Composite Simpson nodes and weights on `[a, b]`.
fn simpson(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    (0..=panels)
        .map(|i| {
            let w = if i == 0 || i == panels { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            let x = if i == panels { b } else { a + i as f64 * h };
            (x, w * h / 3.0)
        })
        .collect()
}

/// `exp(-n^{d/(2a+d)})`, the unnormalised hyper-prior density.
fn hyper_unnorm(a: f64, n: f64, d: f64) -> f64 {
    (-(n.powf(d / (2.0 * a + d)))).exp()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(SEED, 0);
    let (mut worst_id, mut worst_pars) = (0.0f64, 0.0f64);
    for family in [WaveletFamily::Haar, WaveletFamily::Symmlet8] {
        for boundary in [Boundary::SymmetricReflection, Boundary::Periodic] {
            for (dim, level) in [(1, 10), (2, 5)] {
                let basis = WaveletBasis::new(family, boundary, dim, level, 1024).unwrap();
                let vol = basis.grid().cell_volume();
                let mut work = basis.workspace();
                let mut grid = vec![0.0; 1024];
                let mut back = vec![0.0; 1024];
                for _ in 0..1000 {
                    let c: Vec<f64> = (0..1024).map(|_| rng.sample(StandardNormal)).collect();
                    basis.synthesize_into(&c, &mut grid, &mut work);
                    basis.analyze_into(&grid, &mut back, &mut work);
                    for (a, b) in c.iter().zip(&back) {
                        worst_id = worst_id.max((a - b).abs());
                    }
                    let e1: f64 = c.iter().map(|v| v * v).sum();
                    let e2: f64 = grid.iter().map(|v| v * v).sum::<f64>() * vol;
                    worst_pars = worst_pars.max((e1 - e2).abs() / e1);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_id < 1e-10 && worst_pars < 1e-8 && secs < 10.0,
        format!("round trip {worst_id:.2e} (< 1e-10), Parseval {worst_pars:.2e} (< 1e-8), {secs:.1}s (< 10s)"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let spec = BesovLaplaceSpec::new(3.0, 1, 1, 1).unwrap();
    let t = |w: f64| whiten_coordinate(w, 1, &spec);
    let mut rng = stream_rng(SEED, 0);
    let mut odd = 0.0f64;
    let mut out: Vec<f64> = (0..100_000)
        .map(|_| {
            let w: f64 = rng.sample(StandardNormal);
            odd = odd.max((t(w) + t(-w)).abs());
            t(w)
        })
        .collect();
    let d = ks(&mut out, |x| laplace_cdf(x, 1.0));
    let unit = Normal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - (-1f64).exp() / 2.0);
    let at_unit = t(unit);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        d < 0.01 && t(0.0) == 0.0 && odd == 0.0 && (at_unit - 1.0).abs() < 1e-12 && secs < 5.0,
        format!(
            "KS {d:.4} (< 0.01), T(0) = {}, odd defect {odd:.1e}, T({unit:.4}) = {at_unit:.12}, {secs:.2}s (< 5s)",
            t(0.0)
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut monotone = true;
    for d in [1usize, 2] {
        for n in [200usize, 1000, 5000] {
            let hp = SmoothnessHyperPrior::new(n, d).unwrap();
            let (lo, hi) = (d as f64, (n as f64).ln());
            let mass: f64 = simpson(lo, hi, 20_000).iter().map(|&(a, w)| w * hp.density(a.max(lo + 1e-15))).sum();
            worst = worst.max((mass - 1.0).abs());
            let grid: Vec<f64> = (1..=1000).map(|i| hp.density(lo + (hi - lo) * i as f64 / 1000.0)).collect();
            monotone &= grid.windows(2).all(|w| w[1] > w[0]);
        }
    }
    outcome(
        worst < 1e-6 && monotone,
        format!("max |integral - 1| = {worst:.2e} (< 1e-6), strictly increasing on 1000 points: {monotone}"),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (alpha, n, steps) = (2.0, 10usize, 100_000usize);
    let basis = Arc::new(WaveletBasis::new(WaveletFamily::Symmlet8, Boundary::SymmetricReflection, 1, 10, 2).unwrap());
    let data = generate_data(&GroundTruth::Sigmoid1D, n, SEED).unwrap();
    let setup = LaplaceSetup {
        basis: Arc::clone(&basis),
        alpha_prior: AlphaPrior::Fixed(alpha),
        prior_n: n,
        laplace_scale: 1.0,
    };

    let mut rng = stream_rng(SEED, 1);
    let mut chain = LaplaceChain::new(&setup, &data, EvalMode::Nearest, None, &mut rng).unwrap();
    let burn = 5_000;
    let mut mcmc = [0.0; 2];
    for step in 0..steps {
        chain.wpcn_step(0.4, &mut rng).unwrap();
        if step >= burn {
            mcmc[0] += chain.state().omega[0];
            mcmc[1] += chain.state().omega[1];
        }
    }
    mcmc.iter_mut().for_each(|m| *m /= (steps - burn) as f64);

    // Brute force: midpoint rule over 400 x 400 nodes of the unnormalised
    // posterior in coefficient space.
    let mut work = basis.workspace();
    let mut atoms = [vec![0.0; 1024], vec![0.0; 1024]];
    for (l, atom) in atoms.iter_mut().enumerate() {
        let mut c = [0.0; 2];
        c[l] = 1.0;
        basis.synthesize_into(&c, atom, &mut work);
    }
    let obs: Vec<(f64, f64, f64)> = (0..n)
        .map(|i| {
            let k = ((data.point(i)[0] * 1024.0) as usize).min(1023);
            (atoms[0][k], atoms[1][k], f64::from(data.labels()[i]))
        })
        .collect();
    let r = (n as f64).powf(-1.0 / (2.0 * alpha + 1.0));
    let scale = [r, r * 2f64.powf(-(alpha - 0.5))];
    let pts = 400;
    let node = |k: usize, i: usize| -16.0 * scale[k] + (i as f64 + 0.5) * 32.0 * scale[k] / pts as f64;
    let mut logs = Vec::with_capacity(pts * pts);
    for i in 0..pts {
        for j in 0..pts {
            let (a, b) = (node(0, i), node(1, j));
            let ll: f64 = obs
                .iter()
                .map(|&(g1, g2, y)| {
                    let p = 1.0 / (1.0 + (-(a * g1 + b * g2)).exp());
                    y * p.ln() + (1.0 - y) * (1.0 - p).ln()
                })
                .sum();
            logs.push(ll - a.abs() / scale[0] - b.abs() / scale[1]);
        }
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mut z, mut m) = (0.0, [0.0; 2]);
    for i in 0..pts {
        for j in 0..pts {
            let w = (logs[i * pts + j] - top).exp();
            z += w;
            m[0] += w * node(0, i);
            m[1] += w * node(1, j);
        }
    }
    let exact = [m[0] / z, m[1] / z];
    let gap = (mcmc[0] - exact[0]).abs().max((mcmc[1] - exact[1]).abs());
    let secs = start.elapsed().as_secs_f64();
    outcome(
        gap < 0.02 && secs < 60.0,
        format!(
            "mcmc ({:.4}, {:.4}) vs quadrature ({:.4}, {:.4}), max gap {gap:.4} (< 0.02), {secs:.1}s (< 60s)",
            mcmc[0], mcmc[1], exact[0], exact[1]
        ),
    )
}

fn criterion_5() -> Outcome {
    let prior_n = 1000usize;
    let (mut alpha, mut omega1) = prior_recovery_draws(SEED, prior_n, 10_000, 25).unwrap();
    let (lo, hi, nf) = (1.0, (prior_n as f64).ln(), prior_n as f64);

    // Tabulated hyper-prior: cumulative trapezoid on a fine grid.
    let m = 200_000;
    let h = (hi - lo) / m as f64;
    let mut cum = vec![0.0; m + 1];
    for i in 1..=m {
        let (a0, a1) = (lo + (i - 1) as f64 * h, lo + i as f64 * h);
        cum[i] = cum[i - 1] + 0.5 * h * (hyper_unnorm(a0, nf, 1.0) + hyper_unnorm(a1, nf, 1.0));
    }
    let total = cum[m];
    let alpha_cdf = |a: f64| {
        let t = ((a - lo) / h).clamp(0.0, m as f64);
        let i = (t as usize).min(m - 1);
        (cum[i] + (t - i as f64) * (cum[i + 1] - cum[i])) / total
    };
    let ks_alpha = ks(&mut alpha, alpha_cdf);

    // Prior law of the first coefficient: Laplace with scale
    // n^{-1/(2a+1)}, mixed over the hyper-prior.
    let nodes: Vec<(f64, f64)> = simpson(lo + 1e-12, hi, 2000)
        .into_iter()
        .map(|(a, w)| (nf.powf(-1.0 / (2.0 * a + 1.0)), w * hyper_unnorm(a, nf, 1.0)))
        .collect();
    let norm: f64 = nodes.iter().map(|&(_, w)| w).sum();
    let ks_omega = ks(&mut omega1, |x| nodes.iter().map(|&(s, w)| w * laplace_cdf(x, s)).sum::<f64>() / norm);
    outcome(
        ks_alpha < 0.02 && ks_omega < 0.03,
        format!("10^4 draws: KS alpha {ks_alpha:.4} (< 0.02), KS omega_1 {ks_omega:.4} (< 0.03)"),
    )
}

/// Chain results shared between criteria, keyed by cell.
struct Runs {
    rows: HashMap<(&'static str, PriorKind, usize, usize), ResultRow>,
}

impl Runs {
    fn config(truth: &GroundTruth) -> ExperimentConfig {
        ExperimentConfig {
            truth: truth.clone(),
            prior: PriorChoice::Both,
            master_seed: SEED,
            ..Default::default()
        }
    }

    fn get(&mut self, truth: &GroundTruth, prior: PriorKind, n: usize, reps: usize) -> Vec<ResultRow> {
        let todo: Vec<Cell> = (1..=reps)
            .map(|rep| Cell { prior, n, rep })
            .filter(|c| !self.rows.contains_key(&(truth.name(), prior, n, c.rep)))
            .collect();
        if !todo.is_empty() {
            let cfg = Self::config(truth);
            let basis = build_basis(&cfg).unwrap();
            let workers = std::thread::available_parallelism().map_or(1, |p| p.get());
            let schedule = if workers > 1 { Schedule::Parallel { workers } } else { Schedule::Sequential };
            let mut done = Vec::new();
            run_cells(&cfg, &basis, &todo, None, schedule, |row, _| {
                done.push(row);
                Ok(())
            })
            .unwrap();
            for row in done {
                self.rows.insert((truth.name(), prior, n, row.rep), row);
            }
        }
        (1..=reps).map(|rep| self.rows[&(truth.name(), prior, n, rep)].clone()).collect()
    }

    /// Mean absolute L1 error over the successful replications.
    fn mean(&mut self, truth: &GroundTruth, prior: PriorKind, n: usize, reps: usize) -> (f64, usize) {
        let rows = self.get(truth, prior, n, reps);
        let ok: Vec<f64> = rows.iter().filter(|r| r.status == Status::Ok).filter_map(|r| r.abs_l1).collect();
        (ok.iter().sum::<f64>() / ok.len() as f64, rows.len() - ok.len())
    }
}

fn failed_note(failed: usize) -> String {
    if failed == 0 {
        String::new()
    } else {
        format!(", {failed} failed replications")
    }
}

fn criterion_6(runs: &mut Runs) -> Outcome {
    let start = Instant::now();
    let t = GroundTruth::Sigmoid1D;
    let (lap, f1) = runs.mean(&t, PriorKind::Laplace, 5000, 10);
    let (gp, f2) = runs.mean(&t, PriorKind::Gaussian, 5000, 10);
    let inside = |v: f64| (0.005..=0.02).contains(&v);
    outcome(
        inside(lap) && inside(gp) && f1 + f2 == 0,
        format!(
            "sigmoid1d n=5000, 10 reps: laplace {lap:.4}, gaussian {gp:.4} (band [0.005, 0.02]){}, {:.0}s",
            failed_note(f1 + f2),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_7(runs: &mut Runs) -> Outcome {
    let start = Instant::now();
    let t = GroundTruth::Step1D;
    let (lap, f1) = runs.mean(&t, PriorKind::Laplace, 5000, 10);
    let (gp, f2) = runs.mean(&t, PriorKind::Gaussian, 5000, 10);
    outcome(
        (0.04..=0.09).contains(&lap) && (0.06..=0.11).contains(&gp) && lap <= gp && f1 + f2 == 0,
        format!(
            "step1d n=5000, 10 reps: laplace {lap:.4} (band [0.04, 0.09]), gaussian {gp:.4} (band [0.06, 0.11]), laplace <= gaussian: {}{}, {:.0}s",
            lap <= gp,
            failed_note(f1 + f2),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_8(runs: &mut Runs) -> Outcome {
    let start = Instant::now();
    let t = GroundTruth::Sigmoid1D;
    let (small, f1) = runs.mean(&t, PriorKind::Laplace, 200, 10);
    let (large, f2) = runs.mean(&t, PriorKind::Laplace, 5000, 10);
    outcome(
        large < 0.5 * small && f1 + f2 == 0,
        format!(
            "sigmoid1d laplace, 10 reps: n=200 {small:.4}, n=5000 {large:.4}, ratio {:.3} (< 0.5){}, {:.0}s",
            large / small,
            failed_note(f1 + f2),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_9(runs: &mut Runs) -> Outcome {
    let start = Instant::now();
    let t = GroundTruth::block2d();
    let mut means = Vec::new();
    let mut failed = 0;
    for prior in [PriorKind::Laplace, PriorKind::Gaussian] {
        let m: Vec<f64> = [200, 1000, 5000]
            .iter()
            .map(|&n| {
                let (v, f) = runs.mean(&t, prior, n, 5);
                failed += f;
                v
            })
            .collect();
        means.push(m);
    }
    let decays = means.iter().all(|m| m[0] > m[1] && m[1] > m[2]);
    let direction = means[0][2] < means[1][2];
    outcome(
        direction && decays && failed == 0,
        format!(
            "block2d, 5 reps: n=5000 laplace {:.4} < gaussian {:.4}: {direction}; decay over n=200,1000,5000 laplace {:.4} {:.4} {:.4}, gaussian {:.4} {:.4} {:.4}: {decays}{}, {:.0}s",
            means[0][2],
            means[1][2],
            means[0][0],
            means[0][1],
            means[0][2],
            means[1][0],
            means[1][1],
            means[1][2],
            failed_note(failed),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_10(runs: &mut Runs) -> Outcome {
    let t = GroundTruth::Sigmoid1D;
    let cfg = Runs::config(&t);
    let basis = build_basis(&cfg).unwrap();
    let mut same = true;
    let mut lines = Vec::new();
    for prior in [PriorKind::Laplace, PriorKind::Gaussian] {
        let first = runs.get(&t, prior, 5000, 1).remove(0).to_csv_line();
        let again = run_cell(&cfg, &basis, &Cell { prior, n: 5000, rep: 1 }, None).0.to_csv_line();
        same &= first == again;
        lines.push(again);
    }
    outcome(same, format!("rep 1 rerun, rows byte-identical: {same} ({})", lines.join(" | ")))
}

fn main() -> ExitCode {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let run = |k: usize| wanted.is_empty() || wanted.contains(&k);
    let mut runs = Runs { rows: HashMap::new() };
    let mut all_passed = true;
    for k in 1..=10 {
        if !run(k) {
            continue;
        }
        let o = match k {
            1 => criterion_1(),
            2 => criterion_2(),
            3 => criterion_3(),
            4 => criterion_4(),
            5 => criterion_5(),
            6 => criterion_6(&mut runs),
            7 => criterion_7(&mut runs),
            8 => criterion_8(&mut runs),
            9 => criterion_9(&mut runs),
            _ => criterion_10(&mut runs),
        };
        all_passed &= o.passed;
        println!("{} criterion {k:>2}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
