use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use besov_laplace::harness::{aggregate, run_experiment, validate, ExperimentConfig, ValidationMode};
use besov_laplace::Result;

#[derive(Parser)]
#[command(name = "besov-laplace", version, about = "Besov-Laplace classification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run a sweep over priors, sample sizes and replications.
    Simulate(SimulateArgs),
    /// Summarise a results file per (truth, prior, n).
    Aggregate {
        /// Output directory of a sweep, or its results.csv.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a self-check suite.
    Validate {
        /// roundtrip, whitening, prior-recovery, oracle or all.
        #[arg(long, default_value = "all")]
        mode: String,
        #[arg(long, default_value_t = 20250101)]
        seed: u64,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// `key = value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    truth: Option<String>,
    /// laplace, gaussian or both.
    #[arg(long)]
    prior: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    #[arg(long)]
    burnin: Option<String>,
    #[arg(long)]
    thinning: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// on or off.
    #[arg(long)]
    adapt: Option<String>,
    #[arg(long)]
    delta1: Option<String>,
    #[arg(long)]
    delta2: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// Skip cells already finished in the output directory.
    #[arg(long)]
    resume: bool,
    /// Record wall-clock seconds in results.csv.
    #[arg(long)]
    timing: bool,
    /// 50 replications over n = 50, 200, 1000, 5000.
    #[arg(long)]
    paper_scale: bool,
    /// Any other configuration key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    extra: Vec<String>,
}

impl SimulateArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if self.paper_scale {
            cfg.apply_full_scale();
        }
        let flags = [
            ("truth", &self.truth),
            ("prior", &self.prior),
            ("n", &self.n),
            ("reps", &self.reps),
            ("iters", &self.iters),
            ("burnin", &self.burnin),
            ("thinning", &self.thinning),
            ("seed", &self.seed),
            ("out", &self.out),
            ("adapt", &self.adapt),
            ("delta1", &self.delta1),
            ("delta2", &self.delta2),
            ("workers", &self.workers),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for kv in &self.extra {
            cfg.apply_text(kv)?;
        }
        if self.resume {
            cfg.resume = true;
        }
        if self.timing {
            cfg.timing = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.config()?;
            let path = run_experiment(&cfg)?;
            println!("{}", path.display());
            Ok(true)
        }
        Command::Aggregate { input, out } => {
            let path = aggregate(&input, &out)?;
            println!("{}", path.display());
            Ok(true)
        }
        Command::Validate { mode, seed } => {
            let modes = if mode == "all" { ValidationMode::ALL.to_vec() } else { vec![mode.parse()?] };
            let mut ok = true;
            for m in modes {
                let report = validate(m, seed)?;
                print!("{report}");
                ok &= report.passed();
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            error!("{e}");
            ExitCode::from(2)
        }
    }
}
