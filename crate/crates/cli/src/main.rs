use std::path::PathBuf;
use std::process::ExitCode;

use barracuda_cli::balls::balls_in_bins_rows;
use barracuda_cli::table::write_csv;
use barracuda_cli::verify::{run_check, Check, DEFAULT_SEED};
use barracuda_cli::{render_figure, run_experiment, ExperimentKind, FigureSpec, HarnessError, Result, RunOptions};
use barracuda_core::theory::{
    chain_threshold_delta, exact_chain_probability, nakamoto_lower_bound, tv_bound, BinSampling,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Monte Carlo blocktree simulator with ℓ-polling.
#[derive(Parser)]
#[command(name = "barracuda", version)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Use the experiment's `[full]` overrides (large-network budgets).
    #[arg(long, global = true)]
    full: bool,
    /// Override every configured seed.
    #[arg(long, global = true, env = "BARRACUDA_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Experiment {
    /// Experiment file (TOML).
    config: PathBuf,
    /// Write outputs here instead of the configured directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampling {
    Without,
    With,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment according to its `kind`.
    Run(Experiment),
    /// Per-trial results and shape distribution of the configured model.
    Simulate(Experiment),
    /// Throughput over the configured (Δ, ℓ) grid.
    Sweep(Experiment),
    /// Largest Δ whose throughput reaches the threshold, per ℓ.
    Delta80(Experiment),
    /// Closed-form perfect-chain probability.
    Exact {
        #[arg(long)]
        t: u32,
        #[arg(long, default_value_t = 1)]
        ell: u32,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        wait: f64,
    },
    /// Throughput lower bound, critical delay and total-variation bounds.
    Bounds {
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        ell: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 100)]
        t: u32,
        #[arg(long, default_value_t = 10_000)]
        n: u32,
        #[arg(long, default_value_t = 0.0)]
        wait: f64,
        /// Target chain probability for the critical delay.
        #[arg(long, default_value_t = 0.5)]
        confidence: f64,
    },
    /// Max-loaded ℓ-choice balls-in-bins runs.
    Ballsbins {
        #[arg(long, default_value_t = 10_000)]
        t: u32,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        ells: Vec<u32>,
        #[arg(long, default_value_t = 1000)]
        runs: u32,
        #[arg(long, value_enum, default_value_t = Sampling::Without)]
        sampling: Sampling,
        #[arg(long, default_value = "results/ballsbins.csv")]
        out: PathBuf,
    },
    /// Render a figure specification (TOML) to SVG.
    Plot { spec: PathBuf },
    /// Run a built-in check and report each assertion.
    Verify {
        #[arg(value_enum)]
        check: Check,
    },
}

fn experiment(cli: &Cli, e: &Experiment, kind: Option<ExperimentKind>) -> Result<()> {
    let options = RunOptions { full: cli.full, seed: cli.seed, output_dir: e.out.clone(), kind };
    for file in run_experiment(&e.config, &options)? {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(e) => experiment(cli, e, None),
        Command::Simulate(e) => experiment(cli, e, Some(ExperimentKind::Simulate)),
        Command::Sweep(e) => experiment(cli, e, Some(ExperimentKind::Sweep)),
        Command::Delta80(e) => experiment(cli, e, Some(ExperimentKind::Delta80)),
        &Command::Exact { t, ell, delta, wait } => {
            println!("exact_chain_probability={}", exact_chain_probability(t, ell, delta, wait)?);
            Ok(())
        }
        Command::Bounds { delta, ell, k, t, n, wait, confidence } => {
            for &d in delta {
                // ℓ-polling acts as a network ℓ times faster.
                println!("delta={d} ell={ell} nakamoto_lower_bound={}", nakamoto_lower_bound(d / *ell as f64)?);
            }
            match chain_threshold_delta(*t, *confidence, *wait, *ell) {
                Ok(d) => println!("chain_threshold_delta={d}"),
                Err(e) => eprintln!("chain_threshold_delta: {e}"),
            }
            let tv = tv_bound(*ell, *k, *t, *n)?;
            println!("tv_bound_birthday={}", tv.birthday);
            println!("tv_bound_display={}", tv.display);
            Ok(())
        }
        &Command::Ballsbins { t, ref ells, runs, sampling, ref out } => {
            let sampling = match sampling {
                Sampling::Without => BinSampling::WithoutReplacement,
                Sampling::With => BinSampling::WithReplacement,
            };
            let rows = balls_in_bins_rows(t, ells, runs, sampling, cli.seed.unwrap_or(DEFAULT_SEED))?;
            write_csv(out, &rows)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Plot { spec } => {
            let path = render_figure(&FigureSpec::load(spec)?)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        &Command::Verify { check } => {
            let results = run_check(check, cli.seed.unwrap_or(DEFAULT_SEED))?;
            for a in &results {
                println!("{a}");
            }
            let failed = results.iter().filter(|a| !a.passed).count();
            if failed > 0 {
                return Err(HarnessError::ChecksFailed { failed, total: results.len() });
            }
            println!("OK {}: {} assertions", check.name(), results.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot start {jobs} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
