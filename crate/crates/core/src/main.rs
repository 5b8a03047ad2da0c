use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use instance_forge::classifier::{
    write_sweep_csv, KernelSpec, SweepOptions, DEFAULT_LINEAR_C, DEFAULT_RBF_C, DEFAULT_RBF_GAMMA,
};
use instance_forge::harness::{
    cmd_classify, cmd_evolve, cmd_features, cmd_report_ranges, cmd_solve, write_range_csv,
    write_raw_csv, ExperimentConfig,
};
use instance_forge::solvers::{OptOracle, DEFAULT_RESTARTS};
use instance_forge::{Error, Result};

#[derive(Parser)]
#[command(
    name = "instance-forge",
    version,
    about = "Evolve and analyse easy and hard TSP instances for 2-opt"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Linear,
    Rbf,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (run spec, seed) pair of an experiment config.
    Evolve { config: PathBuf },
    /// Print the seven features of each instance file as CSV.
    Features { files: Vec<PathBuf> },
    /// Report 2-opt mean tour length, optimum and their ratio as JSON.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// External optimum command; `{path}` is replaced by the instance file.
        #[arg(long)]
        oracle_cmd: Option<String>,
        /// JSON file mapping instance ids to optimal tour lengths.
        #[arg(long, conflicts_with = "oracle_cmd")]
        oracle_cache: Option<PathBuf>,
    },
    /// Feature ranges of final populations.
    ReportRanges {
        run_dirs: Vec<PathBuf>,
        #[arg(long)]
        all_features: bool,
        /// Also write every member's value to this CSV.
        #[arg(long)]
        raw: Option<PathBuf>,
    },
    /// SVM accuracy for every feature pair or triple.
    Classify {
        run_dirs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "rbf")]
        kernel: KernelArg,
        #[arg(long = "C")]
        c: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_RBF_GAMMA)]
        gamma: f64,
        #[arg(long = "combo-size", default_values_t = [2usize, 3])]
        combo_size: Vec<usize>,
        /// Pool all instance sizes into one dataset.
        #[arg(long)]
        pool: bool,
        /// Score on this held-out fraction instead of training accuracy.
        #[arg(long)]
        holdout: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    match cli.command {
        Command::Evolve { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summary = cmd_evolve(&cfg)?;
            for dir in &summary.run_dirs {
                println!("{}", dir.display());
            }
            if let Some(p) = &summary.sweep_csv {
                println!("{}", p.display());
            }
            if let Some((dir, first)) = summary.failures.into_iter().next() {
                return Err(Error::Oracle(format!(
                    "run {} aborted: {first}",
                    dir.display()
                )));
            }
        }
        Command::Features { files } => {
            let failures = cmd_features(&files, stdout.lock(), io::stderr())?;
            if failures > 0 {
                return Err(Error::Config(format!(
                    "{failures} instance file(s) could not be read"
                )));
            }
        }
        Command::Solve {
            file,
            restarts,
            seed,
            oracle_cmd,
            oracle_cache,
        } => {
            let oracle = match (oracle_cmd, oracle_cache) {
                (Some(cmd), _) => OptOracle::external(cmd),
                (_, Some(path)) => OptOracle::cached(path),
                _ => OptOracle::from_env().unwrap_or_default(),
            };
            let out = cmd_solve(&file, restarts, &oracle, seed)?;
            let mut lock = stdout.lock();
            serde_json::to_writer_pretty(&mut lock, &out)?;
            writeln!(lock)?;
        }
        Command::ReportRanges {
            run_dirs,
            all_features,
            raw,
        } => {
            let (rows, values) = cmd_report_ranges(&run_dirs, all_features)?;
            write_range_csv(&rows, stdout.lock())?;
            if let Some(path) = raw {
                write_raw_csv(&values, std::fs::File::create(path)?)?;
            }
        }
        Command::Classify {
            run_dirs,
            kernel,
            c,
            gamma,
            combo_size,
            pool,
            holdout,
            seed,
        } => {
            let (kernel, c) = match kernel {
                KernelArg::Linear => (KernelSpec::Linear, c.unwrap_or(DEFAULT_LINEAR_C)),
                KernelArg::Rbf => (KernelSpec::Rbf { gamma }, c.unwrap_or(DEFAULT_RBF_C)),
            };
            let opts = SweepOptions {
                holdout_fraction: holdout,
                seed,
                ..SweepOptions::default()
            };
            let rows = cmd_classify(&run_dirs, kernel, c, &combo_size, pool, &opts)?;
            write_sweep_csv(&rows, stdout.lock())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
