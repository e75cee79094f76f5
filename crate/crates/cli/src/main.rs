//! `qmlfraud`: prepare datasets, train classifiers, run grids and write reports.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 run failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmlfraud_core::dataprep::{
    load_banksim_encoded, load_european, load_labeled_csv, prepare, write_prepared, DatasetKind, PrepareOptions,
    DEFAULT_TEST_FRACTION,
};
use qmlfraud_core::harness::{
    grid_status, read_records, run_experiment, run_grid, write_failures, write_reports, ExperimentConfig,
};
use qmlfraud_core::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "qmlfraud", version, about = "Variational quantum classifiers for fraud detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean, balance, split and scale a raw dataset into a prepared directory.
    Preprocess {
        /// banksim, european or custom (last column is the label).
        #[arg(long)]
        dataset: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TEST_FRACTION)]
        test_fraction: f64,
    },
    /// Train and evaluate one configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run every combination listed under `grid.*` in the config.
    Grid {
        #[arg(long)]
        config: PathBuf,
        /// Parallel runs; defaults to the number of cores.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Rebuild summary tables from saved run records.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_for(kind: ErrorKind) -> ExitCode {
    match kind {
        ErrorKind::Usage => ExitCode::from(1),
        ErrorKind::Data => ExitCode::from(2),
        ErrorKind::Run => ExitCode::from(3),
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    exit_for(e.kind())
}

fn preprocess(dataset: &str, input: &Path, seed: u64, out: &Path, test_fraction: f64) -> Result<(), Error> {
    let kind: DatasetKind = dataset.parse()?;
    let (raw, vocab) = match kind {
        DatasetKind::Banksim => {
            let (t, v) = load_banksim_encoded(input)?;
            (t, Some(v))
        }
        DatasetKind::European => (load_european(input)?, None),
        DatasetKind::Custom => (load_labeled_csv(input)?, None),
    };
    let [neg, pos] = raw.class_counts();
    println!("loaded {} rows ({pos} positive, {neg} negative) from {}", raw.len(), input.display());
    let opts = PrepareOptions { seed, test_fraction, ..Default::default() };
    let set = prepare(raw, kind, vocab, &opts).map_err(|e| match e {
        Error::InvalidSpec(m) => Error::Config(m),
        other => other,
    })?;
    let hash = write_prepared(&set, out)?;
    println!(
        "prepared {} balanced rows: {} train / {} test, {} features",
        set.balanced_rows,
        set.train.len(),
        set.test.len(),
        set.train.n_features()
    );
    println!("wrote {} (manifest {hash})", out.display());
    Ok(())
}

fn run(config: &Path) -> Result<(), Error> {
    let cfg = ExperimentConfig::from_file(config)?;
    let rec = run_experiment(&cfg)?;
    write_reports(std::slice::from_ref(&rec), &cfg.output_dir)?;
    let m = &rec.test_metrics;
    println!(
        "{}: test accuracy {:.4} precision {:.4} recall {:.4} f1 {:.4} ({} evaluations, {:.1}s)",
        rec.run_id,
        m.accuracy,
        m.precision,
        m.recall,
        m.f1,
        rec.history.len(),
        rec.wall_seconds
    );
    Ok(())
}

fn grid(config: &Path, workers: Option<usize>) -> Result<ExitCode, Error> {
    let cfg = ExperimentConfig::from_file(config)?;
    if cfg.grid.is_empty() {
        eprintln!("warning: the grid has no combinations; nothing to run");
        return Ok(ExitCode::SUCCESS);
    }
    let workers = workers
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    println!("running {} configurations on {workers} workers", cfg.grid.len());
    let outcome = run_grid(&cfg, &cfg.grid, workers)?;
    for f in &outcome.failures {
        eprintln!("run {} failed: {}", f.run_id, f.message);
    }
    write_failures(&outcome.failures, &cfg.output_dir)?;
    if !outcome.records.is_empty() {
        write_reports(&outcome.records, &cfg.output_dir)?;
    }
    println!(
        "{} runs succeeded, {} failed; reports in {}",
        outcome.records.len(),
        outcome.failures.len(),
        cfg.output_dir.display()
    );
    Ok(grid_status(&outcome).map_or(ExitCode::SUCCESS, exit_for))
}

fn report(input: &Path, out: &Path) -> Result<(), Error> {
    let records = read_records(input)?;
    if records.is_empty() {
        return Err(Error::Data(format!("no run records found in {}", input.display())));
    }
    write_reports(&records, out)?;
    println!("wrote reports for {} runs to {}", records.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Preprocess { dataset, input, seed, out, test_fraction } => {
            preprocess(dataset, input, *seed, out, *test_fraction).map(|_| ExitCode::SUCCESS)
        }
        Command::Run { config } => run(config).map(|_| ExitCode::SUCCESS),
        Command::Grid { config, workers } => grid(config, *workers),
        Command::Report { input, out } => report(input, out).map(|_| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(fail)
}
