use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GridAxes};
use super::run::{load_run_data, run_id, run_on_tables, save_record, RunData, RunRecord};
use crate::dataprep::DatasetKind;
use crate::error::{Error, ErrorKind, Result};

/// One run of a grid that did not produce a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFailure {
    pub run_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct GridOutcome {
    pub records: Vec<RunRecord>,
    pub failures: Vec<GridFailure>,
}

/// Every combination in dataset, architecture, map, ansatz, seed order.
pub fn expand_grid(base: &ExperimentConfig, axes: &GridAxes) -> Vec<ExperimentConfig> {
    let mut out = Vec::with_capacity(axes.len());
    for &dataset in &axes.datasets {
        for &architecture in &axes.architectures {
            for &feature_map in &axes.feature_maps {
                for &ansatz in &axes.ansatze {
                    for &seed in &axes.seeds {
                        out.push(ExperimentConfig {
                            dataset,
                            architecture,
                            feature_map,
                            ansatz,
                            seed,
                            ..base.clone()
                        });
                    }
                }
            }
        }
    }
    out
}

/// Loads prepared data for every dataset in the grid and runs all combinations.
pub fn run_grid(base: &ExperimentConfig, axes: &GridAxes, workers: usize) -> Result<GridOutcome> {
    let configs = expand_grid(base, axes);
    let mut data: BTreeMap<DatasetKind, std::result::Result<RunData, String>> = BTreeMap::new();
    for cfg in &configs {
        data.entry(cfg.dataset)
            .or_insert_with(|| load_run_data(base, cfg.dataset).map_err(|e| e.to_string()));
    }
    run_configs(configs, &data, workers)
}

/// Runs the given configurations on up to `workers` threads. Failures are
/// collected rather than aborting the grid. Results come back in input order.
pub fn run_configs(
    configs: Vec<ExperimentConfig>,
    data: &BTreeMap<DatasetKind, std::result::Result<RunData, String>>,
    workers: usize,
) -> Result<GridOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let results: Vec<std::result::Result<RunRecord, GridFailure>> = pool.install(|| {
        configs
            .par_iter()
            .map(|cfg| {
                let fail = |message: String| GridFailure { run_id: run_id(cfg), message };
                let d = match data.get(&cfg.dataset) {
                    Some(Ok(d)) => d,
                    Some(Err(msg)) => return Err(fail(msg.clone())),
                    None => return Err(fail(format!("no data loaded for `{}`", cfg.dataset))),
                };
                let rec = run_on_tables(cfg, d).map_err(|e| fail(e.to_string()))?;
                save_record(&rec, &cfg.output_dir).map_err(|e| fail(e.to_string()))?;
                Ok(rec)
            })
            .collect()
    });
    let mut outcome = GridOutcome::default();
    for r in results {
        match r {
            Ok(rec) => outcome.records.push(rec),
            Err(f) => outcome.failures.push(f),
        }
    }
    Ok(outcome)
}

/// `errors.csv` with columns `run_id,message`; nothing is written when empty.
pub fn write_failures(failures: &[GridFailure], dir: &Path) -> Result<()> {
    if failures.is_empty() {
        return Ok(());
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = String::from("run_id,message\n");
    for f in failures {
        let msg = f.message.replace('"', "\"\"").replace('\n', " ");
        let _ = writeln!(out, "{},\"{msg}\"", f.run_id);
    }
    let path = dir.join("errors.csv");
    std::fs::write(&path, out).map_err(|e| Error::io(&path, e))
}

/// Exit category for a finished grid: success unless every run failed.
pub fn grid_status(outcome: &GridOutcome) -> Option<ErrorKind> {
    (outcome.records.is_empty() && !outcome.failures.is_empty()).then_some(ErrorKind::Run)
}
