use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::metrics::{compute_metrics, MetricSet};
use crate::dataprep::{load_prepared, DataTable, DatasetKind};
use crate::error::{Error, Result};
use crate::models::{Architecture, Model};
use crate::optim::{train, LossHistory};
use crate::seed::derive_seed;

/// Every seed a run consumed, derived from the configured base seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedSeeds {
    pub base: u64,
    pub run: u64,
    pub init: u64,
    pub ansatz: u64,
    pub predict: u64,
}

impl ResolvedSeeds {
    /// `run = derive_seed(base, [dataset, architecture, feature map, ansatz])`,
    /// so a run's streams never depend on which other runs exist.
    pub fn resolve(cfg: &ExperimentConfig) -> Self {
        let run = derive_seed(
            cfg.seed,
            &[cfg.dataset.key(), cfg.architecture.key(), cfg.feature_map.key(), cfg.ansatz.key()],
        );
        ResolvedSeeds {
            base: cfg.seed,
            run,
            init: cfg.optimizer_seed.unwrap_or_else(|| derive_seed(run, &["init"])),
            ansatz: cfg.ansatz_seed.unwrap_or_else(|| derive_seed(run, &["ansatz"])),
            predict: derive_seed(run, &["predict"]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub config: ExperimentConfig,
    pub seeds: ResolvedSeeds,
    /// Manifest hash of the prepared data, when it came from disk.
    pub data_hash: Option<String>,
    pub train_rows: usize,
    pub test_rows: usize,
    pub params: Vec<f64>,
    pub final_loss: f64,
    pub history: LossHistory,
    pub train_metrics: MetricSet,
    pub test_metrics: MetricSet,
    pub wall_seconds: f64,
}

impl RunRecord {
    pub fn record_file(&self) -> String {
        format!("record_{}.json", self.run_id)
    }

    pub fn loss_file(&self) -> String {
        format!("loss_{}.csv", self.run_id)
    }

    /// The record with its timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> RunRecord {
        RunRecord { wall_seconds: 0.0, ..self.clone() }
    }
}

pub fn run_id(cfg: &ExperimentConfig) -> String {
    format!(
        "{}_{}_{}_{}_s{}",
        cfg.dataset.key(),
        cfg.architecture.key(),
        cfg.feature_map.key(),
        cfg.ansatz.key(),
        cfg.seed
    )
}

/// Train/test tables for a dataset plus the content hash they came with.
#[derive(Debug, Clone)]
pub struct RunData {
    pub train: DataTable,
    pub test: DataTable,
    pub hash: Option<String>,
}

pub fn load_run_data(cfg: &ExperimentConfig, dataset: DatasetKind) -> Result<RunData> {
    let dir = cfg.data_dir_for(dataset).ok_or_else(|| {
        Error::Data(format!("no prepared data configured for `{dataset}` (set data.{dataset} or data.dir)"))
    })?;
    let p = load_prepared(dir)?;
    if let Some(found) = p.dataset {
        if found != dataset && found != DatasetKind::Custom {
            return Err(Error::Data(format!(
                "{} holds `{found}` data, expected `{dataset}`",
                dir.display()
            )));
        }
    }
    Ok(RunData { train: p.train, test: p.test, hash: Some(p.content_hash) })
}

/// Loads the prepared data, runs, and persists the record into the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let data = load_run_data(cfg, cfg.dataset)?;
    let record = run_on_tables(cfg, &data)?;
    save_record(&record, &cfg.output_dir)?;
    Ok(record)
}

pub fn run_on_tables(cfg: &ExperimentConfig, data: &RunData) -> Result<RunRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let (train_t, test_t) = (&data.train, &data.test);
    if train_t.is_empty() || test_t.is_empty() {
        return Err(Error::Data("train and test tables must both be nonempty".into()));
    }
    for t in [train_t, test_t] {
        if t.n_features() != cfg.qubits {
            return Err(Error::Config(format!(
                "qubits = {} but the prepared data has {} features",
                cfg.qubits,
                t.n_features()
            )));
        }
    }
    let train_ids: HashSet<u64> = train_t.row_ids.iter().copied().collect();
    if test_t.row_ids.iter().any(|id| train_ids.contains(id)) {
        return Err(Error::Data("test rows overlap the training rows".into()));
    }

    let seeds = ResolvedSeeds::resolve(cfg);
    let model = Model::new(cfg.model_spec(seeds.ansatz))?;
    let train_model = match cfg.architecture {
        Architecture::Sqnn => model.with_shots(cfg.train_shots),
        _ => model.clone(),
    };
    let outcome = train(&train_model, train_t, &cfg.optimizer_with_seed(seeds.init))?;

    let score = |t: &DataTable, tag: &str| -> Result<MetricSet> {
        let preds = model.predict_batch(&outcome.params, &t.rows, derive_seed(seeds.predict, &[tag]))?;
        let labels: Vec<u8> = preds.iter().map(|p| p.label).collect();
        compute_metrics(&t.labels, &labels)
    };
    let train_metrics = score(train_t, "train")?;
    let test_metrics = score(test_t, "test")?;
    Ok(RunRecord {
        run_id: run_id(cfg),
        config: cfg.clone(),
        seeds,
        data_hash: data.hash.clone(),
        train_rows: train_t.len(),
        test_rows: test_t.len(),
        params: outcome.params,
        final_loss: outcome.loss,
        history: outcome.history,
        train_metrics,
        test_metrics,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Writes `record_<id>.json` and `loss_<id>.csv`.
pub fn save_record(record: &RunRecord, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(record.record_file());
    let json = serde_json::to_string_pretty(record)?;
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    record.history.write_csv(&dir.join(record.loss_file()))?;
    Ok(path)
}

/// Reads every `record_*.json` under `dir`, sorted by file name.
pub fn read_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("record_") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: {e}", p.display())))
        })
        .collect()
}
