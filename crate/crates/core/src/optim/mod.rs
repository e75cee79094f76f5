//! Derivative-free training.

mod cobyla;

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use cobyla::cobyla_minimize;

use crate::dataprep::DataTable;
use crate::error::{Error, Result};
use crate::models::{binary_cross_entropy, Architecture, Model};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Budget in objective evaluations.
    pub max_evals: usize,
    pub rho_begin: f64,
    pub rho_end: f64,
    /// Seeds the initial parameter draw.
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_evals: 350,
            rho_begin: 1.0,
            rho_end: 1e-4,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_evals == 0 {
            return Err(Error::Optimizer("max_evals must be at least 1".into()));
        }
        if !(self.rho_end > 0.0 && self.rho_end < self.rho_begin && self.rho_begin.is_finite()) {
            return Err(Error::Optimizer(format!(
                "need 0 < rho_end < rho_begin, got rho_end={} rho_begin={}",
                self.rho_end, self.rho_begin
            )));
        }
        Ok(())
    }
}

/// Objective values in evaluation order, indexed from 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LossHistory {
    pub entries: Vec<(usize, f64)>,
}

impl LossHistory {
    pub fn push(&mut self, loss: f64) {
        let idx = self.entries.len() + 1;
        self.entries.push((idx, loss));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn losses(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|&(_, l)| l)
    }

    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.losses()
            .map(|l| {
                best = best.min(l);
                best
            })
            .collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("eval,loss\n");
        for (i, l) in &self.entries {
            let _ = writeln!(out, "{i},{l}");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub history: LossHistory,
}

/// A minimiser usable by [`train_with`].
pub trait Optimizer {
    fn minimize(&self, objective: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64]) -> Result<Minimum>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Cobyla {
    pub config: OptimizerConfig,
}

impl Optimizer for Cobyla {
    fn minimize(&self, objective: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64]) -> Result<Minimum> {
        cobyla_minimize(objective, x0, &self.config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub initial: Vec<f64>,
    pub params: Vec<f64>,
    pub loss: f64,
    pub history: LossHistory,
}

/// θ uniform in [0,1]; the EQNN head uniform in [−0.5,0.5].
pub fn initial_params(model: &Model, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: Vec<f64> = (0..model.n_theta()).map(|_| rng.gen_range(0.0..=1.0)).collect();
    if model.spec().architecture == Architecture::Eqnn {
        let head = model.num_params() - model.n_theta();
        params.extend((0..head).map(|_| rng.gen_range(-0.5..=0.5)));
    }
    params
}

/// Full-batch cross-entropy on `table` for the given parameters.
pub fn dataset_loss(model: &Model, params: &[f64], table: &DataTable, seed: u64) -> Result<f64> {
    let preds = model.predict_batch(params, &table.rows, seed)?;
    let p1: Vec<f64> = preds.iter().map(|p| p.p1).collect();
    binary_cross_entropy(&p1, &table.labels)
}

pub fn train(model: &Model, table: &DataTable, cfg: &OptimizerConfig) -> Result<TrainOutcome> {
    train_with(model, table, &Cobyla { config: *cfg }, cfg.seed)
}

pub fn train_with(
    model: &Model,
    table: &DataTable,
    optimizer: &dyn Optimizer,
    seed: u64,
) -> Result<TrainOutcome> {
    if table.is_empty() {
        return Err(Error::Empty("training table"));
    }
    if table.n_features() != model.n_features() {
        return Err(Error::InvalidSpec(format!(
            "training table has {} features but the model expects {}",
            table.n_features(),
            model.n_features()
        )));
    }
    let initial = initial_params(model, seed);
    let mut evals = 0u64;
    let mut objective = |params: &[f64]| {
        evals += 1;
        let s = derive_seed(seed, &["train", &evals.to_string()]);
        dataset_loss(model, params, table, s).unwrap_or(f64::NAN)
    };
    let min = optimizer.minimize(&mut objective, &initial)?;
    Ok(TrainOutcome {
        initial,
        params: min.x,
        loss: min.f,
        history: min.history,
    })
}
