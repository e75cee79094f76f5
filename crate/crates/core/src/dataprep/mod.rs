//! Dataset ingestion and preparation.
//!
//! Pipeline: clean → undersample → PCA (European only, fit on the balanced
//! set) → stratified split → min-max scaling fit on the training part.

mod load;
mod pca;
mod prepared;
mod sample;
mod scale;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use load::{load_banksim, load_banksim_encoded, load_european, load_labeled_csv, Vocabularies};
pub use pca::{pca_fit, pca_fit_transform, PcaState};
pub use prepared::{load_prepared, write_prepared, LoadedPrepared, PreparedSet, MANIFEST_FILE};
pub use sample::{split_train_test, undersample_balanced};
pub use scale::{minmax_apply, minmax_fit, ScalerState};

use crate::error::{Error, Result};
use crate::seed::derive_seed;

pub const DEFAULT_TEST_FRACTION: f64 = 0.2;
pub const DEFAULT_PCA_COMPONENTS: usize = 7;
pub const PIPELINE_ORDER: &str = "clean,undersample,pca(european),split,minmax(train)";

/// Numeric feature rows with a binary label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub column_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub label_column: String,
    /// Position of each row in the originally loaded table.
    pub row_ids: Vec<u64>,
}

impl DataTable {
    pub fn new(
        column_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<u8>,
        label_column: impl Into<String>,
    ) -> Result<Self> {
        let ids = (0..rows.len() as u64).collect();
        Self::with_row_ids(column_names, rows, labels, label_column, ids)
    }

    pub fn with_row_ids(
        column_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<u8>,
        label_column: impl Into<String>,
        row_ids: Vec<u64>,
    ) -> Result<Self> {
        if labels.len() != rows.len() {
            return Err(Error::LengthMismatch { expected: rows.len(), got: labels.len() });
        }
        if row_ids.len() != rows.len() {
            return Err(Error::LengthMismatch { expected: rows.len(), got: row_ids.len() });
        }
        let width = column_names.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Data(format!(
                    "row {i} has {} values, expected {width}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Data(format!("row {i} holds non-finite value {v}")));
            }
        }
        if let Some(&l) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::NonBinaryLabel(l as f64));
        }
        Ok(Self {
            column_names,
            rows,
            labels,
            label_column: label_column.into(),
            row_ids,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.column_names.len()
    }

    /// `[negatives, positives]`.
    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - pos, pos]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn select(&self, indices: &[usize]) -> DataTable {
        DataTable {
            column_names: self.column_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            label_column: self.label_column.clone(),
            row_ids: indices.iter().map(|&i| self.row_ids[i]).collect(),
        }
    }

    /// Header `row_id,<features>,<label>`, floats in shortest round-trip form.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("row_id");
        for c in &self.column_names {
            out.push(',');
            out.push_str(c);
        }
        out.push(',');
        out.push_str(&self.label_column);
        out.push('\n');
        for ((id, row), label) in self.row_ids.iter().zip(&self.rows).zip(&self.labels) {
            out.push_str(&id.to_string());
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push(',');
            out.push_str(&label.to_string());
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    /// Reads the format written by [`DataTable::write_csv`].
    pub fn read_csv(path: &Path) -> Result<DataTable> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| csv_error(path, e))?
            .iter()
            .map(str::to_string)
            .collect();
        if header.len() < 3 || header[0] != "row_id" {
            return Err(Error::Parse {
                path: path.into(),
                line: 1,
                msg: "expected header row_id,<features>,<label>".into(),
            });
        }
        let label_column = header.last().cloned().unwrap_or_default();
        let column_names = header[1..header.len() - 1].to_vec();
        let (mut rows, mut labels, mut ids) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |msg: String| Error::Parse { path: path.into(), line, msg };
            ids.push(rec[0].parse::<u64>().map_err(|e| bad(format!("row_id: {e}")))?);
            let mut row = Vec::with_capacity(column_names.len());
            for v in rec.iter().skip(1).take(column_names.len()) {
                row.push(v.parse::<f64>().map_err(|e| bad(format!("`{v}`: {e}")))?);
            }
            rows.push(row);
            labels.push(parse_label(&rec[rec.len() - 1]).map_err(bad)?);
        }
        DataTable::with_row_ids(column_names, rows, labels, label_column, ids)
    }
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse { path: path.into(), line, msg: e.to_string() }
}

pub(crate) fn parse_label(raw: &str) -> std::result::Result<u8, String> {
    let v: f64 = raw.trim().parse().map_err(|e| format!("label `{raw}`: {e}"))?;
    if v == 0.0 {
        Ok(0)
    } else if v == 1.0 {
        Ok(1)
    } else {
        Err(format!("label {v} is not binary"))
    }
}

/// Pearson correlation between every pair of columns, label included last.
pub fn pearson_correlations(table: &DataTable) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = (0..table.n_features()).map(|j| table.column(j)).collect();
    cols.push(table.labels.iter().map(|&l| l as f64).collect());
    let centred: Vec<(Vec<f64>, f64)> = cols
        .iter()
        .map(|c| {
            let m = c.iter().sum::<f64>() / c.len().max(1) as f64;
            let d: Vec<f64> = c.iter().map(|v| v - m).collect();
            let s = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            (d, s)
        })
        .collect();
    centred
        .iter()
        .map(|(a, sa)| {
            centred
                .iter()
                .map(|(b, sb)| {
                    if *sa == 0.0 || *sb == 0.0 {
                        0.0
                    } else {
                        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (sa * sb)
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Banksim,
    European,
    /// Any CSV whose last column is the label; no undersampling or PCA.
    Custom,
}

impl DatasetKind {
    pub const PUBLIC: [DatasetKind; 2] = [DatasetKind::Banksim, DatasetKind::European];

    pub fn key(self) -> &'static str {
        match self {
            DatasetKind::Banksim => "banksim",
            DatasetKind::European => "european",
            DatasetKind::Custom => "custom",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DatasetKind::Banksim => "BankSim",
            DatasetKind::European => "European",
            DatasetKind::Custom => "Custom",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "banksim" => Ok(DatasetKind::Banksim),
            "european" | "creditcard" => Ok(DatasetKind::European),
            "custom" => Ok(DatasetKind::Custom),
            other => Err(Error::Config(format!("unknown dataset `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepareOptions {
    pub seed: u64,
    pub test_fraction: f64,
    pub pca_components: usize,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            test_fraction: DEFAULT_TEST_FRACTION,
            pca_components: DEFAULT_PCA_COMPONENTS,
        }
    }
}

/// Runs the preparation pipeline on a freshly loaded table.
pub fn prepare(
    raw: DataTable,
    kind: DatasetKind,
    vocab: Option<Vocabularies>,
    opts: &PrepareOptions,
) -> Result<PreparedSet> {
    let [raw_neg, raw_pos] = raw.class_counts();
    let raw_rows = raw.len();
    let mut table = match kind {
        DatasetKind::Custom => raw,
        _ => undersample_balanced(&raw, derive_seed(opts.seed, &["undersample"]))?,
    };
    let pca = if kind == DatasetKind::European {
        let (t, state) = pca_fit_transform(&table, opts.pca_components)?;
        table = t;
        Some(state)
    } else {
        None
    };
    let balanced_rows = table.len();
    let (train, test) =
        split_train_test(&table, opts.test_fraction, derive_seed(opts.seed, &["split"]))?;
    let scaler = minmax_fit(&train)?;
    let train = minmax_apply(&scaler, &train)?;
    let test = minmax_apply(&scaler, &test)?;
    debug_assert!(raw_neg + raw_pos == raw_rows);
    Ok(PreparedSet {
        dataset: kind,
        seed: opts.seed,
        test_fraction: opts.test_fraction,
        raw_rows,
        raw_positives: raw_pos,
        balanced_rows,
        train,
        test,
        scaler,
        pca,
        vocab,
    })
}
