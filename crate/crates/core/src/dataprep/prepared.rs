//! On-disk cache of a prepared dataset, guarded by a hash manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{DataTable, DatasetKind, PcaState, ScalerState, Vocabularies, PIPELINE_ORDER};
use crate::error::{Error, Result};
use crate::seed::content_hash;

pub const MANIFEST_FILE: &str = "manifest.txt";
const TRAIN_FILE: &str = "train.csv";
const TEST_FILE: &str = "test.csv";
const METADATA_FILE: &str = "metadata.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedSet {
    pub dataset: DatasetKind,
    pub seed: u64,
    pub test_fraction: f64,
    pub raw_rows: usize,
    pub raw_positives: usize,
    pub balanced_rows: usize,
    pub train: DataTable,
    pub test: DataTable,
    pub scaler: ScalerState,
    pub pca: Option<PcaState>,
    pub vocab: Option<Vocabularies>,
}

impl PreparedSet {
    fn metadata(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dataset={}", self.dataset);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "test_fraction={}", self.test_fraction);
        let _ = writeln!(out, "pipeline={PIPELINE_ORDER}");
        let _ = writeln!(out, "raw_rows={}", self.raw_rows);
        let _ = writeln!(out, "raw_positives={}", self.raw_positives);
        let _ = writeln!(out, "balanced_rows={}", self.balanced_rows);
        let _ = writeln!(out, "train_rows={}", self.train.len());
        let _ = writeln!(out, "test_rows={}", self.test.len());
        let _ = writeln!(out, "features={}", self.train.column_names.join(" "));
        out
    }
}

fn write_file(dir: &Path, name: &str, body: &str, manifest: &mut BTreeMap<String, String>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    manifest.insert(name.to_string(), content_hash(body.as_bytes()));
    Ok(())
}

fn manifest_text(manifest: &BTreeMap<String, String>) -> String {
    manifest.iter().map(|(f, h)| format!("{h}  {f}\n")).collect()
}

/// Writes tables, fitted state, encoding sidecars and the manifest. Returns the
/// hash of the manifest, which identifies the prepared content.
pub fn write_prepared(set: &PreparedSet, dir: &Path) -> Result<String> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = BTreeMap::new();
    write_file(dir, TRAIN_FILE, &set.train.to_csv_string(), &mut manifest)?;
    write_file(dir, TEST_FILE, &set.test.to_csv_string(), &mut manifest)?;
    write_file(dir, "scaler.txt", &set.scaler.to_kv_string(), &mut manifest)?;
    if let Some(pca) = &set.pca {
        write_file(dir, "pca.txt", &pca.to_kv_string(), &mut manifest)?;
    }
    if let Some(vocab) = &set.vocab {
        for (column, codes) in vocab {
            let mut body = String::from("raw_value,code\n");
            let mut pairs: Vec<(&String, &u32)> = codes.iter().collect();
            pairs.sort_by_key(|&(raw, code)| (*code, raw.clone()));
            for (raw, code) in pairs {
                let _ = writeln!(body, "{},{code}", csv_field(raw));
            }
            write_file(dir, &format!("mapping_{column}.csv"), &body, &mut manifest)?;
        }
    }
    write_file(dir, METADATA_FILE, &set.metadata(), &mut manifest)?;
    let text = manifest_text(&manifest);
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, &text).map_err(|e| Error::io(&path, e))?;
    Ok(content_hash(text.as_bytes()))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedPrepared {
    pub dataset: Option<DatasetKind>,
    pub train: DataTable,
    pub test: DataTable,
    pub metadata: BTreeMap<String, String>,
    pub content_hash: String,
}

/// Loads a prepared directory after checking every file against the manifest.
pub fn load_prepared(dir: &Path) -> Result<LoadedPrepared> {
    let mpath = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
    let mut listed = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let (hash, file) = line.split_once("  ").ok_or_else(|| Error::Parse {
            path: mpath.clone(),
            line: i as u64 + 1,
            msg: "expected `<hash>  <file>`".into(),
        })?;
        let path = dir.join(file);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if content_hash(&bytes) != hash {
            return Err(Error::Data(format!("{} does not match its manifest hash", path.display())));
        }
        listed.push(file.to_string());
    }
    for required in [TRAIN_FILE, TEST_FILE] {
        if !listed.iter().any(|f| f == required) {
            return Err(Error::Data(format!("{} lists no {required}", mpath.display())));
        }
    }
    let metadata: BTreeMap<String, String> = match std::fs::read_to_string(dir.join(METADATA_FILE)) {
        Ok(s) => s
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        Err(_) => BTreeMap::new(),
    };
    let dataset = metadata.get("dataset").and_then(|d| d.parse().ok());
    Ok(LoadedPrepared {
        dataset,
        train: DataTable::read_csv(&dir.join(TRAIN_FILE))?,
        test: DataTable::read_csv(&dir.join(TEST_FILE))?,
        metadata,
        content_hash: content_hash(text.as_bytes()),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{prepare, PrepareOptions};
    use super::*;

    fn raw() -> DataTable {
        let rows: Vec<Vec<f64>> = (0..60).map(|i| vec![i as f64, (i * i % 7) as f64]).collect();
        let labels = (0..60).map(|i| u8::from(i % 5 == 0)).collect();
        DataTable::new(vec!["a".into(), "b".into()], rows, labels, "fraud").unwrap()
    }

    #[test]
    fn write_load_and_tamper() {
        let opts = PrepareOptions { seed: 4, ..Default::default() };
        let set = prepare(raw(), DatasetKind::Banksim, None, &opts).unwrap();
        assert_eq!(set.balanced_rows, 24);
        let dir = tempfile::tempdir().unwrap();
        let h1 = write_prepared(&set, dir.path()).unwrap();
        let loaded = load_prepared(dir.path()).unwrap();
        assert_eq!(loaded.train, set.train);
        assert_eq!(loaded.test, set.test);
        assert_eq!(loaded.dataset, Some(DatasetKind::Banksim));
        assert_eq!(loaded.content_hash, h1);

        let again = prepare(raw(), DatasetKind::Banksim, None, &opts).unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        assert_eq!(write_prepared(&again, dir2.path()).unwrap(), h1);

        std::fs::write(dir.path().join("train.csv"), "row_id,a,b,fraud\n").unwrap();
        assert!(matches!(load_prepared(dir.path()), Err(Error::Data(_))));
    }

    #[test]
    fn scaler_fit_on_train_only() {
        let set = prepare(raw(), DatasetKind::Banksim, None, &PrepareOptions::default()).unwrap();
        for j in 0..2 {
            let train_raw: Vec<f64> = set
                .train
                .row_ids
                .iter()
                .map(|&id| raw().rows[id as usize][j])
                .collect();
            let lo = train_raw.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = train_raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!((set.scaler.mins[j], set.scaler.maxs[j]), (lo, hi));
        }
        assert!(set.test.rows.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }
}
