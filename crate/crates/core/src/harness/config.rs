//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. Lists are comma separated.
//! Relative paths are resolved against the directory holding the file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzKind, AnsatzSpec};
use crate::dataprep::DatasetKind;
use crate::error::{Error, Result};
use crate::featuremaps::{Entanglement, FeatureMapKind, FeatureMapSpec, DEFAULT_PAULIS};
use crate::models::{Architecture, ModelSpec, Readout, DEFAULT_SHOTS};
use crate::optim::OptimizerConfig;

pub const DEFAULT_QUBITS: usize = 7;

/// The combinations a grid run expands to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxes {
    pub datasets: Vec<DatasetKind>,
    pub architectures: Vec<Architecture>,
    pub feature_maps: Vec<FeatureMapKind>,
    pub ansatze: Vec<AnsatzKind>,
    pub seeds: Vec<u64>,
}

impl GridAxes {
    pub fn len(&self) -> usize {
        self.datasets.len() * self.architectures.len() * self.feature_maps.len() * self.ansatze.len() * self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for GridAxes {
    fn default() -> Self {
        GridAxes {
            datasets: DatasetKind::PUBLIC.to_vec(),
            architectures: Architecture::ALL.to_vec(),
            feature_maps: FeatureMapKind::ALL.to_vec(),
            ansatze: AnsatzKind::ALL.to_vec(),
            seeds: vec![0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetKind,
    /// Prepared directory used when no `data.<dataset>` entry matches.
    pub data_dir: Option<PathBuf>,
    pub data_dirs: BTreeMap<DatasetKind, PathBuf>,
    pub output_dir: PathBuf,
    pub qubits: usize,
    pub seed: u64,
    pub architecture: Architecture,
    /// Shots for SQNN evaluation.
    pub shots: u64,
    /// Shots for SQNN training; 0 trains on exact probabilities.
    pub train_shots: u64,
    pub readout: Readout,
    pub feature_map: FeatureMapKind,
    pub feature_map_reps: usize,
    pub paulis: Vec<String>,
    pub feature_map_entanglement: Entanglement,
    pub ansatz: AnsatzKind,
    pub ansatz_reps: usize,
    pub ansatz_entanglement: Entanglement,
    /// Fixed axis draw for Pauli Two Design; derived from the run seed if unset.
    pub ansatz_seed: Option<u64>,
    pub max_evals: usize,
    pub rho_begin: f64,
    pub rho_end: f64,
    /// Fixed initial-point seed; derived from the run seed if unset.
    pub optimizer_seed: Option<u64>,
    pub grid: GridAxes,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let opt = OptimizerConfig::default();
        ExperimentConfig {
            dataset: DatasetKind::European,
            data_dir: None,
            data_dirs: BTreeMap::new(),
            output_dir: PathBuf::from("results"),
            qubits: DEFAULT_QUBITS,
            seed: 0,
            architecture: Architecture::Vqc,
            shots: DEFAULT_SHOTS,
            train_shots: 0,
            readout: Readout::Parity,
            feature_map: FeatureMapKind::Z,
            feature_map_reps: 1,
            paulis: DEFAULT_PAULIS.iter().map(|s| s.to_string()).collect(),
            feature_map_entanglement: Entanglement::Full,
            ansatz: AnsatzKind::RealAmplitudes,
            ansatz_reps: 1,
            ansatz_entanglement: Entanglement::Linear,
            ansatz_seed: None,
            max_evals: opt.max_evals,
            rho_begin: opt.rho_begin,
            rho_end: opt.rho_end,
            optimizer_seed: None,
            grid: GridAxes::default(),
        }
    }
}

fn parse_list<T: FromStr<Err = Error>>(v: &str) -> Result<Vec<T>> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(T::from_str).collect()
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse `{v}`")))
}

fn parse_seeds(key: &str, v: &str) -> Result<Vec<u64>> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_num(key, s)).collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", i + 1)));
            }
            cfg.set(key, value, base_dir)
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, strip_prefix(e))))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn set(&mut self, key: &str, v: &str, base: &Path) -> Result<()> {
        let path = |v: &str| {
            let p = PathBuf::from(v);
            if p.is_absolute() { p } else { base.join(p) }
        };
        match key {
            "dataset" => self.dataset = v.parse()?,
            "data.dir" => self.data_dir = Some(path(v)),
            "output.dir" => self.output_dir = path(v),
            "qubits" => self.qubits = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "model.architecture" => self.architecture = v.parse()?,
            "model.shots" => self.shots = parse_num(key, v)?,
            "model.train_shots" => self.train_shots = parse_num(key, v)?,
            "model.readout" => self.readout = v.parse()?,
            "feature_map.kind" => self.feature_map = v.parse()?,
            "feature_map.reps" => self.feature_map_reps = parse_num(key, v)?,
            "feature_map.paulis" => {
                self.paulis = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
            }
            "feature_map.entanglement" => self.feature_map_entanglement = v.parse()?,
            "ansatz.kind" => self.ansatz = v.parse()?,
            "ansatz.reps" => self.ansatz_reps = parse_num(key, v)?,
            "ansatz.entanglement" => self.ansatz_entanglement = v.parse()?,
            "ansatz.seed" => self.ansatz_seed = Some(parse_num(key, v)?),
            "optimizer.max_evals" => self.max_evals = parse_num(key, v)?,
            "optimizer.rho_begin" => self.rho_begin = parse_num(key, v)?,
            "optimizer.rho_end" => self.rho_end = parse_num(key, v)?,
            "optimizer.seed" => self.optimizer_seed = Some(parse_num(key, v)?),
            "optimizer.kind" => {
                if !v.eq_ignore_ascii_case("cobyla") {
                    return Err(Error::Config(format!("optimizer `{v}` is not available")));
                }
            }
            "grid.datasets" => self.grid.datasets = parse_list(v)?,
            "grid.architectures" => self.grid.architectures = parse_list(v)?,
            "grid.feature_maps" => self.grid.feature_maps = parse_list(v)?,
            "grid.ansatze" => self.grid.ansatze = parse_list(v)?,
            "grid.seeds" => self.grid.seeds = parse_seeds(key, v)?,
            other => match other.strip_prefix("data.") {
                Some(name) => {
                    let kind: DatasetKind = name.parse()?;
                    self.data_dirs.insert(kind, path(v));
                }
                None => return Err(Error::Config(format!("unknown key `{other}`"))),
            },
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits == 0 || self.qubits > crate::sim::MAX_QUBITS {
            return Err(Error::Config(format!("qubits must lie in 1..={}", crate::sim::MAX_QUBITS)));
        }
        if self.feature_map_reps == 0 || self.ansatz_reps == 0 {
            return Err(Error::Config("repetition counts must be at least 1".into()));
        }
        if self.architecture == Architecture::Sqnn && self.shots == 0 && self.train_shots > 0 {
            return Err(Error::Config("model.train_shots needs model.shots > 0".into()));
        }
        self.optimizer().validate().map_err(|e| Error::Config(strip_prefix(e)))
    }

    /// Optimizer settings with the given initial-point seed.
    pub fn optimizer_with_seed(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig { max_evals: self.max_evals, rho_begin: self.rho_begin, rho_end: self.rho_end, seed }
    }

    fn optimizer(&self) -> OptimizerConfig {
        self.optimizer_with_seed(self.optimizer_seed.unwrap_or(0))
    }

    pub fn data_dir_for(&self, dataset: DatasetKind) -> Option<&Path> {
        self.data_dirs.get(&dataset).or(self.data_dir.as_ref()).map(PathBuf::as_path)
    }

    pub fn model_spec(&self, ansatz_seed: u64) -> ModelSpec {
        let mut fm = FeatureMapSpec::new(self.feature_map, self.qubits);
        fm.reps = self.feature_map_reps;
        fm.paulis = self.paulis.clone();
        fm.entanglement = self.feature_map_entanglement;
        let mut an = AnsatzSpec::new(self.ansatz, self.qubits);
        an.reps = self.ansatz_reps;
        an.entanglement = self.ansatz_entanglement;
        an.seed = ansatz_seed;
        let mut spec = ModelSpec::new(self.architecture, fm, an);
        spec.readout = self.readout;
        if self.architecture == Architecture::Sqnn {
            spec.shots = self.shots;
        }
        spec
    }

    /// Canonical `key=value` listing of the single-run settings.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("dataset", self.dataset.to_string());
        kv("qubits", self.qubits.to_string());
        kv("seed", self.seed.to_string());
        kv("model.architecture", self.architecture.key().into());
        kv("model.shots", self.shots.to_string());
        kv("model.train_shots", self.train_shots.to_string());
        kv("model.readout", self.readout.key().into());
        kv("feature_map.kind", self.feature_map.key().into());
        kv("feature_map.reps", self.feature_map_reps.to_string());
        kv("feature_map.paulis", self.paulis.join(","));
        kv("feature_map.entanglement", self.feature_map_entanglement.key().into());
        kv("ansatz.kind", self.ansatz.key().into());
        kv("ansatz.reps", self.ansatz_reps.to_string());
        kv("ansatz.entanglement", self.ansatz_entanglement.key().into());
        if let Some(s) = self.ansatz_seed {
            kv("ansatz.seed", s.to_string());
        }
        kv("optimizer.max_evals", self.max_evals.to_string());
        kv("optimizer.rho_begin", self.rho_begin.to_string());
        kv("optimizer.rho_end", self.rho_end.to_string());
        if let Some(s) = self.optimizer_seed {
            kv("optimizer.seed", s.to_string());
        }
        out
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_settings() {
        let c = ExperimentConfig::parse("", Path::new(".")).unwrap();
        assert_eq!(c.qubits, 7);
        assert_eq!(c.max_evals, 350);
        assert_eq!((c.feature_map_reps, c.ansatz_reps), (1, 1));
        assert_eq!(c.grid.len(), 72);
    }

    #[test]
    fn parses_every_key() {
        let text = "
            # comment
            dataset = banksim
            data.banksim = prep/bs
            data.dir = prep/any
            output.dir = /tmp/out
            qubits = 4
            seed = 9
            model.architecture = sqnn
            model.shots = 2048
            model.train_shots = 256
            model.readout = qubit0
            feature_map.kind = Pauli
            feature_map.reps = 2
            feature_map.paulis = Z, XX
            feature_map.entanglement = linear
            ansatz.kind = Efficient SU2
            ansatz.reps = 2
            ansatz.entanglement = circular
            ansatz.seed = 5
            optimizer.kind = cobyla
            optimizer.max_evals = 100
            optimizer.rho_begin = 0.5
            optimizer.rho_end = 1e-3
            optimizer.seed = 3
            grid.datasets = european
            grid.architectures = vqc, eqnn
            grid.feature_maps = z
            grid.ansatze = two_local, pauli_two_design
            grid.seeds = 1,2,3
        ";
        let c = ExperimentConfig::parse(text, Path::new("/base")).unwrap();
        assert_eq!(c.dataset, DatasetKind::Banksim);
        assert_eq!(c.data_dir_for(DatasetKind::Banksim), Some(Path::new("/base/prep/bs")));
        assert_eq!(c.data_dir_for(DatasetKind::European), Some(Path::new("/base/prep/any")));
        assert_eq!(c.output_dir, PathBuf::from("/tmp/out"));
        assert_eq!((c.qubits, c.seed, c.shots, c.train_shots), (4, 9, 2048, 256));
        assert_eq!(c.readout, Readout::Qubit0);
        assert_eq!(c.paulis, vec!["Z".to_string(), "XX".to_string()]);
        assert_eq!(c.ansatz, AnsatzKind::EfficientSu2);
        assert_eq!(c.ansatz_entanglement, Entanglement::Circular);
        assert_eq!((c.ansatz_seed, c.optimizer_seed), (Some(5), Some(3)));
        assert_eq!((c.max_evals, c.rho_begin, c.rho_end), (100, 0.5, 1e-3));
        assert_eq!(c.grid.len(), 2 * 2 * 3);
        let spec = c.model_spec(5);
        assert_eq!(spec.shots, 2048);
        assert_eq!(spec.feature_map.reps, 2);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "qubits = 0",
            "nonsense = 1",
            "qubits = 3\nqubits = 4",
            "model.architecture = cnn",
            "no equals sign",
            "optimizer.rho_end = 5",
            "optimizer.kind = adam",
            "seed = -1",
        ] {
            let err = ExperimentConfig::parse(text, Path::new(".")).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{text}: {err:?}");
        }
    }

    #[test]
    fn empty_grid_list() {
        let c = ExperimentConfig::parse("grid.ansatze =", Path::new(".")).unwrap();
        assert!(c.grid.is_empty());
    }

    #[test]
    fn kv_round_trip() {
        let c = ExperimentConfig {
            ansatz: AnsatzKind::PauliTwoDesign,
            optimizer_seed: Some(4),
            ..ExperimentConfig::default()
        };
        let back = ExperimentConfig::parse(&c.to_kv_string(), Path::new(".")).unwrap();
        assert_eq!(back.to_kv_string(), c.to_kv_string());
    }
}
