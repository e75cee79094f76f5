//! Variational quantum classifiers for fraud detection, simulated on a dense
//! statevector.
//!
//! The crate is layered bottom-up: [`sim`] applies gates to amplitudes,
//! [`circuit`] holds symbolic circuits, [`featuremaps`] and [`ansatz`] build
//! them, [`models`] turns them into classifiers, [`optim`] trains them,
//! [`dataprep`] readies the datasets and [`harness`] runs experiment grids.

pub mod ansatz;
pub mod circuit;
pub mod dataprep;
pub mod error;
pub mod featuremaps;
pub mod harness;
pub mod models;
pub mod optim;
pub mod seed;
pub mod sim;

pub use ansatz::{AnsatzKind, AnsatzSpec};
pub use circuit::{Instruction, ParamCircuit, ParamExpr, Pauli};
pub use dataprep::{DataTable, DatasetKind};
pub use error::{Error, ErrorKind, Result};
pub use featuremaps::{Entanglement, FeatureMapKind, FeatureMapSpec};
pub use harness::{compute_metrics, ExperimentConfig, MetricSet, RunRecord};
pub use models::{Architecture, Model, ModelSpec, Prediction, Readout};
pub use optim::{cobyla_minimize, train, LossHistory, OptimizerConfig};
pub use seed::derive_seed;
pub use sim::{BasisDistribution, GateKind, GateOp, StateVector};
