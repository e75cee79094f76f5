//! Classifier forward passes.
//!
//! All three architectures share the circuit `feature_map(x) ∘ ansatz(θ)`; they
//! differ in how the final state becomes a class-1 probability:
//!
//! * VQC reads the exact basis distribution through a [`Readout`].
//! * SQNN does the same on an empirical distribution built from `shots`
//!   samples (exact when `shots == 0`).
//! * EQNN feeds the per-qubit `⟨Z⟩` vector into `sigmoid(W·z + b)`.
//!
//! Flat parameter layout: `[θ | W | b]`, the last two only for EQNN.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::circuit::ParamCircuit;
use crate::error::{Error, Result};
use crate::featuremaps::FeatureMapSpec;
use crate::seed::derive_seed;
use crate::sim::{BasisDistribution, StateVector};

pub const DEFAULT_SHOTS: u64 = 1024;

const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    Vqc,
    Sqnn,
    Eqnn,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::Vqc, Architecture::Sqnn, Architecture::Eqnn];

    pub fn key(self) -> &'static str {
        match self {
            Architecture::Vqc => "vqc",
            Architecture::Sqnn => "sqnn",
            Architecture::Eqnn => "eqnn",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Architecture::Vqc => "VQC",
            Architecture::Sqnn => "SQNN",
            Architecture::Eqnn => "EQNN",
        }
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vqc" => Ok(Architecture::Vqc),
            "sqnn" => Ok(Architecture::Sqnn),
            "eqnn" => Ok(Architecture::Eqnn),
            other => Err(Error::Config(format!("unknown architecture `{other}`"))),
        }
    }
}

/// How a basis distribution is mapped to a class-1 probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// Total probability of odd-popcount basis states.
    Parity,
    /// Probability that qubit 0 reads `|1⟩`.
    Qubit0,
}

impl Readout {
    pub fn key(self) -> &'static str {
        match self {
            Readout::Parity => "parity",
            Readout::Qubit0 => "qubit0",
        }
    }
}

impl FromStr for Readout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "parity" => Ok(Readout::Parity),
            "qubit0" => Ok(Readout::Qubit0),
            other => Err(Error::Config(format!("unknown readout `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub architecture: Architecture,
    pub feature_map: FeatureMapSpec,
    pub ansatz: AnsatzSpec,
    /// SQNN sample count; 0 means exact probabilities.
    pub shots: u64,
    pub readout: Readout,
}

impl ModelSpec {
    pub fn new(architecture: Architecture, feature_map: FeatureMapSpec, ansatz: AnsatzSpec) -> Self {
        ModelSpec {
            architecture,
            feature_map,
            ansatz,
            shots: if architecture == Architecture::Sqnn { DEFAULT_SHOTS } else { 0 },
            readout: Readout::Parity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub p1: f64,
    pub label: u8,
}

impl Prediction {
    pub fn from_p1(p1: f64) -> Self {
        Prediction {
            p1,
            label: u8::from(p1 >= 0.5),
        }
    }
}

/// `(p0, p1)` where `p1` sums the odd-parity outcomes.
pub fn parity_interpret(dist: &BasisDistribution) -> (f64, f64) {
    let p1: f64 = dist
        .probabilities()
        .iter()
        .enumerate()
        .filter(|(i, _)| i.count_ones() % 2 == 1)
        .map(|(_, p)| p)
        .sum();
    (1.0 - p1, p1)
}

pub fn readout_p1(dist: &BasisDistribution, readout: Readout) -> f64 {
    match readout {
        Readout::Parity => parity_interpret(dist).1,
        Readout::Qubit0 => dist
            .probabilities()
            .iter()
            .enumerate()
            .filter(|(i, _)| i & 1 == 1)
            .map(|(_, p)| p)
            .sum(),
    }
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Mean binary cross-entropy with probabilities clamped to `[1e-12, 1 − 1e-12]`.
pub fn binary_cross_entropy(p1: &[f64], labels: &[u8]) -> Result<f64> {
    if p1.is_empty() {
        return Err(Error::Empty("predictions"));
    }
    if p1.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: p1.len(),
            got: labels.len(),
        });
    }
    let mut total = 0.0;
    for (&p, &y) in p1.iter().zip(labels) {
        let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        total -= match y {
            1 => p.ln(),
            0 => (1.0 - p).ln(),
            other => return Err(Error::NonBinaryLabel(f64::from(other))),
        };
    }
    Ok(total / p1.len() as f64)
}

/// A built classifier: the composed circuit plus its spec.
#[derive(Debug, Clone)]
pub struct Model {
    spec: ModelSpec,
    circuit: ParamCircuit,
    n_theta: usize,
}

impl Model {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        if spec.feature_map.n_features != spec.ansatz.n_qubits {
            return Err(Error::InvalidSpec(format!(
                "feature map has {} features but ansatz has {} qubits",
                spec.feature_map.n_features, spec.ansatz.n_qubits
            )));
        }
        let encoder = spec.feature_map.build()?;
        let ansatz = spec.ansatz.build()?;
        let n_theta = ansatz.num_parameters();
        let circuit = encoder.compose(&ansatz)?;
        Ok(Model {
            spec,
            circuit,
            n_theta,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn circuit(&self) -> &ParamCircuit {
        &self.circuit
    }

    pub fn n_features(&self) -> usize {
        self.spec.feature_map.n_features
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Length of the flat parameter vector.
    pub fn num_params(&self) -> usize {
        match self.spec.architecture {
            Architecture::Eqnn => self.n_theta + self.n_features() + 1,
            _ => self.n_theta,
        }
    }

    /// Same model with a different SQNN shot count.
    pub fn with_shots(&self, shots: u64) -> Model {
        let mut m = self.clone();
        m.spec.shots = shots;
        m
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return Err(Error::LengthMismatch {
                expected: self.num_params(),
                got: params.len(),
            });
        }
        Ok(())
    }

    /// Final state for input `x` and ansatz angles `theta`.
    pub fn state(&self, theta: &[f64], x: &[f64]) -> Result<StateVector> {
        if x.len() != self.n_features() {
            return Err(Error::LengthMismatch {
                expected: self.n_features(),
                got: x.len(),
            });
        }
        if theta.len() != self.n_theta {
            return Err(Error::LengthMismatch {
                expected: self.n_theta,
                got: theta.len(),
            });
        }
        let mut values = Vec::with_capacity(x.len() + theta.len());
        values.extend_from_slice(x);
        values.extend_from_slice(theta);
        self.circuit.simulate_with(&values)
    }

    fn expect_arch(&self, arch: Architecture) -> Result<()> {
        if self.spec.architecture != arch {
            return Err(Error::InvalidSpec(format!(
                "{} forward called on a {} model",
                arch.label(),
                self.spec.architecture.label()
            )));
        }
        Ok(())
    }

    /// Dispatch on the architecture. `seed` is only read by SQNN in shot mode.
    pub fn forward(&self, params: &[f64], x: &[f64], seed: u64) -> Result<Prediction> {
        match self.spec.architecture {
            Architecture::Vqc => self.vqc_forward(params, x),
            Architecture::Sqnn => self.sqnn_forward(params, x, seed),
            Architecture::Eqnn => self.eqnn_forward(params, x),
        }
    }

    pub fn vqc_forward(&self, params: &[f64], x: &[f64]) -> Result<Prediction> {
        self.expect_arch(Architecture::Vqc)?;
        self.check_params(params)?;
        let dist = self.state(params, x)?.probabilities();
        Ok(Prediction::from_p1(readout_p1(&dist, self.spec.readout)))
    }

    pub fn sqnn_forward(&self, params: &[f64], x: &[f64], seed: u64) -> Result<Prediction> {
        self.expect_arch(Architecture::Sqnn)?;
        self.check_params(params)?;
        let exact = self.state(params, x)?.probabilities();
        let dist = if self.spec.shots == 0 {
            exact
        } else {
            let counts = exact.sample_counts(self.spec.shots, seed)?;
            BasisDistribution::from_counts(exact.n_qubits(), &counts)?
        };
        Ok(Prediction::from_p1(readout_p1(&dist, self.spec.readout)))
    }

    pub fn eqnn_forward(&self, params: &[f64], x: &[f64]) -> Result<Prediction> {
        self.expect_arch(Architecture::Eqnn)?;
        self.check_params(params)?;
        let (theta, head) = params.split_at(self.n_theta);
        let (w, b) = head.split_at(self.n_features());
        let z = self.state(theta, x)?.expectation_z_each();
        let logit: f64 = w.iter().zip(&z).map(|(w, z)| w * z).sum::<f64>() + b[0];
        Ok(Prediction::from_p1(sigmoid(logit)))
    }

    /// Forward pass over many rows in parallel. Row `i` samples with
    /// `derive_seed(seed, [i])`, so results do not depend on scheduling.
    pub fn predict_batch(&self, params: &[f64], rows: &[Vec<f64>], seed: u64) -> Result<Vec<Prediction>> {
        self.check_params(params)?;
        rows.par_iter()
            .enumerate()
            .map(|(i, x)| {
                let s = if self.spec.architecture == Architecture::Sqnn && self.spec.shots > 0 {
                    derive_seed(seed, &[&i.to_string()])
                } else {
                    seed
                };
                self.forward(params, x, s)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::AnsatzKind;
    use crate::featuremaps::FeatureMapKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(arch: Architecture, fm: FeatureMapKind, an: AnsatzKind, n: usize) -> Model {
        Model::new(ModelSpec::new(
            arch,
            FeatureMapSpec::new(fm, n),
            AnsatzSpec::new(an, n),
        ))
        .unwrap()
    }

    fn random_vec(k: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec<f64> {
        (0..k).map(|_| rng.gen_range(lo..hi)).collect()
    }

    #[test]
    fn parity_of_simple_distributions() {
        let uniform = BasisDistribution::new(vec![0.25; 4]).unwrap();
        assert_eq!(parity_interpret(&uniform), (0.5, 0.5));
        let odd = BasisDistribution::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(parity_interpret(&odd), (0.0, 1.0));
    }

    #[test]
    fn parity_matches_popcount_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = random_vec(8, 0.0, 1.0, &mut rng);
        let t: f64 = w.iter().sum();
        let d = BasisDistribution::new(w.iter().map(|v| v / t).collect()).unwrap();
        let mut odd = 0.0;
        for (i, p) in d.probabilities().iter().enumerate() {
            let bits = (i & 1) + (i >> 1 & 1) + (i >> 2 & 1);
            if bits % 2 == 1 {
                odd += p;
            }
        }
        let (p0, p1) = parity_interpret(&d);
        assert!((p1 - odd).abs() < 1e-15);
        assert!((p0 + p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vqc_trivial_composition() {
        let m = model(Architecture::Vqc, FeatureMapKind::Z, AnsatzKind::TwoLocal, 2);
        let p = m.vqc_forward(&vec![0.0; m.num_params()], &[0.0, 0.0]).unwrap();
        assert!((p.p1 - 0.5).abs() < 1e-12);
        assert_eq!(p.label, 1);
    }

    #[test]
    fn vqc_matches_hand_composed_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = model(Architecture::Vqc, FeatureMapKind::Zz, AnsatzKind::EfficientSu2, 2);
        let theta = random_vec(m.num_params(), 0.0, 1.0, &mut rng);
        let x = random_vec(2, 0.0, 1.0, &mut rng);

        let fm = FeatureMapSpec::new(FeatureMapKind::Zz, 2).build().unwrap();
        let an = AnsatzSpec::new(AnsatzKind::EfficientSu2, 2).build().unwrap();
        let mut s = fm.bind_values(&x).unwrap().simulate().unwrap();
        for op in an.bind_values(&theta).unwrap().ops() {
            match op {
                crate::circuit::Instruction::Gate(g) => s.apply_gate(g).unwrap(),
                _ => unreachable!(),
            }
        }
        let odd: f64 = s.amplitudes()[1].norm_sqr() + s.amplitudes()[2].norm_sqr();
        let p = m.vqc_forward(&theta, &x).unwrap();
        assert!((p.p1 - odd).abs() < 1e-12);
        assert_eq!(p, m.vqc_forward(&theta, &x).unwrap());
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let m = model(Architecture::Vqc, FeatureMapKind::Z, AnsatzKind::RealAmplitudes, 2);
        assert!(matches!(
            m.vqc_forward(&[0.0; 3], &[0.0, 0.0]),
            Err(Error::LengthMismatch { expected: 4, got: 3 })
        ));
        let e = model(Architecture::Eqnn, FeatureMapKind::Z, AnsatzKind::RealAmplitudes, 2);
        assert_eq!(e.num_params(), 4 + 3);
        assert!(e.eqnn_forward(&[0.0; 4], &[0.0, 0.0]).is_err());
        assert!(e.vqc_forward(&[0.0; 7], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn sqnn_exact_mode_equals_vqc() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for trial in 0..50 {
            let fm = FeatureMapKind::ALL[trial % 3];
            let an = AnsatzKind::ALL[trial % 4];
            let n = 2 + trial % 2;
            let v = model(Architecture::Vqc, fm, an, n);
            let s = model(Architecture::Sqnn, fm, an, n).with_shots(0);
            let theta = random_vec(v.num_params(), 0.0, 1.0, &mut rng);
            let x = random_vec(n, 0.0, 1.0, &mut rng);
            let a = v.vqc_forward(&theta, &x).unwrap();
            let b = s.sqnn_forward(&theta, &x, trial as u64).unwrap();
            assert_eq!(a.p1.to_bits(), b.p1.to_bits());
        }
    }

    #[test]
    fn sqnn_degenerate_sampling() {
        let m = model(Architecture::Sqnn, FeatureMapKind::Z, AnsatzKind::RealAmplitudes, 1).with_shots(4096);
        // Z map at x = 0 is H|0⟩ = |+⟩; RY(θ0)·RY(θ1) with θ0+θ1 = π/2 maps |+⟩ to |1⟩.
        let params = [std::f64::consts::FRAC_PI_2, 0.0];
        let exact = m.with_shots(0).sqnn_forward(&params, &[0.0], 0).unwrap();
        assert!((exact.p1 - 1.0).abs() < 1e-12);
        let p = m.sqnn_forward(&params, &[0.0], 17).unwrap();
        assert_eq!(p.p1, 1.0);
    }

    #[test]
    fn sqnn_shot_noise_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let m = model(Architecture::Sqnn, FeatureMapKind::Zz, AnsatzKind::RealAmplitudes, 2).with_shots(100_000);
        let theta = random_vec(m.num_params(), 0.0, 1.0, &mut rng);
        let x = random_vec(2, 0.0, 1.0, &mut rng);
        let exact = m.with_shots(0).sqnn_forward(&theta, &x, 0).unwrap();
        let noisy = m.sqnn_forward(&theta, &x, 5).unwrap();
        assert!((exact.p1 - noisy.p1).abs() <= 0.02);
    }

    #[test]
    fn eqnn_head_cases() {
        let m = model(Architecture::Eqnn, FeatureMapKind::Z, AnsatzKind::RealAmplitudes, 2);
        let p = m.eqnn_forward(&vec![0.0; m.num_params()], &[0.0, 0.0]).unwrap();
        assert_eq!(p.p1, 0.5);

        // With no feature map, θ = 0 leaves |00⟩ and z = (1, 1).
        let c = 1.7;
        let mut params = vec![0.0; m.num_params()];
        params[m.n_theta() + 1] = c;
        let theta = &params[..m.n_theta()];
        let z = AnsatzSpec::new(AnsatzKind::RealAmplitudes, 2)
            .build()
            .unwrap()
            .simulate_with(theta)
            .unwrap()
            .expectation_z_each();
        assert_eq!(z, vec![1.0, 1.0]);
        assert!((sigmoid(c * z[1]) - sigmoid(c)).abs() < 1e-15);
    }

    #[test]
    fn eqnn_matches_bruteforce_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let m = model(Architecture::Eqnn, FeatureMapKind::Pauli, AnsatzKind::TwoLocal, 2);
        let params = random_vec(m.num_params(), -1.0, 1.0, &mut rng);
        let x = random_vec(2, 0.0, 1.0, &mut rng);
        let probs = m.state(&params[..m.n_theta()], &x).unwrap().probabilities();
        let mut logit = params[m.num_params() - 1];
        for q in 0..2 {
            let zq: f64 = probs
                .probabilities()
                .iter()
                .enumerate()
                .map(|(i, p)| if i >> q & 1 == 0 { *p } else { -*p })
                .sum();
            logit += params[m.n_theta() + q] * zq;
        }
        let want = 1.0 / (1.0 + (-logit).exp());
        assert!((m.eqnn_forward(&params, &x).unwrap().p1 - want).abs() < 1e-12);
    }

    #[test]
    fn eqnn_parameter_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let m = model(Architecture::Eqnn, FeatureMapKind::Z, AnsatzKind::EfficientSu2, 3);
        let params = random_vec(m.num_params(), -1.0, 1.0, &mut rng);
        let x = random_vec(3, 0.0, 1.0, &mut rng);
        let mut head_moved = params.clone();
        for v in &mut head_moved[m.n_theta()..] {
            *v += 0.3;
        }
        assert_eq!(
            m.state(&params[..m.n_theta()], &x).unwrap(),
            m.state(&head_moved[..m.n_theta()], &x).unwrap()
        );
        assert_ne!(
            m.eqnn_forward(&params, &x).unwrap(),
            m.eqnn_forward(&head_moved, &x).unwrap()
        );
    }

    #[test]
    fn bce_values() {
        assert!((binary_cross_entropy(&[0.5], &[1]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(binary_cross_entropy(&[1.0 - 1e-12], &[1]).unwrap() < 1e-11);
        let p = [0.9, 0.2, 0.6, 0.35];
        let y = [1, 0, 0, 1];
        let hand = (-(0.9f64.ln()) - (0.8f64.ln()) - (0.4f64.ln()) - (0.35f64.ln())) / 4.0;
        assert!((binary_cross_entropy(&p, &y).unwrap() - hand).abs() < 1e-12);
        let (rp, ry) = ([0.35, 0.6, 0.9, 0.2], [1, 0, 1, 0]);
        assert!((binary_cross_entropy(&rp, &ry).unwrap() - hand).abs() < 1e-12);
        assert!(binary_cross_entropy(&[], &[]).is_err());
        assert!(binary_cross_entropy(&[0.5], &[1, 0]).is_err());
        assert!(binary_cross_entropy(&[0.5], &[2]).is_err());
    }

    #[test]
    fn batch_is_deterministic_in_shot_mode() {
        let m = model(Architecture::Sqnn, FeatureMapKind::Z, AnsatzKind::TwoLocal, 2);
        let rows: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64 / 16.0, 0.5]).collect();
        let params = vec![0.3; m.num_params()];
        let a = m.predict_batch(&params, &rows, 3).unwrap();
        assert_eq!(a, m.predict_batch(&params, &rows, 3).unwrap());
    }

    #[test]
    fn width_mismatch_rejected() {
        let spec = ModelSpec::new(
            Architecture::Vqc,
            FeatureMapSpec::new(FeatureMapKind::Z, 3),
            AnsatzSpec::new(AnsatzKind::TwoLocal, 2),
        );
        assert!(Model::new(spec).is_err());
    }
}
