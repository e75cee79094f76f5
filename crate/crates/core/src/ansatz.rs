//! Trainable circuits. Parameters are always named `θ0 … θ(k−1)` in the order
//! the rotations are laid down.

use std::f64::consts::FRAC_PI_4;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{ParamCircuit, ParamExpr};
use crate::error::{Error, Result};
use crate::featuremaps::Entanglement;
use crate::sim::{GateKind, GateOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    RealAmplitudes,
    EfficientSu2,
    TwoLocal,
    PauliTwoDesign,
}

impl AnsatzKind {
    /// Report order.
    pub const ALL: [AnsatzKind; 4] = [
        AnsatzKind::RealAmplitudes,
        AnsatzKind::TwoLocal,
        AnsatzKind::EfficientSu2,
        AnsatzKind::PauliTwoDesign,
    ];

    pub fn key(self) -> &'static str {
        match self {
            AnsatzKind::RealAmplitudes => "real_amplitudes",
            AnsatzKind::EfficientSu2 => "efficient_su2",
            AnsatzKind::TwoLocal => "two_local",
            AnsatzKind::PauliTwoDesign => "pauli_two_design",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AnsatzKind::RealAmplitudes => "Real Amplitudes",
            AnsatzKind::EfficientSu2 => "Efficient SU2",
            AnsatzKind::TwoLocal => "Two Local",
            AnsatzKind::PauliTwoDesign => "Pauli Two Design",
        }
    }

    /// Closed-form trainable parameter count.
    pub fn parameter_count(self, n_qubits: usize, reps: usize) -> usize {
        match self {
            AnsatzKind::EfficientSu2 => 2 * n_qubits * (reps + 1),
            _ => n_qubits * (reps + 1),
        }
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "realamplitudes" => Ok(AnsatzKind::RealAmplitudes),
            "efficientsu2" => Ok(AnsatzKind::EfficientSu2),
            "twolocal" => Ok(AnsatzKind::TwoLocal),
            "paulitwodesign" => Ok(AnsatzKind::PauliTwoDesign),
            _ => Err(Error::Config(format!("unknown ansatz `{}`", s.trim()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub n_qubits: usize,
    pub reps: usize,
    pub entanglement: Entanglement,
    /// Rotation-axis draw for [`AnsatzKind::PauliTwoDesign`].
    pub seed: u64,
}

impl AnsatzSpec {
    pub fn new(kind: AnsatzKind, n_qubits: usize) -> Self {
        AnsatzSpec {
            kind,
            n_qubits,
            reps: 1,
            entanglement: Entanglement::Linear,
            seed: 0,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.kind.parameter_count(self.n_qubits, self.reps)
    }

    pub fn build(&self) -> Result<ParamCircuit> {
        match self.kind {
            AnsatzKind::RealAmplitudes => build_real_amplitudes(self),
            AnsatzKind::EfficientSu2 => build_efficient_su2(self),
            AnsatzKind::TwoLocal => build_two_local(self, GateKind::Ry, GateKind::Cx),
            AnsatzKind::PauliTwoDesign => build_pauli_two_design(self),
        }
    }
}

struct Builder {
    circuit: ParamCircuit,
}

impl Builder {
    fn new(spec: &AnsatzSpec) -> Result<Self> {
        if spec.n_qubits == 0 {
            return Err(Error::InvalidSpec("ansatz needs at least one qubit".into()));
        }
        if spec.reps == 0 {
            return Err(Error::InvalidSpec("ansatz reps must be ≥ 1".into()));
        }
        Ok(Builder {
            circuit: ParamCircuit::new(spec.n_qubits)?,
        })
    }

    fn rotation(&mut self, kind: GateKind, q: usize) -> Result<()> {
        let idx = self.circuit.num_parameters();
        let s = self.circuit.add_parameter(format!("θ{idx}"))?;
        self.circuit.push_rotation(kind, q, ParamExpr::symbol(s))
    }

    fn rotation_layer(&mut self, kind: GateKind) -> Result<()> {
        for q in 0..self.circuit.n_qubits() {
            self.rotation(kind, q)?;
        }
        Ok(())
    }

    fn entangle_layer(&mut self, kind: GateKind, pairs: &[(usize, usize)]) -> Result<()> {
        for &(a, b) in pairs {
            self.circuit.push(GateOp::two(kind, a, b))?;
        }
        Ok(())
    }
}

/// RY layers alternating with CX layers.
pub fn build_real_amplitudes(spec: &AnsatzSpec) -> Result<ParamCircuit> {
    build_two_local(spec, GateKind::Ry, GateKind::Cx)
}

/// `[RY, RZ]` blocks alternating with CX layers.
pub fn build_efficient_su2(spec: &AnsatzSpec) -> Result<ParamCircuit> {
    let mut b = Builder::new(spec)?;
    let pairs = spec.entanglement.pairs(spec.n_qubits);
    for layer in 0..=spec.reps {
        b.rotation_layer(GateKind::Ry)?;
        b.rotation_layer(GateKind::Rz)?;
        if layer < spec.reps {
            b.entangle_layer(GateKind::Cx, &pairs)?;
        }
    }
    Ok(b.circuit)
}

/// Single-rotation layers alternating with two-qubit entangling layers.
pub fn build_two_local(spec: &AnsatzSpec, rotation: GateKind, entangler: GateKind) -> Result<ParamCircuit> {
    if !matches!(rotation, GateKind::Rx | GateKind::Ry | GateKind::Rz) {
        return Err(Error::InvalidSpec(format!("{rotation} is not a rotation gate")));
    }
    if !matches!(entangler, GateKind::Cx | GateKind::Cz) {
        return Err(Error::InvalidSpec(format!("{entangler} is not an entangling gate")));
    }
    let mut b = Builder::new(spec)?;
    let pairs = spec.entanglement.pairs(spec.n_qubits);
    for layer in 0..=spec.reps {
        b.rotation_layer(rotation)?;
        if layer < spec.reps {
            b.entangle_layer(entangler, &pairs)?;
        }
    }
    Ok(b.circuit)
}

/// Axes drawn for each rotation layer of a Pauli two-design, `[layer][qubit]`.
pub fn pauli_two_design_axes(spec: &AnsatzSpec) -> Vec<Vec<GateKind>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..=spec.reps)
        .map(|_| {
            (0..spec.n_qubits)
                .map(|_| [GateKind::Rx, GateKind::Ry, GateKind::Rz][rng.gen_range(0..3)])
                .collect()
        })
        .collect()
}

/// CZ brick for block `layer`: pairs start at index 0 on even blocks and 1 on
/// odd blocks.
pub fn brick_pairs(n: usize, layer: usize) -> Vec<(usize, usize)> {
    (layer % 2..n.saturating_sub(1))
        .step_by(2)
        .map(|i| (i, i + 1))
        .collect()
}

/// RY(π/4) on every qubit, then `reps` blocks of random-axis rotations and a CZ
/// brick layer, closed by one more rotation layer.
pub fn build_pauli_two_design(spec: &AnsatzSpec) -> Result<ParamCircuit> {
    let mut b = Builder::new(spec)?;
    for q in 0..spec.n_qubits {
        b.circuit.push(GateOp::rotation(GateKind::Ry, q, FRAC_PI_4))?;
    }
    let axes = pauli_two_design_axes(spec);
    for (layer, layer_axes) in axes.iter().enumerate() {
        for (q, &axis) in layer_axes.iter().enumerate() {
            b.rotation(axis, q)?;
        }
        if layer < spec.reps {
            b.entangle_layer(GateKind::Cz, &brick_pairs(spec.n_qubits, layer))?;
        }
    }
    Ok(b.circuit)
}
