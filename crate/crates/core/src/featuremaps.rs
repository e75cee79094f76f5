//! Angle-encoding feature maps: Z, ZZ and general Pauli expansions.
//!
//! Every repetition is a Hadamard layer followed by `exp(i·φ_S(x)·P_S)` for each
//! term `S`, where `φ_S(x) = x_i` for a single qubit and `∏(π − x_j)` for a
//! pair. Each term is realised with [`ParamCircuit::append_pauli_evolution`],
//! so the rotation angle on the circuit is `2·φ_S`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{ParamCircuit, ParamExpr, Pauli};
use crate::error::{Error, Result};
use crate::sim::{GateKind, GateOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMapKind {
    Z,
    Zz,
    Pauli,
}

impl FeatureMapKind {
    pub const ALL: [FeatureMapKind; 3] = [FeatureMapKind::Z, FeatureMapKind::Zz, FeatureMapKind::Pauli];

    pub fn key(self) -> &'static str {
        match self {
            FeatureMapKind::Z => "z",
            FeatureMapKind::Zz => "zz",
            FeatureMapKind::Pauli => "pauli",
        }
    }

    /// Name used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            FeatureMapKind::Z => "Z",
            FeatureMapKind::Zz => "ZZ",
            FeatureMapKind::Pauli => "Pauli",
        }
    }
}

impl FromStr for FeatureMapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z" => Ok(FeatureMapKind::Z),
            "zz" => Ok(FeatureMapKind::Zz),
            "pauli" => Ok(FeatureMapKind::Pauli),
            other => Err(Error::Config(format!("unknown feature map `{other}`"))),
        }
    }
}

/// Qubit-pair topology for two-qubit terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entanglement {
    Full,
    Linear,
    Circular,
}

impl Entanglement {
    pub fn key(self) -> &'static str {
        match self {
            Entanglement::Full => "full",
            Entanglement::Linear => "linear",
            Entanglement::Circular => "circular",
        }
    }

    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Entanglement::Full => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
            Entanglement::Linear => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
            Entanglement::Circular => {
                let mut p = Entanglement::Linear.pairs(n);
                if n > 2 {
                    p.push((n - 1, 0));
                }
                p
            }
        }
    }
}

impl FromStr for Entanglement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Entanglement::Full),
            "linear" => Ok(Entanglement::Linear),
            "circular" => Ok(Entanglement::Circular),
            other => Err(Error::Config(format!("unknown entanglement `{other}`"))),
        }
    }
}

pub const DEFAULT_PAULIS: [&str; 3] = ["Z", "Y", "ZZ"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMapSpec {
    pub kind: FeatureMapKind,
    pub n_features: usize,
    pub reps: usize,
    /// Only read for [`FeatureMapKind::Pauli`].
    pub paulis: Vec<String>,
    pub entanglement: Entanglement,
}

impl FeatureMapSpec {
    pub fn new(kind: FeatureMapKind, n_features: usize) -> Self {
        FeatureMapSpec {
            kind,
            n_features,
            reps: 1,
            paulis: DEFAULT_PAULIS.iter().map(|s| s.to_string()).collect(),
            entanglement: Entanglement::Full,
        }
    }

    pub fn build(&self) -> Result<ParamCircuit> {
        match self.kind {
            FeatureMapKind::Z => build_z_map(self),
            FeatureMapKind::Zz => build_zz_map(self),
            FeatureMapKind::Pauli => build_pauli_map(self),
        }
    }
}

/// `x_i` for a singleton subset, `∏(π − x_j)` otherwise.
pub fn data_map_phi(subset: &[usize], x: &[f64]) -> Result<f64> {
    match subset {
        [] => Err(Error::Empty("feature subset")),
        _ if subset.iter().any(|&i| i >= x.len()) => Err(Error::InvalidSpec(format!(
            "feature subset {subset:?} exceeds {} features",
            x.len()
        ))),
        [i] => Ok(x[*i]),
        _ => Ok(subset.iter().map(|&j| std::f64::consts::PI - x[j]).product()),
    }
}

fn phi_expr(subset: &[usize]) -> ParamExpr {
    match subset {
        [i] => ParamExpr::symbol(*i),
        _ => subset
            .iter()
            .map(|&j| ParamExpr::pi_minus(j))
            .reduce(ParamExpr::times)
            .expect("non-empty subset"),
    }
}

fn base_circuit(spec: &FeatureMapSpec, min_features: usize) -> Result<ParamCircuit> {
    if spec.n_features < min_features {
        return Err(Error::InvalidSpec(format!(
            "{} feature map needs at least {min_features} features, got {}",
            spec.kind.label(),
            spec.n_features
        )));
    }
    if spec.reps == 0 {
        return Err(Error::InvalidSpec("feature map reps must be ≥ 1".into()));
    }
    let mut c = ParamCircuit::new(spec.n_features)?;
    for i in 0..spec.n_features {
        c.add_parameter(format!("x{i}"))?;
    }
    Ok(c)
}

fn hadamard_layer(c: &mut ParamCircuit) -> Result<()> {
    for q in 0..c.n_qubits() {
        c.push(GateOp::single(GateKind::H, q))?;
    }
    Ok(())
}

fn z_terms(c: &mut ParamCircuit) -> Result<()> {
    for q in 0..c.n_qubits() {
        c.append_pauli_evolution(&[(q, Pauli::Z)], phi_expr(&[q]))?;
    }
    Ok(())
}

pub fn build_z_map(spec: &FeatureMapSpec) -> Result<ParamCircuit> {
    let mut c = base_circuit(spec, 1)?;
    for _ in 0..spec.reps {
        hadamard_layer(&mut c)?;
        z_terms(&mut c)?;
    }
    Ok(c)
}

pub fn build_zz_map(spec: &FeatureMapSpec) -> Result<ParamCircuit> {
    let mut c = base_circuit(spec, 2)?;
    let pairs = spec.entanglement.pairs(spec.n_features);
    for _ in 0..spec.reps {
        hadamard_layer(&mut c)?;
        z_terms(&mut c)?;
        for &(i, j) in &pairs {
            c.append_pauli_evolution(&[(i, Pauli::Z), (j, Pauli::Z)], phi_expr(&[i, j]))?;
        }
    }
    Ok(c)
}

fn parse_label(label: &str) -> Result<Vec<Pauli>> {
    let axes = label
        .trim()
        .chars()
        .map(|ch| {
            Pauli::from_char(ch)
                .ok_or_else(|| Error::InvalidSpec(format!("Pauli label `{label}` has invalid axis `{ch}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidSpec(format!(
            "Pauli label `{label}` must have length 1 or 2"
        )));
    }
    Ok(axes)
}

pub fn build_pauli_map(spec: &FeatureMapSpec) -> Result<ParamCircuit> {
    let labels = spec
        .paulis
        .iter()
        .map(|l| parse_label(l))
        .collect::<Result<Vec<_>>>()?;
    if labels.is_empty() {
        return Err(Error::InvalidSpec("Pauli feature map needs at least one label".into()));
    }
    let needs_pairs = labels.iter().any(|l| l.len() == 2);
    let mut c = base_circuit(spec, if needs_pairs { 2 } else { 1 })?;
    let pairs = spec.entanglement.pairs(spec.n_features);
    for _ in 0..spec.reps {
        hadamard_layer(&mut c)?;
        for axes in &labels {
            match axes.as_slice() {
                [p] => {
                    for q in 0..spec.n_features {
                        c.append_pauli_evolution(&[(q, *p)], phi_expr(&[q]))?;
                    }
                }
                [p, r] => {
                    for &(i, j) in &pairs {
                        c.append_pauli_evolution(&[(i, *p), (j, *r)], phi_expr(&[i, j]))?;
                    }
                }
                _ => unreachable!("labels validated"),
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Instruction;
    use std::f64::consts::PI;

    fn spec(kind: FeatureMapKind, n: usize) -> FeatureMapSpec {
        FeatureMapSpec::new(kind, n)
    }

    #[test]
    fn phi_branches() {
        assert_eq!(data_map_phi(&[2], &[0.1, 0.2, 0.3]).unwrap(), 0.3);
        assert_eq!(data_map_phi(&[0, 1], &[PI, PI]).unwrap(), 0.0);
        let all: Vec<usize> = (0..7).collect();
        let v = data_map_phi(&all, &[0.0; 7]).unwrap();
        assert!((v - PI.powi(7)).abs() < 1e-9);
        assert!(matches!(data_map_phi(&[], &[1.0]), Err(Error::Empty(_))));
        assert!(data_map_phi(&[3], &[1.0]).is_err());
    }

    #[test]
    fn z_map_at_origin_is_plus_state() {
        let c = build_z_map(&spec(FeatureMapKind::Z, 2)).unwrap();
        assert_eq!(c.two_qubit_gate_count(), 0);
        let s = c.simulate_with(&[0.0, 0.0]).unwrap();
        for p in s.probabilities().probabilities() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn z_map_gate_counts() {
        let mut s = spec(FeatureMapKind::Z, 3);
        s.reps = 2;
        let c = build_z_map(&s).unwrap();
        assert_eq!(c.count_kind(GateKind::H), 6);
        let param_ops = c
            .ops()
            .iter()
            .filter(|op| matches!(op, Instruction::Param { .. }))
            .count();
        assert_eq!(param_ops, 6);
        assert_eq!(c.parameter_names(), &["x0", "x1", "x2"]);
    }

    #[test]
    fn zz_pair_gadget_counts() {
        let two = build_zz_map(&spec(FeatureMapKind::Zz, 2)).unwrap();
        // each ZZ gadget carries two CX gates
        assert_eq!(two.count_kind(GateKind::Cx), 2);
        let four = build_zz_map(&spec(FeatureMapKind::Zz, 4)).unwrap();
        assert_eq!(four.count_kind(GateKind::Cx), 2 * 6);
        assert!(matches!(
            build_zz_map(&spec(FeatureMapKind::Zz, 1)),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn zz_pair_angle_at_origin() {
        let c = build_zz_map(&spec(FeatureMapKind::Zz, 2)).unwrap();
        let bound = c.bind_values(&[0.0, 0.0]).unwrap();
        // The pair RZ sits between the two CX gates.
        let ops = bound.ops();
        let cx = ops.iter().position(|op| op.kind() == GateKind::Cx).unwrap();
        match &ops[cx + 1] {
            Instruction::Gate(g) => {
                assert_eq!(g.kind, GateKind::Rz);
                assert!((g.angle.unwrap().abs() - 2.0 * PI * PI).abs() < 1e-12);
            }
            _ => panic!("expected bound gate"),
        }
    }

    #[test]
    fn pauli_map_reductions() {
        let mut p = spec(FeatureMapKind::Pauli, 3);
        p.paulis = vec!["Z".into(), "ZZ".into()];
        assert_eq!(
            build_pauli_map(&p).unwrap(),
            build_zz_map(&spec(FeatureMapKind::Zz, 3)).unwrap()
        );
        p.paulis = vec!["Z".into()];
        assert_eq!(
            build_pauli_map(&p).unwrap(),
            build_z_map(&spec(FeatureMapKind::Z, 3)).unwrap()
        );
    }

    #[test]
    fn pauli_map_rejects_bad_labels() {
        let mut p = spec(FeatureMapKind::Pauli, 2);
        p.paulis = vec!["ZA".into()];
        assert!(build_pauli_map(&p).is_err());
        p.paulis = vec!["ZZZ".into()];
        assert!(build_pauli_map(&p).is_err());
        p.paulis = vec![];
        assert!(build_pauli_map(&p).is_err());
    }

    #[test]
    fn entanglement_patterns() {
        assert_eq!(Entanglement::Full.pairs(3), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(Entanglement::Linear.pairs(4), vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(Entanglement::Circular.pairs(3), vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(Entanglement::Circular.pairs(2), vec![(0, 1)]);
    }

    #[test]
    fn every_feature_moves_the_state() {
        let x = [0.31, 0.62, 0.17];
        for kind in FeatureMapKind::ALL {
            let c = spec(kind, 3).build().unwrap();
            let base = c.simulate_with(&x).unwrap();
            assert_eq!(base, c.simulate_with(&x).unwrap());
            for i in 0..3 {
                let mut y = x;
                y[i] += 0.25;
                let moved = c.simulate_with(&y).unwrap();
                assert!(base.fidelity(&moved) < 1.0 - 1e-6, "{kind:?} ignores x{i}");
            }
        }
    }

    #[test]
    fn kinds_parse_from_config_strings() {
        assert_eq!("ZZ".parse::<FeatureMapKind>().unwrap(), FeatureMapKind::Zz);
        assert_eq!("linear".parse::<Entanglement>().unwrap(), Entanglement::Linear);
        assert!("ring".parse::<Entanglement>().is_err());
    }
}
