//! Parameterized circuits.
//!
//! Angles are either concrete or a [`ParamExpr`]: a constant times a product of
//! affine factors `offset + scale·symbol`. That family covers `θ`, `2·x`, and
//! `2·(π−xᵢ)(π−xⱼ)`, which is everything the feature maps and ansatze need.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::sim::{GateKind, GateOp, StateVector, C64};

/// Largest register [`ParamCircuit::to_unitary`] will expand.
pub const MAX_UNITARY_QUBITS: usize = 4;

/// `offset + scale · value(symbol)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub symbol: usize,
    pub offset: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamExpr {
    coeff: f64,
    factors: Vec<Factor>,
}

impl ParamExpr {
    pub fn constant(value: f64) -> Self {
        ParamExpr {
            coeff: value,
            factors: Vec::new(),
        }
    }

    pub fn symbol(index: usize) -> Self {
        ParamExpr {
            coeff: 1.0,
            factors: vec![Factor {
                symbol: index,
                offset: 0.0,
                scale: 1.0,
            }],
        }
    }

    /// `π − symbol`
    pub fn pi_minus(index: usize) -> Self {
        ParamExpr {
            coeff: 1.0,
            factors: vec![Factor {
                symbol: index,
                offset: PI,
                scale: -1.0,
            }],
        }
    }

    pub fn scaled(mut self, k: f64) -> Self {
        self.coeff *= k;
        self
    }

    pub fn times(mut self, other: ParamExpr) -> Self {
        self.coeff *= other.coeff;
        self.factors.extend(other.factors);
        self
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.factors
            .iter()
            .fold(self.coeff, |acc, f| acc * (f.offset + f.scale * values[f.symbol]))
    }

    pub fn symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.iter().map(|f| f.symbol)
    }

    fn shifted(&self, by: usize) -> Self {
        let mut e = self.clone();
        for f in &mut e.factors {
            f.symbol += by;
        }
        e
    }

    fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        struct Show<'a>(&'a ParamExpr, &'a [String]);
        impl fmt::Display for Show<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let ParamExpr { coeff, factors } = self.0;
                if factors.is_empty() {
                    return write!(f, "{coeff}");
                }
                let mut first = true;
                if *coeff != 1.0 {
                    write!(f, "{coeff}")?;
                    first = false;
                }
                for fac in factors {
                    if !first {
                        f.write_str("*")?;
                    }
                    first = false;
                    let name = &self.1[fac.symbol];
                    match (fac.offset, fac.scale) {
                        (o, s) if o == 0.0 && s == 1.0 => write!(f, "{name}")?,
                        (o, s) if o == PI && s == -1.0 => write!(f, "(π-{name})")?,
                        (o, s) => write!(f, "({o}+{s}*{name})")?,
                    }
                }
                Ok(())
            }
        }
        Show(self, names)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Gate(GateOp),
    /// Single-qubit rotation whose angle is symbolic.
    Param {
        kind: GateKind,
        qubit: usize,
        expr: ParamExpr,
    },
}

impl Instruction {
    pub fn kind(&self) -> GateKind {
        match self {
            Instruction::Gate(op) => op.kind,
            Instruction::Param { kind, .. } => *kind,
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            Instruction::Gate(op) => op.targets().to_vec(),
            Instruction::Param { qubit, .. } => vec![*qubit],
        }
    }

    fn resolve(&self, values: &[f64]) -> GateOp {
        match self {
            Instruction::Gate(op) => *op,
            Instruction::Param { kind, qubit, expr } => {
                GateOp::rotation(*kind, *qubit, expr.eval(values))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamCircuit {
    n_qubits: usize,
    ops: Vec<Instruction>,
    parameter_names: Vec<String>,
}

impl ParamCircuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::sim::MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        Ok(ParamCircuit {
            n_qubits,
            ops: Vec::new(),
            parameter_names: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Instruction] {
        &self.ops
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.parameter_names
    }

    pub fn num_parameters(&self) -> usize {
        self.parameter_names.len()
    }

    pub fn is_bound(&self) -> bool {
        self.parameter_names.is_empty()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.ops.iter().filter(|op| op.kind() == kind).count()
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.ops.iter().filter(|op| op.kind().arity() == 2).count()
    }

    /// Declare a new free symbol and return its index.
    pub fn add_parameter(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if self.parameter_names.contains(&name) {
            return Err(Error::ParameterCollision(name));
        }
        self.parameter_names.push(name);
        Ok(self.parameter_names.len() - 1)
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        self.check_qubits(op.targets())?;
        if op.kind.takes_angle() && op.angle.is_none() {
            return Err(Error::MissingAngle(op.kind.name()));
        }
        self.ops.push(Instruction::Gate(op));
        Ok(())
    }

    pub fn push_rotation(&mut self, kind: GateKind, qubit: usize, expr: ParamExpr) -> Result<()> {
        if !kind.takes_angle() {
            return Err(Error::InvalidSpec(format!("{kind} takes no angle")));
        }
        self.check_qubits(&[qubit])?;
        if let Some(s) = expr.symbols().find(|&s| s >= self.parameter_names.len()) {
            return Err(Error::InvalidSpec(format!("undeclared symbol index {s}")));
        }
        self.ops.push(Instruction::Param { kind, qubit, expr });
        Ok(())
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        match qubits.iter().find(|&&q| q >= self.n_qubits) {
            Some(&qubit) => Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            }),
            None => Ok(()),
        }
    }

    /// `front` followed by `back`; parameters are concatenated in the same order.
    pub fn compose(&self, back: &ParamCircuit) -> Result<ParamCircuit> {
        if self.n_qubits != back.n_qubits {
            return Err(Error::WidthMismatch {
                front: self.n_qubits,
                back: back.n_qubits,
            });
        }
        if let Some(dup) = back
            .parameter_names
            .iter()
            .find(|n| self.parameter_names.contains(n))
        {
            return Err(Error::ParameterCollision(dup.clone()));
        }
        let shift = self.parameter_names.len();
        let mut out = self.clone();
        out.parameter_names.extend(back.parameter_names.iter().cloned());
        out.ops.extend(back.ops.iter().map(|op| match op {
            Instruction::Gate(g) => Instruction::Gate(*g),
            Instruction::Param { kind, qubit, expr } => Instruction::Param {
                kind: *kind,
                qubit: *qubit,
                expr: expr.shifted(shift),
            },
        }));
        Ok(out)
    }

    /// Substitute every free symbol by name.
    pub fn bind(&self, assignment: &HashMap<String, f64>) -> Result<ParamCircuit> {
        let values = self
            .parameter_names
            .iter()
            .map(|name| {
                let v = *assignment
                    .get(name)
                    .ok_or_else(|| Error::UnboundParameter(name.clone()))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite(name.clone()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        self.bind_values(&values)
    }

    /// Substitute symbols positionally, in `parameter_names` order.
    pub fn bind_values(&self, values: &[f64]) -> Result<ParamCircuit> {
        self.check_values(values)?;
        let ops = self
            .ops
            .iter()
            .map(|op| {
                let g = op.resolve(values);
                match g.angle {
                    Some(a) if !a.is_finite() => Err(Error::NonFinite(format!("{} angle", g.kind))),
                    _ => Ok(Instruction::Gate(g)),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ParamCircuit {
            n_qubits: self.n_qubits,
            ops,
            parameter_names: Vec::new(),
        })
    }

    fn check_values(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.parameter_names.len() {
            return Err(Error::LengthMismatch {
                expected: self.parameter_names.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(self.parameter_names[i].clone()));
        }
        Ok(())
    }

    /// Run a fully bound circuit from `|0…0⟩`.
    pub fn simulate(&self) -> Result<StateVector> {
        if let Some(name) = self.parameter_names.first() {
            return Err(Error::UnboundParameter(name.clone()));
        }
        self.simulate_with(&[])
    }

    /// Run the circuit with symbol values supplied positionally, without
    /// materialising a bound copy.
    pub fn simulate_with(&self, values: &[f64]) -> Result<StateVector> {
        self.check_values(values)?;
        let mut state = StateVector::new_zero(self.n_qubits)?;
        for op in &self.ops {
            state.apply_gate(&op.resolve(values))?;
        }
        Ok(state)
    }

    /// Dense unitary of a bound circuit, built from the full-space embedding of
    /// every gate matrix.
    pub fn to_unitary(&self) -> Result<DMatrix<C64>> {
        if self.n_qubits > MAX_UNITARY_QUBITS {
            return Err(Error::UnitaryTooLarge {
                got: self.n_qubits,
                max: MAX_UNITARY_QUBITS,
            });
        }
        if let Some(name) = self.parameter_names.first() {
            return Err(Error::UnboundParameter(name.clone()));
        }
        let dim = 1usize << self.n_qubits;
        let mut u = DMatrix::<C64>::identity(dim, dim);
        for op in &self.ops {
            let g = op.resolve(&[]);
            u = embed(&g, self.n_qubits)? * u;
        }
        Ok(u)
    }

    /// Append `exp(i·angle·P)` for the Pauli product `P` over the listed qubits.
    ///
    /// Basis change (H for X, RX(π/2) for Y), CX chain onto the last listed
    /// qubit, `RZ(−2·angle)`, then the inverse chain and basis change.
    pub fn append_pauli_evolution(&mut self, string: &[(usize, Pauli)], angle: ParamExpr) -> Result<()> {
        if string.is_empty() {
            return Err(Error::InvalidSpec("empty Pauli string".into()));
        }
        let qubits: Vec<usize> = string.iter().map(|&(q, _)| q).collect();
        self.check_qubits(&qubits)?;
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Error::InvalidSpec(format!(
                    "qubit {q} repeated in Pauli string"
                )));
            }
        }
        for &(q, p) in string {
            match p {
                Pauli::X => self.push(GateOp::single(GateKind::H, q))?,
                Pauli::Y => self.push(GateOp::rotation(GateKind::Rx, q, FRAC_PI_2))?,
                Pauli::Z => {}
            }
        }
        for w in qubits.windows(2) {
            self.push(GateOp::two(GateKind::Cx, w[0], w[1]))?;
        }
        let last = *qubits.last().expect("non-empty");
        self.push_rotation(GateKind::Rz, last, angle.scaled(-2.0))?;
        for w in qubits.windows(2).rev() {
            self.push(GateOp::two(GateKind::Cx, w[0], w[1]))?;
        }
        for &(q, p) in string.iter().rev() {
            match p {
                Pauli::X => self.push(GateOp::single(GateKind::H, q))?,
                Pauli::Y => self.push(GateOp::rotation(GateKind::Rx, q, -FRAC_PI_2))?,
                Pauli::Z => {}
            }
        }
        Ok(())
    }
}

/// Plain-text gate list: `kind target(s) [angle]`, one op per line.
impl fmt::Display for ParamCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            match op {
                Instruction::Gate(g) => writeln!(f, "{g}")?,
                Instruction::Param { kind, qubit, expr } => {
                    writeln!(f, "{kind} {qubit} {}", expr.display(&self.parameter_names))?
                }
            }
        }
        Ok(())
    }
}

/// Full `2^n × 2^n` matrix of a gate acting on its targets.
pub fn embed(op: &GateOp, n_qubits: usize) -> Result<DMatrix<C64>> {
    let targets = op.targets();
    if let Some(&qubit) = targets.iter().find(|&&q| q >= n_qubits) {
        return Err(Error::QubitOutOfRange { qubit, n_qubits });
    }
    let local = op.matrix()?;
    let d = 1usize << targets.len();
    let dim = 1usize << n_qubits;
    let mask: usize = targets.iter().map(|q| 1usize << q).sum();
    let extract = |i: usize| -> usize {
        targets
            .iter()
            .enumerate()
            .map(|(k, &q)| ((i >> q) & 1) << k)
            .sum()
    };
    let deposit = |l: usize| -> usize {
        targets
            .iter()
            .enumerate()
            .map(|(k, &q)| ((l >> k) & 1) << q)
            .sum()
    };
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for col in 0..dim {
        let lc = extract(col);
        let rest = col & !mask;
        for lr in 0..d {
            m[(rest | deposit(lr), col)] = local[lr * d + lc];
        }
    }
    Ok(m)
}
