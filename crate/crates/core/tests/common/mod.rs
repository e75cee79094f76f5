//! Dense-matrix oracles built from Kronecker products, independent of the
//! simulator's gate kernels and of `ParamCircuit::to_unitary`.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use qmlfraud_core::circuit::{Instruction, ParamCircuit};
use qmlfraud_core::featuremaps::FeatureMapKind;
use qmlfraud_core::sim::{GateKind, GateOp};
use qmlfraud_core::{DataTable, Pauli};
use rand::Rng;

pub type C = Complex<f64>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn m2(a: [C; 4]) -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &a)
}

pub fn identity2() -> DMatrix<C> {
    DMatrix::identity(2, 2)
}

pub fn pauli(p: Pauli) -> DMatrix<C> {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli::X => m2([o, l, l, o]),
        Pauli::Y => m2([o, -i, i, o]),
        Pauli::Z => m2([l, o, o, -l]),
    }
}

/// `exp(−iθP/2)` written out from cos/sin.
fn rotation(p: Pauli, theta: f64) -> DMatrix<C> {
    identity2() * c((theta / 2.0).cos(), 0.0) - pauli(p) * c(0.0, (theta / 2.0).sin())
}

/// Single-qubit matrix of a gate kind.
pub fn single_matrix(kind: GateKind, angle: f64) -> DMatrix<C> {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    let h = c(FRAC_1_SQRT_2, 0.0);
    let phase = |t: f64| m2([l, o, o, C::from_polar(1.0, t)]);
    match kind {
        GateKind::I => identity2(),
        GateKind::X => pauli(Pauli::X),
        GateKind::Y => pauli(Pauli::Y),
        GateKind::Z => pauli(Pauli::Z),
        GateKind::H => m2([h, h, h, -h]),
        GateKind::S => phase(PI / 2.0),
        GateKind::T => phase(PI / 4.0),
        GateKind::Rx => rotation(Pauli::X, angle),
        GateKind::Ry => rotation(Pauli::Y, angle),
        GateKind::Rz => rotation(Pauli::Z, angle),
        GateKind::Phase => phase(angle),
        other => panic!("{other:?} is not single-qubit"),
    }
}

/// `⊗` over qubits `n−1 … 0`, so qubit 0 is the rightmost factor.
pub fn on_qubits(n: usize, factors: &[(usize, DMatrix<C>)]) -> DMatrix<C> {
    let mut out = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in (0..n).rev() {
        let f = factors.iter().find(|(t, _)| *t == q).map_or_else(identity2, |(_, m)| m.clone());
        out = out.kronecker(&f);
    }
    out
}

fn projector(bit: usize) -> DMatrix<C> {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    if bit == 0 { m2([l, o, o, o]) } else { m2([o, o, o, l]) }
}

/// Full register matrix of one gate.
pub fn gate_matrix(op: &GateOp, n: usize) -> DMatrix<C> {
    let t = op.targets();
    let angle = op.angle.unwrap_or(0.0);
    match op.kind {
        GateKind::Cx | GateKind::Cz => {
            let target = if op.kind == GateKind::Cx { pauli(Pauli::X) } else { pauli(Pauli::Z) };
            on_qubits(n, &[(t[0], projector(0))]) + on_qubits(n, &[(t[0], projector(1)), (t[1], target)])
        }
        GateKind::Swap => {
            let mut m = on_qubits(n, &[]);
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                m += on_qubits(n, &[(t[0], pauli(p)), (t[1], pauli(p))]);
            }
            m * c(0.5, 0.0)
        }
        kind => on_qubits(n, &[(t[0], single_matrix(kind, angle))]),
    }
}

pub fn zero_state(n: usize) -> DVector<C> {
    let mut v = DVector::from_element(1 << n, c(0.0, 0.0));
    v[0] = c(1.0, 0.0);
    v
}

/// Applies a bound circuit's gates as dense matrices to `|0…0⟩`.
pub fn dense_simulate(circ: &ParamCircuit) -> DVector<C> {
    let n = circ.n_qubits();
    let mut v = zero_state(n);
    for ins in circ.ops() {
        match ins {
            Instruction::Gate(op) => v = gate_matrix(op, n) * v,
            Instruction::Param { .. } => panic!("circuit not bound"),
        }
    }
    v
}

pub fn fidelity(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().norm_sqr()
}

pub fn max_abs_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `exp(iφP) = cos φ·I + i sin φ·P`, valid because `P² = I`.
pub fn exp_i_pauli(n: usize, string: &[(usize, Pauli)], phi: f64) -> DMatrix<C> {
    let factors: Vec<(usize, DMatrix<C>)> = string.iter().map(|&(q, p)| (q, pauli(p))).collect();
    on_qubits(n, &[]) * c(phi.cos(), 0.0) + on_qubits(n, &factors) * c(0.0, phi.sin())
}

pub fn hadamard_all(n: usize) -> DMatrix<C> {
    let h = single_matrix(GateKind::H, 0.0);
    let all: Vec<(usize, DMatrix<C>)> = (0..n).map(|q| (q, h.clone())).collect();
    on_qubits(n, &all)
}

fn char_pauli(ch: char) -> Pauli {
    match ch {
        'X' => Pauli::X,
        'Y' => Pauli::Y,
        'Z' => Pauli::Z,
        _ => panic!("bad label {ch}"),
    }
}

/// The Pauli terms `(string, φ)` of one repetition, in application order.
pub fn feature_map_terms(
    kind: FeatureMapKind,
    labels: &[&str],
    pairs: &[(usize, usize)],
    x: &[f64],
) -> Vec<(Vec<(usize, Pauli)>, f64)> {
    let n = x.len();
    let labels: Vec<&str> = match kind {
        FeatureMapKind::Z => vec!["Z"],
        FeatureMapKind::Zz => vec!["Z", "ZZ"],
        FeatureMapKind::Pauli => labels.to_vec(),
    };
    let mut terms = Vec::new();
    for label in labels {
        let ch: Vec<char> = label.chars().collect();
        if ch.len() == 1 {
            for (q, &xq) in x.iter().enumerate().take(n) {
                terms.push((vec![(q, char_pauli(ch[0]))], xq));
            }
        } else {
            for &(i, j) in pairs {
                let phi = (PI - x[i]) * (PI - x[j]);
                terms.push((vec![(i, char_pauli(ch[0])), (j, char_pauli(ch[1]))], phi));
            }
        }
    }
    terms
}

/// `∏_reps [∏_S exp(iφ_S P_S) · H^⊗n] |0…0⟩`.
pub fn feature_map_state(
    kind: FeatureMapKind,
    labels: &[&str],
    pairs: &[(usize, usize)],
    reps: usize,
    x: &[f64],
) -> DVector<C> {
    let n = x.len();
    let mut v = zero_state(n);
    let h = hadamard_all(n);
    for _ in 0..reps {
        v = &h * v;
        for (string, phi) in feature_map_terms(kind, labels, pairs, x) {
            v = exp_i_pauli(n, &string, phi) * v;
        }
    }
    v
}

/// Random bound circuit over the full gate set.
pub fn random_circuit(n: usize, len: usize, rng: &mut impl Rng) -> ParamCircuit {
    let mut circ = ParamCircuit::new(n).unwrap();
    let kinds: Vec<GateKind> = GateKind::ALL
        .iter()
        .copied()
        .filter(|k| k.arity() == 1 || n >= 2)
        .collect();
    for _ in 0..len {
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let a = rng.gen_range(0..n);
        let op = if kind.arity() == 2 {
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            GateOp::two(kind, a, b)
        } else if kind.takes_angle() {
            GateOp::rotation(kind, a, rng.gen_range(-2.0 * PI..2.0 * PI))
        } else {
            GateOp::single(kind, a)
        };
        circ.push(op).unwrap();
    }
    circ
}

/// Two Gaussian blobs strictly on either side of `x0 + x1 = 1`, inside [0,1]².
pub fn separable_blobs(n: usize, seed: u64) -> DataTable {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.08).unwrap();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y = (i % 2) as u8;
        let centre: f64 = if y == 0 { 0.25 } else { 0.75 };
        // Resample until the point clears the separating line by a margin.
        let p = loop {
            let p: Vec<f64> = (0..2)
                .map(|_| (centre + noise.sample(&mut rng)).clamp(0.0, 1.0))
                .collect();
            let side = p[0] + p[1] - 1.0;
            if (y == 0 && side < -0.15) || (y == 1 && side > 0.15) {
                break p;
            }
        };
        rows.push(p);
        labels.push(y);
    }
    DataTable::new(vec!["x0".into(), "x1".into()], rows, labels, "label").unwrap()
}
