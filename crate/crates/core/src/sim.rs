//! Dense statevector simulation.
//!
//! Basis index bit `q` holds the value of qubit `q`, so qubit 0 is the least
//! significant bit. Global phase is never tracked or normalised.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 20;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    Rx,
    Ry,
    Rz,
    /// `diag(1, e^{iλ})`
    Phase,
    Cx,
    Cz,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 14] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::T,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Phase,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Swap,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn takes_angle(self) -> bool {
        matches!(
            self,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Phase
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "id",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Phase => "p",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One concrete gate application.
///
/// For two-qubit kinds `qubits[0]` is the control (CX) and `qubits[1]` the
/// target; single-qubit kinds only read `qubits[0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    qubits: [usize; 2],
    pub angle: Option<f64>,
}

impl GateOp {
    pub fn new(kind: GateKind, targets: &[usize], angle: Option<f64>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::InvalidSpec(format!(
                "{kind} expects {} target(s), got {}",
                kind.arity(),
                targets.len()
            )));
        }
        if kind.takes_angle() && angle.is_none() {
            return Err(Error::MissingAngle(kind.name()));
        }
        if kind.arity() == 2 && targets[0] == targets[1] {
            return Err(Error::DuplicateQubit(kind.name()));
        }
        let qubits = [targets[0], *targets.get(1).unwrap_or(&targets[0])];
        Ok(GateOp {
            kind,
            qubits,
            angle: if kind.takes_angle() { angle } else { None },
        })
    }

    pub fn single(kind: GateKind, q: usize) -> Self {
        debug_assert!(kind.arity() == 1 && !kind.takes_angle());
        GateOp {
            kind,
            qubits: [q, q],
            angle: None,
        }
    }

    pub fn rotation(kind: GateKind, q: usize, angle: f64) -> Self {
        debug_assert!(kind.takes_angle());
        GateOp {
            kind,
            qubits: [q, q],
            angle: Some(angle),
        }
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        debug_assert!(kind.arity() == 2 && a != b);
        GateOp {
            kind,
            qubits: [a, b],
            angle: None,
        }
    }

    pub fn targets(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    fn angle_or_err(&self) -> Result<f64> {
        self.angle.ok_or(Error::MissingAngle(self.kind.name()))
    }

    /// The adjoint operation.
    pub fn inverse(&self) -> GateOp {
        let mut inv = *self;
        match self.kind {
            GateKind::S => {
                inv.kind = GateKind::Phase;
                inv.angle = Some(-FRAC_PI_2);
            }
            GateKind::T => {
                inv.kind = GateKind::Phase;
                inv.angle = Some(-FRAC_PI_4);
            }
            k if k.takes_angle() => inv.angle = self.angle.map(|a| -a),
            _ => {}
        }
        inv
    }

    /// Local matrix, row-major. Two-qubit matrices use the local index
    /// `bit(qubits[0]) + 2 * bit(qubits[1])`.
    pub fn matrix(&self) -> Result<Vec<C64>> {
        if self.kind.arity() == 1 {
            Ok(self.matrix_1q()?.concat())
        } else {
            let mut m = vec![ZERO; 16];
            let perm: [usize; 4] = match self.kind {
                GateKind::Cx => [0, 3, 2, 1],
                GateKind::Swap => [0, 2, 1, 3],
                _ => [0, 1, 2, 3],
            };
            for (col, &row) in perm.iter().enumerate() {
                m[row * 4 + col] = ONE;
            }
            if self.kind == GateKind::Cz {
                m[15] = -ONE;
            }
            Ok(m)
        }
    }

    fn matrix_1q(&self) -> Result<[[C64; 2]; 2]> {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Ok(match self.kind {
            GateKind::I => [[ONE, ZERO], [ZERO, ONE]],
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, -I], [I, ZERO]],
            GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
            GateKind::H => [[h, h], [h, -h]],
            GateKind::S => [[ONE, ZERO], [ZERO, I]],
            GateKind::T => [[ONE, ZERO], [ZERO, C64::from_polar(1.0, FRAC_PI_4)]],
            GateKind::Rx => {
                let t = self.angle_or_err()? / 2.0;
                let (c, s) = (C64::new(t.cos(), 0.0), C64::new(0.0, -t.sin()));
                [[c, s], [s, c]]
            }
            GateKind::Ry => {
                let t = self.angle_or_err()? / 2.0;
                let (c, s) = (C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0));
                [[c, -s], [s, c]]
            }
            GateKind::Rz => {
                let t = self.angle_or_err()? / 2.0;
                [
                    [C64::from_polar(1.0, -t), ZERO],
                    [ZERO, C64::from_polar(1.0, t)],
                ]
            }
            GateKind::Phase => {
                let l = self.angle_or_err()?;
                [[ONE, ZERO], [ZERO, C64::from_polar(1.0, l)]]
            }
            GateKind::Cx | GateKind::Cz | GateKind::Swap => unreachable!("two-qubit kind"),
        })
    }

    fn diagonal_1q(&self) -> Result<Option<(C64, C64)>> {
        Ok(match self.kind {
            GateKind::I | GateKind::Z | GateKind::S | GateKind::T | GateKind::Rz | GateKind::Phase => {
                let m = self.matrix_1q()?;
                Some((m[0][0], m[1][1]))
            }
            _ => None,
        })
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in self.targets() {
            write!(f, " {q}")?;
        }
        if let Some(a) = self.angle {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

/// Amplitudes over the `2^n` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn new_zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = ONE;
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Wrap explicit amplitudes; the length must be a power of two and the
    /// vector normalised within `1e-10`.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidSpec(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let state = StateVector {
            n_qubits,
            amplitudes,
        };
        if (state.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidSpec("amplitudes are not normalised".into()));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm_sqr()
    }

    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        for &q in op.targets() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        let [a, b] = op.qubits;
        match op.kind {
            GateKind::Cx => {
                let (c, t) = (1usize << a, 1usize << b);
                for i in 0..self.amplitudes.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amplitudes.swap(i, i | t);
                    }
                }
            }
            GateKind::Cz => {
                let mask = (1usize << a) | (1usize << b);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            GateKind::Swap => {
                let (ma, mb) = (1usize << a, 1usize << b);
                for i in 0..self.amplitudes.len() {
                    if i & ma != 0 && i & mb == 0 {
                        self.amplitudes.swap(i, (i & !ma) | mb);
                    }
                }
            }
            _ => {
                if let Some((d0, d1)) = op.diagonal_1q()? {
                    let bit = 1usize << a;
                    for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                        *amp *= if i & bit == 0 { d0 } else { d1 };
                    }
                } else {
                    self.apply_1q(a, op.matrix_1q()?);
                }
            }
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: [[C64; 2]; 2]) {
        let stride = 1usize << q;
        for chunk in self.amplitudes.chunks_exact_mut(2 * stride) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = m[0][0] * a + m[0][1] * b;
                *y = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    /// Born-rule probabilities of every basis state.
    pub fn probabilities(&self) -> BasisDistribution {
        BasisDistribution {
            n_qubits: self.n_qubits,
            probabilities: self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    /// `⟨Z_q⟩` for every qubit `q`.
    pub fn expectation_z_each(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.n_qubits];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            for (q, zq) in z.iter_mut().enumerate() {
                if i >> q & 1 == 0 {
                    *zq += p;
                } else {
                    *zq -= p;
                }
            }
        }
        z
    }
}

/// A probability distribution over basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisDistribution {
    n_qubits: usize,
    probabilities: Vec<f64>,
}

impl BasisDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        let len = probabilities.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidSpec(format!(
                "distribution length {len} is not a power of two"
            )));
        }
        if probabilities
            .iter()
            .any(|p| !p.is_finite() || !(0.0..=1.0).contains(p))
        {
            return Err(Error::InvalidSpec("probability outside [0, 1]".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidSpec(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(BasisDistribution {
            n_qubits: len.trailing_zeros() as usize,
            probabilities,
        })
    }

    /// Empirical frequencies of a count map.
    pub fn from_counts(n_qubits: usize, counts: &BTreeMap<usize, u64>) -> Result<Self> {
        let shots: u64 = counts.values().sum();
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let mut probabilities = vec![0.0; 1 << n_qubits];
        for (&i, &c) in counts {
            let slot = probabilities.get_mut(i).ok_or(Error::QubitOutOfRange {
                qubit: i,
                n_qubits,
            })?;
            *slot = c as f64 / shots as f64;
        }
        Ok(BasisDistribution {
            n_qubits,
            probabilities,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Draw `shots` basis indices; only outcomes that occurred are present.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let mut cdf = Vec::with_capacity(self.probabilities.len());
        let mut acc = 0.0;
        for p in &self.probabilities {
            acc += p;
            cdf.push(acc);
        }
        let last_nonzero = self
            .probabilities
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * acc;
            // Rounding can leave `u` past the last partial sum.
            let idx = cdf.partition_point(|&c| c <= u).min(last_nonzero);
            *counts.entry(idx).or_insert(0) += 1;
        }
        Ok(counts)
    }
}
