//! Dense statevector simulation for QAOA over diagonal Hamiltonians.
//!
//! Amplitude index `x` encodes qubit `i` in bit `i`. The problem unitary is
//! applied as an exact diagonal phase `exp(-i gamma E(x))`; mixers act qubit
//! by qubit on amplitude pairs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::format_index;
use crate::encode::IsingHamiltonian;
use crate::error::{check_len, Error, Result};

pub const MAX_QUBITS: usize = 24;
const MAX_DUMP_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// Per-basis-state energies of a diagonal Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTable {
    num_qubits: usize,
    energies: Vec<f64>,
}

impl EnergyTable {
    pub fn from_hamiltonian(h: &IsingHamiltonian) -> Result<Self> {
        check_qubits(h.num_qubits)?;
        let energies = (0..1usize << h.num_qubits).map(|x| h.energy_of_index(x)).collect();
        Ok(Self { num_qubits: h.num_qubits, energies })
    }

    pub fn from_energies(energies: Vec<f64>) -> Result<Self> {
        let len = energies.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::InvalidDimension(format!("{len} energies is not 2^m with m >= 1")));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubits(num_qubits)?;
        Ok(Self { num_qubits, energies })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
}

fn check_qubits(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidDimension("at least one qubit required".into()));
    }
    if m > MAX_QUBITS {
        return Err(Error::TooManyQubits { requested: m, limit: MAX_QUBITS });
    }
    Ok(())
}

/// `exp(-i angle X)` acting on one qubit: `[[c, -is], [-is, c]]`.
fn rotate_x(amps: &mut [Complex64], qubit: usize, angle: f64, control: Option<usize>) {
    let (s, c) = angle.sin_cos();
    let mis = Complex64::new(0.0, -s);
    let stride = 1usize << qubit;
    for x in 0..amps.len() {
        if x & stride != 0 {
            continue;
        }
        if let Some(ctrl) = control {
            if (x >> ctrl) & 1 == 0 {
                continue;
            }
        }
        let y = x | stride;
        let (a0, a1) = (amps[x], amps[y]);
        amps[x] = a0 * c + a1 * mis;
        amps[y] = a0 * mis + a1 * c;
    }
}

impl StateVector {
    /// `|+>^m`: every amplitude `2^(-m/2)`.
    pub fn uniform_superposition(m: usize) -> Result<Self> {
        check_qubits(m)?;
        let dim = 1usize << m;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self { num_qubits: m, amplitudes: vec![a; dim] })
    }

    pub fn basis_state(m: usize, index: usize) -> Result<Self> {
        check_qubits(m)?;
        let dim = 1usize << m;
        if index >= dim {
            return Err(Error::InvalidParameter(format!("basis index {index} >= {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits: m, amplitudes })
    }

    /// Wraps raw amplitudes, renormalizing them to unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::InvalidDimension(format!("{len} amplitudes is not 2^m with m >= 1")));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubits(num_qubits)?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("state has zero or non-finite norm".into()));
        }
        Ok(Self { num_qubits, amplitudes: amplitudes.into_iter().map(|a| a / norm).collect() })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability distribution over the listed qubits; output index bit `t`
    /// is the value of `qubits[t]`.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for &q in qubits {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
            }
        }
        Ok(marginalize(&self.probabilities(), qubits))
    }

    pub fn apply_phase_separation(&mut self, table: &EnergyTable, gamma: f64) -> Result<()> {
        check_len(self.num_qubits, table.num_qubits)?;
        for (a, &e) in self.amplitudes.iter_mut().zip(&table.energies) {
            *a *= Complex64::from_polar(1.0, -gamma * e);
        }
        Ok(())
    }

    /// `exp(-i beta_mix sum_i X_i)`, i.e. `Rx(2 beta_mix)` on every qubit.
    pub fn apply_mixer(&mut self, beta_mix: f64) {
        for q in 0..self.num_qubits {
            rotate_x(&mut self.amplitudes, q, beta_mix, None);
        }
    }

    /// Controlled `exp(-i beta_mix X)` on each ancilla, conditioned on its
    /// paired asset qubit being 1. Asset qubits are left untouched.
    pub fn apply_controlled_ancilla_rotations(
        &mut self,
        beta_mix: f64,
        pairs: &[(usize, usize)],
    ) -> Result<()> {
        self.check_pairs(pairs)?;
        for &(asset, ancilla) in pairs {
            rotate_x(&mut self.amplitudes, ancilla, beta_mix, Some(asset));
        }
        Ok(())
    }

    /// Conditional mixer: controlled ancilla rotations (controls read before
    /// any asset moves), then `Rx(2 beta_mix)` on every non-ancilla qubit.
    pub fn apply_conditional_mixer(&mut self, beta_mix: f64, pairs: &[(usize, usize)]) -> Result<()> {
        self.apply_controlled_ancilla_rotations(beta_mix, pairs)?;
        let ancillas: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        for q in 0..self.num_qubits {
            if !ancillas.contains(&q) {
                rotate_x(&mut self.amplitudes, q, beta_mix, None);
            }
        }
        Ok(())
    }

    fn check_pairs(&self, pairs: &[(usize, usize)]) -> Result<()> {
        let mut seen = vec![false; self.num_qubits];
        for &(a, b) in pairs {
            for q in [a, b] {
                if q >= self.num_qubits {
                    return Err(Error::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
                }
                if seen[q] {
                    return Err(Error::DuplicateQubit(q));
                }
                seen[q] = true;
            }
        }
        Ok(())
    }

    /// Exact `<psi|H|psi>`, summed in index order.
    pub fn expectation(&self, table: &EnergyTable) -> Result<f64> {
        check_len(self.num_qubits, table.num_qubits)?;
        Ok(self.amplitudes.iter().zip(&table.energies).map(|(a, e)| a.norm_sqr() * e).sum())
    }

    /// Draws `shots` basis indices from `|amplitude|^2`.
    pub fn sample(&self, shots: usize, seed: u64) -> Result<BTreeMap<usize, usize>> {
        if shots == 0 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        let dist =
            WeightedIndex::new(self.probabilities()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hist = BTreeMap::new();
        for _ in 0..shots {
            *hist.entry(dist.sample(&mut rng)).or_insert(0) += 1;
        }
        Ok(hist)
    }

    /// `(bitstring, re, im)` rows for debugging small states.
    pub fn dump(&self) -> Result<Vec<AmplitudeEntry>> {
        if self.num_qubits > MAX_DUMP_QUBITS {
            return Err(Error::TooManyQubits { requested: self.num_qubits, limit: MAX_DUMP_QUBITS });
        }
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(x, a)| AmplitudeEntry(format_index(x, self.num_qubits), a.re, a.im))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEntry(pub String, pub f64, pub f64);

pub fn marginalize(probs: &[f64], qubits: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; 1usize << qubits.len()];
    for (x, &p) in probs.iter().enumerate() {
        let y = qubits.iter().enumerate().fold(0, |acc, (t, &q)| acc | (((x >> q) & 1) << t));
        out[y] += p;
    }
    out
}

/// Gate vocabulary of the exported circuit. Angles follow the usual
/// `R_P(theta) = exp(-i theta P / 2)` convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    H { qubit: usize },
    GlobalPhase { theta: f64 },
    Rz { qubit: usize, theta: f64 },
    Rzz { a: usize, b: usize, theta: f64 },
    Rx { qubit: usize, theta: f64 },
    Crx { control: usize, target: usize, theta: f64 },
}

impl std::fmt::Display for Gate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Gate::H { qubit } => write!(f, "h q[{qubit}]"),
            Gate::GlobalPhase { theta } => write!(f, "gphase({theta:.17e})"),
            Gate::Rz { qubit, theta } => write!(f, "rz({theta:.17e}) q[{qubit}]"),
            Gate::Rzz { a, b, theta } => write!(f, "rzz({theta:.17e}) q[{a}], q[{b}]"),
            Gate::Rx { qubit, theta } => write!(f, "rx({theta:.17e}) q[{qubit}]"),
            Gate::Crx { control, target, theta } => {
                write!(f, "crx({theta:.17e}) q[{control}], q[{target}]")
            }
        }
    }
}

/// Gate-level form of the ansatz: `H` on every qubit, then per layer the
/// phase separator (global phase for the offset, `Rz` per nonzero field, `Rzz`
/// per nonzero coupling) followed by the mixer. `pairs` selects the
/// conditional mixer when nonempty.
pub fn circuit_gates(
    h: &IsingHamiltonian,
    gammas: &[f64],
    beta_mixes: &[f64],
    pairs: &[(usize, usize)],
) -> Vec<Gate> {
    let m = h.num_qubits;
    let mut gates: Vec<Gate> = (0..m).map(|qubit| Gate::H { qubit }).collect();
    for (&gamma, &beta) in gammas.iter().zip(beta_mixes) {
        if h.offset != 0.0 {
            gates.push(Gate::GlobalPhase { theta: -gamma * h.offset });
        }
        for (qubit, &field) in h.fields.iter().enumerate() {
            if field != 0.0 {
                gates.push(Gate::Rz { qubit, theta: 2.0 * gamma * field });
            }
        }
        for (&(a, b), &j) in &h.couplings {
            if j != 0.0 {
                gates.push(Gate::Rzz { a, b, theta: 2.0 * gamma * j });
            }
        }
        for &(control, target) in pairs {
            gates.push(Gate::Crx { control, target, theta: 2.0 * beta });
        }
        for qubit in 0..m {
            if !pairs.iter().any(|p| p.1 == qubit) {
                gates.push(Gate::Rx { qubit, theta: 2.0 * beta });
            }
        }
    }
    gates
}

pub fn export_circuit_text(
    h: &IsingHamiltonian,
    gammas: &[f64],
    beta_mixes: &[f64],
    pairs: &[(usize, usize)],
) -> String {
    let gates = circuit_gates(h, gammas, beta_mixes, pairs);
    let mut out = String::new();
    let _ = writeln!(out, "// qaoa p={} qubits={}", gammas.len().min(beta_mixes.len()), h.num_qubits);
    let _ = writeln!(out, "qreg q[{}];", h.num_qubits);
    for g in gates {
        let _ = writeln!(out, "{g};");
    }
    out
}
