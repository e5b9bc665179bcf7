//! Penalized QUBO construction and the exact QUBO to Ising mapping.
//!
//! Programs store their quadratic part as an upper-triangular matrix `U`
//! (`i <= j`) so that each unordered pair contributes once:
//!
//! ```text
//! E(x) = sum_{i<=j} U_ij x_i x_j + sum_i b_i x_i + c
//! ```
//!
//! Diagonal entries keep the `x_i^2` terms produced by expanding squares. On
//! binary inputs they act linearly; in a continuous relaxation they stay
//! quadratic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_binary, check_len, Error, Result};
use crate::instance::PortfolioInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum VarLabel {
    Asset(usize),
    SlackPerAsset(usize),
    SlackCardinality(usize),
}

/// Which constraint encoding a program was built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// One binary slack per asset closing `omega_i <= alpha_i`.
    SlackAncilla,
    /// `A (sum omega - K)^2`, no ancillas.
    Penalty,
    /// `A (sum omega + s - K)^2` with `s` held in binary ancillas.
    CardinalitySlack,
}

impl Encoding {
    pub fn build(self, instance: &PortfolioInstance, weight: f64) -> Result<QuboProgram> {
        match self {
            Encoding::SlackAncilla => build_slack_ancilla_qubo(instance, weight),
            Encoding::Penalty => build_penalty_qubo(instance, weight),
            Encoding::CardinalitySlack => build_cardinality_slack_qubo(instance, weight),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "QuboFile", try_from = "QuboFile")]
pub struct QuboProgram {
    labels: Vec<VarLabel>,
    quadratic: Vec<Vec<f64>>,
    linear: Vec<f64>,
    constant: f64,
}

impl QuboProgram {
    pub fn new(labels: Vec<VarLabel>) -> Self {
        let m = labels.len();
        Self { labels, quadratic: vec![vec![0.0; m]; m], linear: vec![0.0; m], constant: 0.0 }
    }

    /// Builds a program from a full (not necessarily symmetric) matrix `q`
    /// with energy `x'qx + b'x + c`; `q_ij` and `q_ji` are merged.
    pub fn from_dense(q: &[Vec<f64>], b: &[f64], c: f64) -> Result<Self> {
        let m = b.len();
        check_len(m, q.len())?;
        let mut program = Self::new((0..m).map(VarLabel::Asset).collect());
        for (i, row) in q.iter().enumerate() {
            check_len(m, row.len())?;
            for (j, &v) in row.iter().enumerate() {
                program.add_quadratic(i, j, v);
            }
        }
        for (i, &v) in b.iter().enumerate() {
            program.add_linear(i, v);
        }
        program.add_constant(c);
        Ok(program)
    }

    pub fn num_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[VarLabel] {
        &self.labels
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Coefficient of `x_i x_j` for `i <= j` (the upper-triangular entry).
    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.quadratic[a][b]
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, v: f64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.quadratic[a][b] += v;
    }

    pub fn add_linear(&mut self, i: usize, v: f64) {
        self.linear[i] += v;
    }

    pub fn add_constant(&mut self, v: f64) {
        self.constant += v;
    }

    /// Adds `weight * (sum_j c_j y_j + offset)^2`, expanded term by term.
    pub fn add_squared_linear_form(&mut self, terms: &[(usize, f64)], offset: f64, weight: f64) {
        for (a, &(i, ci)) in terms.iter().enumerate() {
            self.add_quadratic(i, i, weight * ci * ci);
            self.add_linear(i, 2.0 * weight * offset * ci);
            for &(j, cj) in &terms[a + 1..] {
                self.add_quadratic(i, j, 2.0 * weight * ci * cj);
            }
        }
        self.add_constant(weight * offset * offset);
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.quadratic.iter_mut().flatten().for_each(|v| *v *= factor);
        out.linear.iter_mut().for_each(|v| *v *= factor);
        out.constant *= factor;
        out
    }

    pub fn qubo_energy(&self, x: &[u8]) -> Result<f64> {
        check_len(self.num_vars(), x.len())?;
        check_binary(x)?;
        let mut e = 0.0;
        for i in (0..x.len()).filter(|&i| x[i] == 1) {
            for j in (i..x.len()).filter(|&j| x[j] == 1) {
                e += self.quadratic[i][j];
            }
        }
        for i in (0..x.len()).filter(|&i| x[i] == 1) {
            e += self.linear[i];
        }
        Ok(e + self.constant)
    }

    /// Evaluates the same polynomial on real inputs, with `x_i^2` kept
    /// quadratic. Used by the continuous-relaxation baseline.
    pub fn relaxed_energy(&self, x: &[f64]) -> Result<f64> {
        check_len(self.num_vars(), x.len())?;
        let mut e = 0.0;
        for i in 0..x.len() {
            for j in i..x.len() {
                e += self.quadratic[i][j] * x[i] * x[j];
            }
            e += self.linear[i] * x[i];
        }
        Ok(e + self.constant)
    }

    /// Qubit indices of asset `0..n`, in asset order.
    pub fn asset_qubits(&self) -> Vec<usize> {
        let mut assets: Vec<(usize, usize)> = self
            .labels
            .iter()
            .enumerate()
            .filter_map(|(q, l)| match l {
                VarLabel::Asset(i) => Some((*i, q)),
                _ => None,
            })
            .collect();
        assets.sort_unstable();
        assets.into_iter().map(|(_, q)| q).collect()
    }

    /// `(asset qubit, ancilla qubit)` for every per-asset slack.
    pub fn slack_pairs(&self) -> Vec<(usize, usize)> {
        let assets = self.asset_qubits();
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(q, l)| match l {
                VarLabel::SlackPerAsset(i) => assets.get(*i).map(|&a| (a, q)),
                _ => None,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("program serializes")
    }
}

fn check_weight(weight: f64) -> Result<()> {
    if weight > 0.0 && weight.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositivePenalty(weight))
    }
}

/// `q * omega' Sigma omega - lambda * mu' omega` over the first `n` variables.
fn add_markowitz_terms(program: &mut QuboProgram, instance: &PortfolioInstance) {
    let n = instance.n;
    for i in 0..n {
        program.add_quadratic(i, i, instance.q_risk * instance.sigma[i][i]);
        for j in i + 1..n {
            program.add_quadratic(i, j, instance.q_risk * (instance.sigma[i][j] + instance.sigma[j][i]));
        }
        program.add_linear(i, -instance.lambda_weight * instance.mu[i]);
    }
}

fn asset_labels(n: usize) -> impl Iterator<Item = VarLabel> {
    (0..n).map(VarLabel::Asset)
}

/// Markowitz objective plus `beta * sum_i (omega_i - alpha_i + s_i)^2` over
/// `2n` variables: assets at `0..n`, the slack of asset `i` at `n + i`.
pub fn build_slack_ancilla_qubo(instance: &PortfolioInstance, beta: f64) -> Result<QuboProgram> {
    check_weight(beta)?;
    instance.check_dimensions()?;
    let n = instance.n;
    let labels = asset_labels(n).chain((0..n).map(VarLabel::SlackPerAsset)).collect();
    let mut program = QuboProgram::new(labels);
    add_markowitz_terms(&mut program, instance);
    for i in 0..n {
        program.add_squared_linear_form(&[(i, 1.0), (n + i, 1.0)], -instance.alpha[i], beta);
    }
    Ok(program)
}

/// Markowitz objective plus `a_card * (sum_i omega_i - K)^2`.
pub fn build_penalty_qubo(instance: &PortfolioInstance, a_card: f64) -> Result<QuboProgram> {
    check_weight(a_card)?;
    instance.check_dimensions()?;
    let n = instance.n;
    let mut program = QuboProgram::new(asset_labels(n).collect());
    add_markowitz_terms(&mut program, instance);
    let terms: Vec<(usize, f64)> = (0..n).map(|i| (i, 1.0)).collect();
    program.add_squared_linear_form(&terms, -(instance.k as f64), a_card);
    Ok(program)
}

/// Number of binary digits needed to hold every integer in `[0, k]`.
pub fn cardinality_slack_bits(k: usize) -> usize {
    (usize::BITS - k.leading_zeros()) as usize
}

/// Markowitz objective plus `a_card * (sum_i omega_i + s - K)^2`, with
/// `s = sum_b 2^b s_b` over `ceil(log2(K + 1))` ancilla bits after the assets.
pub fn build_cardinality_slack_qubo(instance: &PortfolioInstance, a_card: f64) -> Result<QuboProgram> {
    check_weight(a_card)?;
    instance.check_dimensions()?;
    let n = instance.n;
    let bits = cardinality_slack_bits(instance.k);
    let labels = asset_labels(n).chain((0..bits).map(VarLabel::SlackCardinality)).collect();
    let mut program = QuboProgram::new(labels);
    add_markowitz_terms(&mut program, instance);
    let terms: Vec<(usize, f64)> =
        (0..n).map(|i| (i, 1.0)).chain((0..bits).map(|b| (n + b, (1u64 << b) as f64))).collect();
    program.add_squared_linear_form(&terms, -(instance.k as f64), a_card);
    Ok(program)
}

/// Diagonal Hamiltonian `offset + sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j`.
///
/// Bit value 0 maps to spin `z = +1`, bit value 1 to `z = -1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "IsingFile", try_from = "IsingFile")]
pub struct IsingHamiltonian {
    pub num_qubits: usize,
    pub couplings: BTreeMap<(usize, usize), f64>,
    pub fields: Vec<f64>,
    pub offset: f64,
}

impl IsingHamiltonian {
    pub fn zero(num_qubits: usize) -> Self {
        Self { num_qubits, couplings: BTreeMap::new(), fields: vec![0.0; num_qubits], offset: 0.0 }
    }

    pub fn ising_energy(&self, x: &[u8]) -> Result<f64> {
        check_len(self.num_qubits, x.len())?;
        check_binary(x)?;
        let spin = |i: usize| 1.0 - 2.0 * f64::from(x[i]);
        let mut e = self.offset;
        for (i, h) in self.fields.iter().enumerate() {
            e += h * spin(i);
        }
        for (&(i, j), jij) in &self.couplings {
            e += jij * spin(i) * spin(j);
        }
        Ok(e)
    }

    /// Energy of basis state `index` (qubit 0 least significant).
    pub fn energy_of_index(&self, index: usize) -> f64 {
        let spin = |i: usize| if (index >> i) & 1 == 0 { 1.0 } else { -1.0 };
        let mut e = self.offset;
        for (i, h) in self.fields.iter().enumerate() {
            e += h * spin(i);
        }
        for (&(i, j), jij) in &self.couplings {
            e += jij * spin(i) * spin(j);
        }
        e
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hamiltonian serializes")
    }
}

/// Substitutes `x_i = (1 - z_i) / 2` term by term:
///
/// * `b x_i` gives `b/2 - (b/2) z_i`
/// * `U x_i x_j` gives `U/4 (1 - z_i - z_j + z_i z_j)`
///
/// Diagonal entries are linear in binary `x`, so `Z_i^2 = I` lands in the offset.
pub fn to_ising(program: &QuboProgram) -> IsingHamiltonian {
    let m = program.num_vars();
    let mut h = IsingHamiltonian::zero(m);
    h.offset = program.constant;
    for i in 0..m {
        let b = program.linear[i] + program.quadratic[i][i];
        h.offset += b / 2.0;
        h.fields[i] -= b / 2.0;
    }
    for i in 0..m {
        for j in i + 1..m {
            let u = program.quadratic[i][j];
            if u == 0.0 {
                continue;
            }
            let quarter = u / 4.0;
            h.offset += quarter;
            h.fields[i] -= quarter;
            h.fields[j] -= quarter;
            *h.couplings.entry((i, j)).or_insert(0.0) += quarter;
        }
    }
    h
}

#[derive(Serialize, Deserialize)]
struct QuboFile {
    num_vars: usize,
    labels: Vec<VarLabel>,
    /// Nonzero upper-triangular entries as `(i, j, value)`, `i <= j`.
    quadratic: Vec<(usize, usize, f64)>,
    linear: Vec<f64>,
    constant: f64,
}

impl From<QuboProgram> for QuboFile {
    fn from(p: QuboProgram) -> Self {
        let mut quadratic = Vec::new();
        for (i, row) in p.quadratic.iter().enumerate() {
            for (j, &v) in row.iter().enumerate().skip(i) {
                if v != 0.0 {
                    quadratic.push((i, j, v));
                }
            }
        }
        QuboFile {
            num_vars: p.labels.len(),
            labels: p.labels,
            quadratic,
            linear: p.linear,
            constant: p.constant,
        }
    }
}

impl TryFrom<QuboFile> for QuboProgram {
    type Error = Error;

    fn try_from(f: QuboFile) -> Result<Self> {
        check_len(f.num_vars, f.labels.len())?;
        check_len(f.num_vars, f.linear.len())?;
        let mut p = QuboProgram::new(f.labels);
        for (i, j, v) in f.quadratic {
            for idx in [i, j] {
                if idx >= f.num_vars {
                    return Err(Error::QubitOutOfRange { index: idx, num_qubits: f.num_vars });
                }
            }
            p.add_quadratic(i, j, v);
        }
        p.linear = f.linear;
        p.constant = f.constant;
        Ok(p)
    }
}

#[derive(Serialize, Deserialize)]
struct IsingFile {
    num_qubits: usize,
    couplings: Vec<(usize, usize, f64)>,
    fields: Vec<f64>,
    offset: f64,
}

impl From<IsingHamiltonian> for IsingFile {
    fn from(h: IsingHamiltonian) -> Self {
        IsingFile {
            num_qubits: h.num_qubits,
            couplings: h.couplings.into_iter().map(|((i, j), v)| (i, j, v)).collect(),
            fields: h.fields,
            offset: h.offset,
        }
    }
}

impl TryFrom<IsingFile> for IsingHamiltonian {
    type Error = Error;

    fn try_from(f: IsingFile) -> Result<Self> {
        check_len(f.num_qubits, f.fields.len())?;
        let mut couplings = BTreeMap::new();
        for (i, j, v) in f.couplings {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if a == b {
                return Err(Error::DuplicateQubit(a));
            }
            if b >= f.num_qubits {
                return Err(Error::QubitOutOfRange { index: b, num_qubits: f.num_qubits });
            }
            *couplings.entry((a, b)).or_insert(0.0) += v;
        }
        Ok(IsingHamiltonian { num_qubits: f.num_qubits, couplings, fields: f.fields, offset: f.offset })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::index_to_bits;
    use crate::instance::generate_instance;

    fn zero_objective(n: usize, alpha: Vec<f64>, k: usize) -> PortfolioInstance {
        PortfolioInstance::new(vec![0.0; n], vec![vec![0.0; n]; n], alpha, k).unwrap()
    }

    /// Energy from the definition, independent of the coefficient layout.
    fn direct_slack_energy(inst: &PortfolioInstance, beta: f64, x: &[u8]) -> f64 {
        let n = inst.n;
        let w = &x[..n];
        let mut e = inst.classical_objective(w).unwrap();
        for i in 0..n {
            let r = f64::from(x[i]) - inst.alpha[i] + f64::from(x[n + i]);
            e += beta * r * r;
        }
        e
    }

    #[test]
    fn one_asset_slack_square() {
        let inst = zero_objective(1, vec![1.0], 1);
        let p = build_slack_ancilla_qubo(&inst, 1.0).unwrap();
        assert_eq!(p.num_vars(), 2);
        // x = [omega, s]
        assert_eq!(p.qubo_energy(&[1, 0]).unwrap(), 0.0);
        assert_eq!(p.qubo_energy(&[0, 1]).unwrap(), 0.0);
        assert_eq!(p.qubo_energy(&[0, 0]).unwrap(), 1.0);
        assert_eq!(p.qubo_energy(&[1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn closed_threshold_forces_asset_off() {
        let inst = zero_objective(1, vec![0.0], 1);
        let p = build_slack_ancilla_qubo(&inst, 1.0).unwrap();
        let zero: Vec<usize> =
            (0..4).filter(|&x| p.qubo_energy(&index_to_bits(x, 2)).unwrap() == 0.0).collect();
        assert_eq!(zero, vec![0]);
        assert_eq!(p.qubo_energy(&[1, 0]).unwrap(), 1.0);
    }

    #[test]
    fn slack_program_matches_definition() {
        let inst = generate_instance(3, 1, 11).unwrap();
        let p = build_slack_ancilla_qubo(&inst, 100.0).unwrap();
        for x in 0..64 {
            let bits = index_to_bits(x, 6);
            let got = p.qubo_energy(&bits).unwrap();
            assert!((got - direct_slack_energy(&inst, 100.0, &bits)).abs() < 1e-12);
        }
    }

    #[test]
    fn penalty_program_hand_values() {
        let inst = zero_objective(3, vec![1.0, 0.0, 0.0], 1);
        let p = build_penalty_qubo(&inst, 1.0).unwrap();
        assert_eq!(p.qubo_energy(&[1, 0, 0]).unwrap(), 0.0);
        assert_eq!(p.qubo_energy(&[1, 1, 1]).unwrap(), 4.0);
        assert_eq!(p.qubo_energy(&[0, 0, 0]).unwrap(), 1.0);

        let inst = zero_objective(2, vec![1.0, 1.0], 2);
        let p = build_penalty_qubo(&inst, 5.0).unwrap();
        let energies: Vec<f64> = (0..4).map(|x| p.qubo_energy(&index_to_bits(x, 2)).unwrap()).collect();
        assert_eq!(energies[3], 0.0);
        assert!(energies[..3].iter().all(|&e| e > 0.0));
    }

    #[test]
    fn cardinality_slack_hand_values() {
        let inst = zero_objective(3, vec![1.0, 0.0, 0.0], 1);
        let p = build_cardinality_slack_qubo(&inst, 1.0).unwrap();
        assert_eq!(p.num_vars(), 4);
        assert_eq!(p.labels()[3], VarLabel::SlackCardinality(0));
        assert_eq!(p.qubo_energy(&[1, 0, 0, 0]).unwrap(), 0.0);
        assert_eq!(p.qubo_energy(&[0, 0, 0, 1]).unwrap(), 0.0);
        for s in 0..2 {
            assert!(p.qubo_energy(&[1, 1, 1, s]).unwrap() >= 1.0);
        }
    }

    #[test]
    fn slack_bit_counts() {
        assert_eq!(cardinality_slack_bits(1), 1);
        assert_eq!(cardinality_slack_bits(2), 2);
        assert_eq!(cardinality_slack_bits(3), 2);
        assert_eq!(cardinality_slack_bits(4), 3);
        assert_eq!(cardinality_slack_bits(7), 3);
    }

    #[test]
    fn nonpositive_weights_rejected() {
        let inst = generate_instance(2, 1, 0).unwrap();
        for w in [0.0, -1.0, f64::NAN] {
            assert!(matches!(build_slack_ancilla_qubo(&inst, w), Err(Error::NonPositivePenalty(_))));
            assert!(matches!(build_penalty_qubo(&inst, w), Err(Error::NonPositivePenalty(_))));
            assert!(matches!(build_cardinality_slack_qubo(&inst, w), Err(Error::NonPositivePenalty(_))));
        }
    }

    #[test]
    fn qubo_energy_basics() {
        let p = QuboProgram::from_dense(&[vec![2.0]], &[3.0], 1.0).unwrap();
        assert_eq!(p.qubo_energy(&[1]).unwrap(), 6.0);
        assert_eq!(p.qubo_energy(&[0]).unwrap(), 1.0);
        assert!(matches!(p.qubo_energy(&[1, 0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dense_off_diagonals_merge() {
        let p = QuboProgram::from_dense(&[vec![0.0, 1.0], vec![2.0, 0.0]], &[0.0, 0.0], 0.0).unwrap();
        assert_eq!(p.quadratic(0, 1), 3.0);
        assert_eq!(p.quadratic(1, 0), 3.0);
        assert_eq!(p.qubo_energy(&[1, 1]).unwrap(), 3.0);
    }

    #[test]
    fn ising_of_zero_program() {
        let p = QuboProgram::new(vec![VarLabel::Asset(0), VarLabel::Asset(1)]);
        let h = to_ising(&p);
        assert!(h.couplings.is_empty());
        assert_eq!(h.fields, vec![0.0, 0.0]);
        assert_eq!(h.offset, 0.0);
    }

    #[test]
    fn ising_single_linear_term() {
        let p = QuboProgram::from_dense(&[vec![0.0]], &[1.0], 0.0).unwrap();
        let h = to_ising(&p);
        assert_eq!(h.fields, vec![-0.5]);
        assert_eq!(h.offset, 0.5);
    }

    #[test]
    fn spin_sign_convention() {
        let mut h = IsingHamiltonian::zero(1);
        h.fields[0] = 1.0;
        assert_eq!(h.ising_energy(&[0]).unwrap(), 1.0);
        assert_eq!(h.ising_energy(&[1]).unwrap(), -1.0);
    }

    #[test]
    fn slack_program_ising_equivalence() {
        let inst = generate_instance(3, 1, 3).unwrap();
        let p = build_slack_ancilla_qubo(&inst, 100.0).unwrap();
        let h = to_ising(&p);
        for x in 0..64 {
            let bits = index_to_bits(x, 6);
            let q = p.qubo_energy(&bits).unwrap();
            assert!((h.ising_energy(&bits).unwrap() - q).abs() < 1e-12);
            assert!((h.energy_of_index(x) - q).abs() < 1e-12);
        }
    }

    #[test]
    fn pairs_and_assets() {
        let inst = generate_instance(3, 1, 3).unwrap();
        let p = build_slack_ancilla_qubo(&inst, 1.0).unwrap();
        assert_eq!(p.asset_qubits(), vec![0, 1, 2]);
        assert_eq!(p.slack_pairs(), vec![(0, 3), (1, 4), (2, 5)]);
        assert!(build_penalty_qubo(&inst, 1.0).unwrap().slack_pairs().is_empty());
    }

    #[test]
    fn json_shapes() {
        let inst = generate_instance(2, 1, 3).unwrap();
        let p = build_slack_ancilla_qubo(&inst, 2.0).unwrap();
        let back: QuboProgram = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(back, p);
        let v: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(v["labels"][2], serde_json::json!({"kind": "slack_per_asset", "index": 0}));

        let h = to_ising(&p);
        let back: IsingHamiltonian = serde_json::from_str(&h.to_json()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn relaxed_energy_agrees_on_vertices() {
        let inst = generate_instance(2, 1, 9).unwrap();
        let p = build_slack_ancilla_qubo(&inst, 3.0).unwrap();
        for x in 0..16 {
            let bits = index_to_bits(x, 4);
            let real: Vec<f64> = bits.iter().map(|&b| f64::from(b)).collect();
            assert!((p.relaxed_energy(&real).unwrap() - p.qubo_energy(&bits).unwrap()).abs() < 1e-12);
        }
    }
}
