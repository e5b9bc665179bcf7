//! The variational loop: depth-`p` ansatz, angle optimization, and the
//! penalty-doubling feasibility schedule.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{format_index, index_to_bits};
use crate::bounds::{check_variance_bound, BoundReport};
use crate::encode::{to_ising, Encoding, IsingHamiltonian, QuboProgram};
use crate::error::{Error, Result};
use crate::instance::PortfolioInstance;
use crate::optim::{minimize, Optimizer};
use crate::simulate::{circuit_gates, export_circuit_text as export_gates, EnergyTable, Gate, StateVector};

/// Initial exploration radius of the angle optimizer, in radians.
pub const ANGLE_STEP: f64 = 0.5;
/// Asset bitstrings below this probability are not eligible as `best_feasible`.
pub const REPORT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub p: usize,
    pub gammas: Vec<f64>,
    pub beta_mixes: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, beta_mixes: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != beta_mixes.len() {
            return Err(Error::InvalidParameter(format!(
                "need p >= 1 gammas and as many mixer angles, got {} and {}",
                gammas.len(),
                beta_mixes.len()
            )));
        }
        if gammas.iter().chain(&beta_mixes).any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("angles must be finite".into()));
        }
        Ok(Self { p: gammas.len(), gammas, beta_mixes })
    }

    pub fn zeros(p: usize) -> Result<Self> {
        Self::new(vec![0.0; p], vec![0.0; p])
    }

    /// Layout `[gamma_1..gamma_p, beta_1..beta_p]`.
    pub fn from_flat(p: usize, theta: &[f64]) -> Result<Self> {
        if theta.len() != 2 * p {
            return Err(Error::DimensionMismatch { expected: 2 * p, found: theta.len() });
        }
        Self::new(theta[..p].to_vec(), theta[p..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.beta_mixes).copied().collect()
    }

    /// Uniform draw from `[0, pi)^(2p)`.
    pub fn random(p: usize, rng: &mut impl Rng) -> Result<Self> {
        let theta: Vec<f64> = (0..2 * p).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect();
        Self::from_flat(p, &theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixerKind {
    #[default]
    Standard,
    Conditional,
}

/// Mixer with its qubit wiring resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum Mixer {
    Standard,
    /// `(asset, ancilla)` pairs; ancillas rotate only when their asset is 1.
    Conditional(Vec<(usize, usize)>),
}

impl Mixer {
    pub fn for_program(kind: MixerKind, program: &QuboProgram) -> Self {
        match kind {
            MixerKind::Standard => Mixer::Standard,
            MixerKind::Conditional => Mixer::Conditional(program.slack_pairs()),
        }
    }

    fn pairs(&self) -> &[(usize, usize)] {
        match self {
            Mixer::Standard => &[],
            Mixer::Conditional(pairs) => pairs,
        }
    }
}

/// A Hamiltonian's energy table together with a mixer, ready to evaluate
/// angles repeatedly.
#[derive(Debug, Clone)]
pub struct Ansatz {
    table: EnergyTable,
    mixer: Mixer,
}

impl Ansatz {
    pub fn new(h: &IsingHamiltonian, mixer: Mixer) -> Result<Self> {
        Ok(Self { table: EnergyTable::from_hamiltonian(h)?, mixer })
    }

    pub fn table(&self) -> &EnergyTable {
        &self.table
    }

    pub fn state(&self, params: &QaoaParams) -> Result<StateVector> {
        let mut state = StateVector::uniform_superposition(self.table.num_qubits())?;
        for (&gamma, &beta) in params.gammas.iter().zip(&params.beta_mixes) {
            state.apply_phase_separation(&self.table, gamma)?;
            match &self.mixer {
                Mixer::Standard => state.apply_mixer(beta),
                Mixer::Conditional(pairs) => state.apply_conditional_mixer(beta, pairs)?,
            }
        }
        Ok(state)
    }

    pub fn expectation(&self, params: &QaoaParams) -> Result<f64> {
        self.state(params)?.expectation(&self.table)
    }
}

/// Prepares `|psi(theta)>` from `|+>^m` with `p` alternating layers.
pub fn run_ansatz(h: &IsingHamiltonian, params: &QaoaParams, mixer: &Mixer) -> Result<StateVector> {
    Ansatz::new(h, mixer.clone())?.state(params)
}

pub fn circuit(h: &IsingHamiltonian, params: &QaoaParams, mixer: &Mixer) -> Vec<Gate> {
    circuit_gates(h, &params.gammas, &params.beta_mixes, mixer.pairs())
}

pub fn export_circuit_text(h: &IsingHamiltonian, params: &QaoaParams, mixer: &Mixer) -> String {
    export_gates(h, &params.gammas, &params.beta_mixes, mixer.pairs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleSearch {
    pub initial: QaoaParams,
    pub params: QaoaParams,
    pub best_expectation: f64,
    /// Expectation at every evaluation.
    pub trace: Vec<f64>,
}

fn tune(
    ansatz: &Ansatz,
    start: &QaoaParams,
    optimizer: Optimizer,
    budget: usize,
) -> Result<(QaoaParams, f64, Vec<f64>)> {
    let p = start.p;
    let outcome = minimize(
        optimizer,
        |theta: &[f64]| {
            QaoaParams::from_flat(p, theta).and_then(|params| ansatz.expectation(&params)).unwrap_or(f64::NAN)
        },
        &start.to_flat(),
        None,
        ANGLE_STEP,
        budget,
    );
    Ok((QaoaParams::from_flat(p, &outcome.best_x)?, outcome.best_value, outcome.trace))
}

/// Minimizes the ansatz expectation from a seeded start in `[0, pi)^(2p)`.
pub fn optimize_angles(
    h: &IsingHamiltonian,
    p: usize,
    mixer: &Mixer,
    optimizer: Optimizer,
    budget: usize,
    seed: u64,
) -> Result<AngleSearch> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    let ansatz = Ansatz::new(h, mixer.clone())?;
    let initial = QaoaParams::random(p, &mut angle_rng(seed))?;
    let (params, best_expectation, trace) = tune(&ansatz, &initial, optimizer, budget)?;
    Ok(AngleSearch { initial, params, best_expectation, trace })
}

fn angle_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sampling_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub beta_penalty_init: f64,
    /// Optimizer evaluations between feasibility checks (and doublings).
    pub doubling_interval: usize,
    pub feasibility_shots: usize,
    pub feasibility_target: f64,
    pub max_iterations: usize,
    pub optimizer: Optimizer,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            beta_penalty_init: 100.0,
            doubling_interval: 20,
            feasibility_shots: 1000,
            feasibility_target: 1.0,
            max_iterations: 200,
            optimizer: Optimizer::default(),
        }
    }
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_penalty_init > 0.0 && self.beta_penalty_init.is_finite()) {
            return Err(Error::NonPositivePenalty(self.beta_penalty_init));
        }
        if self.doubling_interval == 0 || self.feasibility_shots == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "doubling_interval, feasibility_shots and max_iterations must be positive".into(),
            ));
        }
        if !(self.feasibility_target > 0.0 && self.feasibility_target <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "feasibility_target {} outside (0, 1]",
                self.feasibility_target
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SlackAncillaQaoa,
    PenaltyQaoa,
    CardinalitySlackQaoa,
}

impl Method {
    pub fn encoding(self) -> Encoding {
        match self {
            Method::SlackAncillaQaoa => Encoding::SlackAncilla,
            Method::PenaltyQaoa => Encoding::Penalty,
            Method::CardinalitySlackQaoa => Encoding::CardinalitySlack,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// A feasibility check met the target.
    FeasibilityReached,
    /// The schedule ran out of iterations before meeting the target.
    MaxIterations,
    /// Fixed-penalty run that spent its budget; no feasibility target applies.
    BudgetExhausted,
}

/// Which portfolio a record reports in its summary row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    BestFeasible,
    MostProbable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioPick {
    /// Asset bits, asset 0 first.
    pub bitstring: String,
    pub probability: f64,
    pub feasible: bool,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// 1-based optimizer evaluation count.
    pub iteration: usize,
    pub expectation: f64,
    pub beta_penalty: f64,
    /// Sampled feasible fraction; set on rows where a check ran.
    pub feasible_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub method: Method,
    pub optimizer: Optimizer,
    pub mixer: MixerKind,
    pub seed: u64,
    pub num_qubits: usize,
    pub initial_params: QaoaParams,
    pub final_params: QaoaParams,
    pub final_beta_penalty: f64,
    pub final_expectation: f64,
    /// Exact probabilities over the full register, qubit 0 first.
    pub histogram: BTreeMap<String, f64>,
    /// Exact probabilities marginalized onto the asset qubits.
    pub asset_histogram: BTreeMap<String, f64>,
    pub most_probable: PortfolioPick,
    pub best_feasible: Option<PortfolioPick>,
    pub reported: Selection,
    /// Exact probability mass on feasible asset bitstrings.
    pub feasible_fraction: f64,
    /// Result of the last sampled feasibility check, if any ran.
    pub sampled_feasible_fraction: Option<f64>,
    pub iterations_used: usize,
    pub termination: Termination,
    pub objective_trace: Vec<f64>,
    pub trace: Vec<TraceRow>,
    pub variance_bound: BoundReport,
}

impl ExperimentRecord {
    pub fn reported_portfolio(&self) -> Option<&PortfolioPick> {
        match self.reported {
            Selection::BestFeasible => self.best_feasible.as_ref(),
            Selection::MostProbable => Some(&self.most_probable),
        }
    }

    /// Iterations at which the penalty weight changed, 1-based.
    pub fn doubling_iterations(&self) -> Vec<usize> {
        self.trace
            .windows(2)
            .filter(|w| w[1].beta_penalty != w[0].beta_penalty)
            .map(|w| w[0].iteration)
            .collect()
    }
}

/// Fraction of `shots` samples whose asset bits form a feasible portfolio.
fn sampled_feasible_fraction(
    state: &StateVector,
    instance: &PortfolioInstance,
    shots: usize,
    seed: u64,
) -> Result<f64> {
    let hist = state.sample(shots, seed)?;
    let n = instance.n;
    let mut feasible = 0;
    for (x, count) in hist {
        if instance.is_feasible(&index_to_bits(x, n))? {
            feasible += count;
        }
    }
    Ok(feasible as f64 / shots as f64)
}

struct FinalState<'a> {
    instance: &'a PortfolioInstance,
    program: &'a QuboProgram,
    state: StateVector,
    table: &'a EnergyTable,
}

impl FinalState<'_> {
    fn summarize(&self) -> Result<Summary> {
        let n = self.instance.n;
        let m = self.state.num_qubits();
        let probs = self.state.probabilities();
        let asset_probs = self.state.marginal(&self.program.asset_qubits())?;

        let histogram = probs.iter().enumerate().map(|(x, &p)| (format_index(x, m), p)).collect();
        let asset_histogram = asset_probs.iter().enumerate().map(|(x, &p)| (format_index(x, n), p)).collect();

        let pick = |x: usize| -> Result<PortfolioPick> {
            let bits = index_to_bits(x, n);
            Ok(PortfolioPick {
                bitstring: format_index(x, n),
                probability: asset_probs[x],
                feasible: self.instance.is_feasible(&bits)?,
                value: self.instance.classical_objective(&bits)?,
            })
        };

        let mut top = 0;
        for (x, &p) in asset_probs.iter().enumerate() {
            if p > asset_probs[top] {
                top = x;
            }
        }
        let most_probable = pick(top)?;

        let mut best_feasible: Option<PortfolioPick> = None;
        let mut feasible_fraction = 0.0;
        for (x, &p) in asset_probs.iter().enumerate() {
            let candidate = pick(x)?;
            if !candidate.feasible {
                continue;
            }
            feasible_fraction += p;
            if p > REPORT_THRESHOLD && best_feasible.as_ref().is_none_or(|b| candidate.value < b.value) {
                best_feasible = Some(candidate);
            }
        }

        Ok(Summary {
            histogram,
            asset_histogram,
            most_probable,
            best_feasible,
            feasible_fraction,
            final_expectation: self.state.expectation(self.table)?,
            variance_bound: check_variance_bound(&self.state, self.instance)?,
        })
    }
}

struct Summary {
    histogram: BTreeMap<String, f64>,
    asset_histogram: BTreeMap<String, f64>,
    most_probable: PortfolioPick,
    best_feasible: Option<PortfolioPick>,
    feasible_fraction: f64,
    final_expectation: f64,
    variance_bound: BoundReport,
}

/// Slack-ancilla QAOA with the penalty-doubling schedule.
pub fn run_schedule(
    instance: &PortfolioInstance,
    config: &ScheduleConfig,
    p: usize,
    mixer: MixerKind,
    seed: u64,
) -> Result<ExperimentRecord> {
    run_schedule_with(Method::SlackAncillaQaoa, instance, config, p, mixer, seed)
}

/// Runs the schedule on any encoding. Angles carry over between penalty
/// levels; every `doubling_interval` evaluations the current best angles are
/// sampled and the penalty doubles unless the feasible fraction meets the
/// target.
pub fn run_schedule_with(
    method: Method,
    instance: &PortfolioInstance,
    config: &ScheduleConfig,
    p: usize,
    mixer_kind: MixerKind,
    seed: u64,
) -> Result<ExperimentRecord> {
    config.validate()?;
    if p == 0 {
        return Err(Error::InvalidParameter("depth p must be at least 1".into()));
    }
    let encoding = method.encoding();
    let initial = QaoaParams::random(p, &mut angle_rng(seed))?;
    let mut samples = sampling_rng(seed);

    let mut params = initial.clone();
    let mut beta = config.beta_penalty_init;
    let mut trace: Vec<TraceRow> = Vec::with_capacity(config.max_iterations);
    let (program, ansatz, termination, last_check) = loop {
        let program = encoding.build(instance, beta)?;
        let h = to_ising(&program);
        let ansatz = Ansatz::new(&h, Mixer::for_program(mixer_kind, &program))?;
        let block = config.doubling_interval.min(config.max_iterations - trace.len());

        let (best, _, values) = tune(&ansatz, &params, config.optimizer, block)?;
        params = best;
        for v in values {
            trace.push(TraceRow {
                iteration: trace.len() + 1,
                expectation: v,
                beta_penalty: beta,
                feasible_fraction: None,
            });
        }

        let state = ansatz.state(&params)?;
        let fraction =
            sampled_feasible_fraction(&state, instance, config.feasibility_shots, samples.next_u64())?;
        trace.last_mut().expect("block is nonempty").feasible_fraction = Some(fraction);

        if fraction >= config.feasibility_target {
            break (program, ansatz, Termination::FeasibilityReached, fraction);
        }
        if trace.len() >= config.max_iterations {
            break (program, ansatz, Termination::MaxIterations, fraction);
        }
        beta *= 2.0;
    };

    let summary =
        FinalState { instance, program: &program, state: ansatz.state(&params)?, table: ansatz.table() }
            .summarize()?;

    Ok(ExperimentRecord {
        method,
        optimizer: config.optimizer,
        mixer: mixer_kind,
        seed,
        num_qubits: program.num_vars(),
        initial_params: initial,
        final_params: params,
        final_beta_penalty: beta,
        final_expectation: summary.final_expectation,
        histogram: summary.histogram,
        asset_histogram: summary.asset_histogram,
        most_probable: summary.most_probable,
        best_feasible: summary.best_feasible,
        reported: Selection::BestFeasible,
        feasible_fraction: summary.feasible_fraction,
        sampled_feasible_fraction: Some(last_check),
        iterations_used: trace.len(),
        termination,
        objective_trace: trace.iter().map(|r| r.expectation).collect(),
        trace,
        variance_bound: summary.variance_bound,
    })
}

/// QAOA on a fixed-weight encoding, reporting the most probable portfolio.
#[allow(clippy::too_many_arguments)]
pub fn run_fixed_penalty(
    method: Method,
    instance: &PortfolioInstance,
    weight: f64,
    p: usize,
    budget: usize,
    optimizer: Optimizer,
    mixer_kind: MixerKind,
    seed: u64,
) -> Result<ExperimentRecord> {
    let program = method.encoding().build(instance, weight)?;
    let h = to_ising(&program);
    let mixer = Mixer::for_program(mixer_kind, &program);
    let search = optimize_angles(&h, p, &mixer, optimizer, budget, seed)?;
    let ansatz = Ansatz::new(&h, mixer)?;
    let summary = FinalState {
        instance,
        program: &program,
        state: ansatz.state(&search.params)?,
        table: ansatz.table(),
    }
    .summarize()?;

    let trace = search
        .trace
        .iter()
        .enumerate()
        .map(|(i, &v)| TraceRow {
            iteration: i + 1,
            expectation: v,
            beta_penalty: weight,
            feasible_fraction: None,
        })
        .collect();

    Ok(ExperimentRecord {
        method,
        optimizer,
        mixer: mixer_kind,
        seed,
        num_qubits: program.num_vars(),
        initial_params: search.initial,
        final_params: search.params,
        final_beta_penalty: weight,
        final_expectation: summary.final_expectation,
        histogram: summary.histogram,
        asset_histogram: summary.asset_histogram,
        most_probable: summary.most_probable,
        best_feasible: summary.best_feasible,
        reported: Selection::MostProbable,
        feasible_fraction: summary.feasible_fraction,
        sampled_feasible_fraction: None,
        iterations_used: search.trace.len(),
        termination: Termination::BudgetExhausted,
        objective_trace: search.trace,
        trace,
        variance_bound: summary.variance_bound,
    })
}

/// Standard QAOA on `build_penalty_qubo` with a fixed weight (no ancillas).
pub fn run_baseline_penalty_qaoa(
    instance: &PortfolioInstance,
    a_card: f64,
    p: usize,
    budget: usize,
    optimizer: Optimizer,
    seed: u64,
) -> Result<ExperimentRecord> {
    run_fixed_penalty(Method::PenaltyQaoa, instance, a_card, p, budget, optimizer, MixerKind::Standard, seed)
}
