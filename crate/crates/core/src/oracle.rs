//! Ground truth by enumeration, plus the classical relaxation baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{format_bits, index_to_bits};
use crate::encode::{build_slack_ancilla_qubo, QuboProgram};
use crate::error::{Error, Result};
use crate::instance::PortfolioInstance;
use crate::optim::{minimize, Optimizer};

pub const MAX_ENUMERATION_BITS: usize = 24;
const RELAXATION_STEP: f64 = 0.25;

/// Best feasible portfolio by full enumeration. Ties go to the lowest basis
/// index (asset 0 least significant). The empty portfolio is always feasible,
/// so a result always exists.
pub fn exhaustive_portfolio_optimum(instance: &PortfolioInstance) -> (Vec<u8>, f64) {
    let n = instance.n;
    assert!(n <= MAX_ENUMERATION_BITS, "{n} assets is too many to enumerate");
    let mut best = (vec![0; n], 0.0);
    let mut found = false;
    for x in 0..1usize << n {
        let w = index_to_bits(x, n);
        if !instance.is_feasible(&w).expect("length n") {
            continue;
        }
        let v = instance.classical_objective(&w).expect("length n");
        if !found || v < best.1 {
            best = (w, v);
            found = true;
        }
    }
    best
}

/// Global QUBO minimum by enumeration, lowest index on ties.
pub fn exhaustive_qubo_minimum(program: &QuboProgram) -> (Vec<u8>, f64) {
    let m = program.num_vars();
    assert!(m <= MAX_ENUMERATION_BITS, "{m} variables is too many to enumerate");
    let mut best = (vec![0; m], f64::INFINITY);
    for x in 0..1usize << m {
        let bits = index_to_bits(x, m);
        let e = program.qubo_energy(&bits).expect("length m");
        if e < best.1 {
            best = (bits, e);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    /// Relaxed optimum over `[0, 1]^(2n)`: assets then slacks.
    pub relaxed: Vec<f64>,
    pub relaxed_energy: f64,
    /// Every variable rounded at 0.5.
    pub rounded: String,
    /// Asset part of `rounded`.
    pub bitstring: String,
    pub feasible: bool,
    pub value: f64,
    pub iterations: usize,
    /// Relaxed objective at every evaluation.
    pub trace: Vec<f64>,
    pub beta_penalty: f64,
    pub optimizer: Optimizer,
    pub protocol: String,
}

/// Classical baseline: minimize the slack-ancilla penalized objective over the
/// box `[0, 1]^(2n)` from a seeded start, then round each coordinate at 0.5.
pub fn classical_baseline(
    instance: &PortfolioInstance,
    beta_penalty: f64,
    budget: usize,
    optimizer: Optimizer,
    seed: u64,
) -> Result<BaselineResult> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    let program = build_slack_ancilla_qubo(instance, beta_penalty)?;
    let m = program.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
    let bounds = vec![(0.0, 1.0); m];
    let outcome = minimize(
        optimizer,
        |x: &[f64]| program.relaxed_energy(x).unwrap_or(f64::NAN),
        &x0,
        Some(&bounds),
        RELAXATION_STEP,
        budget,
    );

    let rounded: Vec<u8> = outcome.best_x.iter().map(|&v| u8::from(v >= 0.5)).collect();
    let assets = &rounded[..instance.n];
    Ok(BaselineResult {
        relaxed_energy: outcome.best_value,
        relaxed: outcome.best_x,
        rounded: format_bits(&rounded),
        bitstring: format_bits(assets),
        feasible: instance.is_feasible(assets)?,
        value: instance.classical_objective(assets)?,
        iterations: outcome.trace.len(),
        trace: outcome.trace,
        beta_penalty,
        optimizer,
        protocol: "continuous relaxation of the slack-ancilla penalized QUBO over [0,1]^(2n), \
                   each variable rounded at 0.5"
            .to_string(),
    })
}
