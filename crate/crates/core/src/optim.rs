//! Derivative-free minimizers with a hard evaluation budget.
//!
//! One "iteration" is one objective evaluation. [`minimize`] always spends its
//! whole budget: when the inner method converges early it is restarted from
//! the best point found so far, so callers can schedule work on a fixed
//! evaluation cadence.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    /// Linear-approximation trust region (COBYLA).
    #[default]
    Cobyla,
    NelderMead,
}

impl std::fmt::Display for Optimizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Optimizer::Cobyla => "cobyla",
            Optimizer::NelderMead => "nelder-mead",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub best_x: Vec<f64>,
    pub best_value: f64,
    /// Objective value of every evaluation, in order.
    pub trace: Vec<f64>,
}

impl OptimizeOutcome {
    pub fn evaluations(&self) -> usize {
        self.trace.len()
    }
}

/// Bookkeeping shared by both methods: counts evaluations and tracks the best.
struct Recorder<F> {
    objective: F,
    budget: usize,
    trace: Vec<f64>,
    best_x: Vec<f64>,
    best_value: f64,
}

impl<F: FnMut(&[f64]) -> f64> Recorder<F> {
    fn exhausted(&self) -> bool {
        self.trace.len() >= self.budget
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        let v = (self.objective)(x);
        self.trace.push(v);
        // NaN never wins
        if v < self.best_value || self.best_value.is_nan() && !v.is_nan() {
            self.best_value = v;
            self.best_x.clear();
            self.best_x.extend_from_slice(x);
        }
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Minimizes `objective` from `x0` using exactly `budget` evaluations.
///
/// `bounds`, when given, is a box the iterates are kept inside. `step` is the
/// initial exploration radius.
pub fn minimize<F>(
    optimizer: Optimizer,
    objective: F,
    x0: &[f64],
    bounds: Option<&[(f64, f64)]>,
    step: f64,
    budget: usize,
) -> OptimizeOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let x0 = match bounds {
        Some(b) => project(x0, b),
        None => x0.to_vec(),
    };
    let mut rec = Recorder {
        objective,
        budget,
        trace: Vec::with_capacity(budget),
        best_x: x0.clone(),
        best_value: f64::NAN,
    };
    while !rec.exhausted() {
        let before = rec.trace.len();
        let start = rec.best_x.clone();
        match optimizer {
            Optimizer::NelderMead => nelder_mead(&mut rec, &start, bounds, step),
            Optimizer::Cobyla => cobyla_run(&mut rec, &start, bounds, step),
        }
        if rec.trace.len() == before {
            break;
        }
    }
    OptimizeOutcome { best_x: rec.best_x, best_value: rec.best_value, trace: rec.trace }
}

fn project(x: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter().zip(bounds).map(|(&v, &(lo, hi))| v.clamp(lo, hi)).collect()
}

fn cobyla_run<F: FnMut(&[f64]) -> f64>(
    rec: &mut Recorder<F>,
    start: &[f64],
    bounds: Option<&[(f64, f64)]>,
    step: f64,
) {
    let remaining = rec.budget - rec.trace.len();
    let dim = start.len();
    let unbounded = vec![(f64::NEG_INFINITY, f64::INFINITY); dim];
    let bounds = bounds.unwrap_or(&unbounded);
    let shared = RefCell::new(rec);
    let func = |x: &[f64], _: &mut ()| {
        let mut r = shared.borrow_mut();
        if r.exhausted() {
            // cobyla honours maxeval; this only guards the contract
            return f64::INFINITY;
        }
        r.eval(x)
    };
    let cons: Vec<&dyn cobyla::Func<()>> = Vec::new();
    // Outcome ignored: the recorder already holds the best point.
    let _ = cobyla::minimize(func, start, bounds, &cons, (), remaining, cobyla::RhoBeg::All(step), None);
}

const NM_REFLECT: f64 = 1.0;
const NM_EXPAND: f64 = 2.0;
const NM_CONTRACT: f64 = 0.5;
const NM_SHRINK: f64 = 0.5;
const NM_FTOL: f64 = 1e-12;
const NM_XTOL: f64 = 1e-10;

/// Nelder-Mead on an axis-aligned start simplex of edge `step`. Returns when
/// the budget runs out or the simplex collapses.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    rec: &mut Recorder<F>,
    start: &[f64],
    bounds: Option<&[(f64, f64)]>,
    step: f64,
) {
    let dim = start.len();
    let fit = |x: Vec<f64>| match bounds {
        Some(b) => project(&x, b),
        None => x,
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    for i in 0..=dim {
        if rec.exhausted() {
            return;
        }
        let mut x = start.to_vec();
        if i > 0 {
            x[i - 1] += step;
            // push inward when the box clips the vertex onto the start point
            if let Some(b) = bounds {
                if x[i - 1] > b[i - 1].1 {
                    x[i - 1] = start[i - 1] - step;
                }
            }
        }
        let x = fit(x);
        let f = rec.eval(&x);
        simplex.push((x, f));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        let extent = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.abs() <= NM_FTOL && extent <= NM_XTOL || rec.exhausted() {
            return;
        }

        let centroid: Vec<f64> =
            (0..dim).map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            fit(centroid.iter().zip(&simplex[dim].0).map(|(c, w)| c + t * (c - w)).collect())
        };

        let xr = along(NM_REFLECT);
        let fr = rec.eval(&xr);
        if fr < simplex[0].1 {
            if rec.exhausted() {
                simplex[dim] = (xr, fr);
                return;
            }
            let xe = along(NM_EXPAND);
            let fe = rec.eval(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        if rec.exhausted() {
            return;
        }
        let (xc, fc) = if fr < simplex[dim].1 {
            let xc = along(NM_REFLECT * NM_CONTRACT);
            let fc = rec.eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-NM_CONTRACT);
            let fc = rec.eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(simplex[dim].1) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if rec.exhausted() {
                return;
            }
            let x = fit(best.iter().zip(&vertex.0).map(|(b, v)| b + NM_SHRINK * (v - b)).collect());
            let f = rec.eval(&x);
            *vertex = (x, f);
        }
    }
}
