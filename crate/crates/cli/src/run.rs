//! Executes one (instance, method, seed) cell and packages the result.

use std::collections::BTreeMap;

use anyhow::Result;
use qmarko::bits::{format_bits, format_index};
use qmarko::bounds::BoundReport;
use qmarko::oracle::{classical_baseline, exhaustive_portfolio_optimum, BaselineResult};
use qmarko::qaoa::{run_fixed_penalty, run_schedule_with, ExperimentRecord, Method, MixerKind};
use qmarko::PortfolioInstance;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    SlackQaoa,
    PenaltyQaoa,
    CardinalitySlackQaoa,
    Oracle,
    ClassicalBaseline,
}

impl SolveMethod {
    pub fn name(self) -> &'static str {
        match self {
            SolveMethod::SlackQaoa => "slack-qaoa",
            SolveMethod::PenaltyQaoa => "penalty-qaoa",
            SolveMethod::CardinalitySlackQaoa => "cardinality-slack-qaoa",
            SolveMethod::Oracle => "oracle",
            SolveMethod::ClassicalBaseline => "classical-baseline",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        <Self as clap::ValueEnum>::from_str(s, false).ok()
    }
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The portfolio a method reports, as shown in the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portfolio {
    pub bitstring: String,
    pub feasible: bool,
    pub value: f64,
}

/// Contents of `record.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: SolveMethod,
    pub seed: u64,
    /// `None` when the method produced no feasible candidate to report.
    pub portfolio: Option<Portfolio>,
    pub iterations: usize,
    /// Asset-bit distribution of the method's output, asset 0 first.
    pub histogram: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_bound: Option<BoundReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qaoa: Option<ExperimentRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<BaselineResult>,
}

impl RunRecord {
    pub fn found_feasible(&self) -> bool {
        self.portfolio.as_ref().is_some_and(|p| p.feasible)
    }

    /// Trace rows as `(iteration, expectation, beta_penalty, feasible_fraction)`.
    pub fn trace_rows(&self) -> Vec<(usize, f64, f64, Option<f64>)> {
        if let Some(q) = &self.qaoa {
            return q
                .trace
                .iter()
                .map(|r| (r.iteration, r.expectation, r.beta_penalty, r.feasible_fraction))
                .collect();
        }
        if let Some(c) = &self.classical {
            return c.trace.iter().enumerate().map(|(i, &v)| (i + 1, v, c.beta_penalty, None)).collect();
        }
        Vec::new()
    }
}

fn delta_histogram(bits: &str) -> BTreeMap<String, f64> {
    BTreeMap::from([(bits.to_string(), 1.0)])
}

pub fn apply_weights(instance: &mut PortfolioInstance, cfg: &RunConfig) {
    if let Some(l) = cfg.lambda {
        instance.lambda_weight = l;
    }
    if let Some(q) = cfg.q {
        instance.q_risk = q;
    }
}

fn from_qaoa(method: SolveMethod, rec: ExperimentRecord) -> RunRecord {
    let portfolio = rec.reported_portfolio().map(|p| Portfolio {
        bitstring: p.bitstring.clone(),
        feasible: p.feasible,
        value: p.value,
    });
    RunRecord {
        method,
        seed: rec.seed,
        portfolio,
        iterations: rec.iterations_used,
        histogram: rec.asset_histogram.clone(),
        variance_bound: Some(rec.variance_bound),
        qaoa: Some(rec),
        classical: None,
    }
}

pub fn solve(instance: &PortfolioInstance, method: SolveMethod, cfg: &RunConfig) -> Result<RunRecord> {
    let seed = cfg.seed;
    let record = match method {
        SolveMethod::SlackQaoa => from_qaoa(
            method,
            run_schedule_with(Method::SlackAncillaQaoa, instance, &cfg.schedule(), cfg.p, cfg.mixer, seed)?,
        ),
        SolveMethod::CardinalitySlackQaoa => from_qaoa(
            method,
            run_schedule_with(
                Method::CardinalitySlackQaoa,
                instance,
                &cfg.schedule(),
                cfg.p,
                cfg.mixer,
                seed,
            )?,
        ),
        SolveMethod::PenaltyQaoa => from_qaoa(
            method,
            run_fixed_penalty(
                Method::PenaltyQaoa,
                instance,
                cfg.penalty,
                cfg.p,
                cfg.max_iter,
                cfg.optimizer,
                MixerKind::Standard,
                seed,
            )?,
        ),
        SolveMethod::Oracle => {
            let (bits, value) = exhaustive_portfolio_optimum(instance);
            let bitstring = format_bits(&bits);
            RunRecord {
                method,
                seed,
                portfolio: Some(Portfolio { bitstring: bitstring.clone(), feasible: true, value }),
                iterations: 1 << instance.n,
                histogram: delta_histogram(&bitstring),
                variance_bound: None,
                qaoa: None,
                classical: None,
            }
        }
        SolveMethod::ClassicalBaseline => {
            let r = classical_baseline(instance, cfg.beta_init, cfg.max_iter, cfg.optimizer, seed)?;
            RunRecord {
                method,
                seed,
                portfolio: Some(Portfolio {
                    bitstring: r.bitstring.clone(),
                    feasible: r.feasible,
                    value: r.value,
                }),
                iterations: r.iterations,
                histogram: delta_histogram(&r.bitstring),
                variance_bound: None,
                qaoa: None,
                classical: Some(r),
            }
        }
    };
    Ok(record)
}

/// Every asset bitstring with its probability (zeros included), in index order.
pub fn full_histogram(record: &RunRecord, n: usize) -> Vec<(String, f64)> {
    (0..1usize << n)
        .map(|x| {
            let key = format_index(x, n);
            let p = record.histogram.get(&key).copied().unwrap_or(0.0);
            (key, p)
        })
        .collect()
}
