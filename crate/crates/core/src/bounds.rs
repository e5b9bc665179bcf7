//! Risk and return observables and the commuting-limit variance bound.
//!
//! Both observables are diagonal in the computational basis, so for any state
//! the pair `(R, M)` is a classical random variable under the Born
//! distribution and `Var(R) Var(M) >= Cov(R, M)^2` is Cauchy-Schwarz.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::instance::PortfolioInstance;
use crate::simulate::{marginalize, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalObservable {
    num_qubits: usize,
    values: Vec<f64>,
}

impl DiagonalObservable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidDimension(format!("{len} values is not a power of two")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("value {i} is not finite")));
        }
        Ok(Self { num_qubits: len.trailing_zeros() as usize, values })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Extends the observable to `total` qubits; the extra qubits are ignored.
    pub fn lift(&self, total: usize) -> Result<Self> {
        if total < self.num_qubits {
            return Err(Error::InvalidDimension(format!(
                "cannot lift {} qubits onto {total}",
                self.num_qubits
            )));
        }
        let mask = (1usize << self.num_qubits) - 1;
        Ok(Self { num_qubits: total, values: (0..1usize << total).map(|x| self.values[x & mask]).collect() })
    }
}

fn spin(x: usize, i: usize) -> f64 {
    if (x >> i) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `R = sum_{i<j} Sigma_ij Z_i Z_j + sum_i Sigma_ii Z_i` on the asset qubits.
pub fn risk_observable(instance: &PortfolioInstance) -> DiagonalObservable {
    let n = instance.n;
    let values = (0..1usize << n)
        .map(|x| {
            let mut v = 0.0;
            for i in 0..n {
                v += instance.sigma[i][i] * spin(x, i);
                for j in i + 1..n {
                    v += instance.sigma[i][j] * spin(x, i) * spin(x, j);
                }
            }
            v
        })
        .collect();
    DiagonalObservable { num_qubits: n, values }
}

/// `M = sum_i mu_i Z_i` on the asset qubits.
pub fn return_observable(instance: &PortfolioInstance) -> DiagonalObservable {
    let n = instance.n;
    let values = (0..1usize << n).map(|x| (0..n).map(|i| instance.mu[i] * spin(x, i)).sum()).collect();
    DiagonalObservable { num_qubits: n, values }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub cov_ab: f64,
}

impl Moments {
    /// `var_a * var_b - cov_ab^2`.
    pub fn slack(&self) -> f64 {
        self.var_a * self.var_b - self.cov_ab * self.cov_ab
    }
}

/// Moments of two diagonal observables under a probability vector.
pub fn distribution_moments(
    probs: &[f64],
    a: &DiagonalObservable,
    b: &DiagonalObservable,
) -> Result<Moments> {
    check_len(probs.len(), a.values.len())?;
    check_len(probs.len(), b.values.len())?;
    let (mut ea, mut eb, mut eaa, mut ebb, mut eab) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&p, &va), &vb) in probs.iter().zip(&a.values).zip(&b.values) {
        ea += p * va;
        eb += p * vb;
        eaa += p * va * va;
        ebb += p * vb * vb;
        eab += p * va * vb;
    }
    Ok(Moments { mean_a: ea, mean_b: eb, var_a: eaa - ea * ea, var_b: ebb - eb * eb, cov_ab: eab - ea * eb })
}

pub fn moments(state: &StateVector, a: &DiagonalObservable, b: &DiagonalObservable) -> Result<Moments> {
    check_len(state.num_qubits(), a.num_qubits)?;
    check_len(state.num_qubits(), b.num_qubits)?;
    distribution_moments(&state.probabilities(), a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mean_r: f64,
    pub mean_m: f64,
    pub var_r: f64,
    pub var_m: f64,
    pub std_r: f64,
    pub std_m: f64,
    pub cov: f64,
    /// `var_r * var_m - cov^2`; nonnegative up to rounding.
    pub slack: f64,
}

/// Evaluates the risk/return variance bound for `state`, whose first `n`
/// qubits are the assets. Any further qubits are marginalized away.
pub fn check_variance_bound(state: &StateVector, instance: &PortfolioInstance) -> Result<BoundReport> {
    let n = instance.n;
    if state.num_qubits() < n {
        return Err(Error::DimensionMismatch { expected: n, found: state.num_qubits() });
    }
    let assets: Vec<usize> = (0..n).collect();
    let probs = marginalize(&state.probabilities(), &assets);
    let m = distribution_moments(&probs, &risk_observable(instance), &return_observable(instance))?;
    Ok(BoundReport {
        mean_r: m.mean_a,
        mean_m: m.mean_b,
        var_r: m.var_a,
        var_m: m.var_b,
        std_r: m.var_a.max(0.0).sqrt(),
        std_m: m.var_b.max(0.0).sqrt(),
        cov: m.cov_ab,
        slack: m.slack(),
    })
}
