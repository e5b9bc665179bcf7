//! Constrained Markowitz portfolio instances.
//!
//! An instance selects a binary portfolio `omega` over `n` assets. The
//! objective is `q * omega' Sigma omega - lambda * mu' omega`; a portfolio is
//! feasible when it respects the per-asset threshold mask (`omega_i <= alpha_i`)
//! and holds at most `k` assets.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{check_binary, check_len, Error, Result};

pub const GENERATOR_VERSION: &str = "qmarko-instance/1";
pub const SIGMA_CONVENTION: &str =
    "sigma = L L^T, L lower-triangular with i.i.d. Normal(mean 0, standard deviation 0.05) entries";

pub const MU_RANGE: (f64, f64) = (0.01, 0.10);
pub const L_ENTRY_STD_DEV: f64 = 0.05;
pub const DEFAULT_LAMBDA: f64 = 1.0;
pub const DEFAULT_Q_RISK: f64 = 0.5;
const PSD_TOLERANCE: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    pub generator_version: String,
    pub sigma_entry_convention: String,
}

impl InstanceMetadata {
    fn generated() -> Self {
        Self {
            generator_version: GENERATOR_VERSION.to_string(),
            sigma_entry_convention: SIGMA_CONVENTION.to_string(),
        }
    }

    fn manual() -> Self {
        Self { generator_version: "manual".to_string(), sigma_entry_convention: "user supplied".to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioInstance {
    pub n: usize,
    pub k: usize,
    pub mu: Vec<f64>,
    /// Row-major `n x n` covariance.
    pub sigma: Vec<Vec<f64>>,
    /// Per-asset allocation caps. Generated instances use a 0/1 mask.
    pub alpha: Vec<f64>,
    #[serde(rename = "lambda")]
    pub lambda_weight: f64,
    #[serde(rename = "q")]
    pub q_risk: f64,
    pub seed: u64,
    pub metadata: InstanceMetadata,
}

/// Samples an instance: `mu_i ~ U[0.01, 0.10]`, `sigma = L L^T` and a uniformly
/// random `k`-hot threshold mask. The same `(n, k, seed)` always yields the
/// same instance.
pub fn generate_instance(n: usize, k: usize, seed: u64) -> Result<PortfolioInstance> {
    check_cardinality(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mu_dist = Uniform::new_inclusive(MU_RANGE.0, MU_RANGE.1);
    let mu: Vec<f64> = (0..n).map(|_| mu_dist.sample(&mut rng)).collect();

    let normal = Normal::new(0.0, L_ENTRY_STD_DEV).expect("finite std dev");
    let mut lower = vec![vec![0.0; n]; n];
    for (i, row) in lower.iter_mut().enumerate() {
        for entry in row.iter_mut().take(i + 1) {
            *entry = normal.sample(&mut rng);
        }
    }
    let sigma = gram_lower(&lower);

    let mut alpha = vec![0.0; n];
    for i in sample(&mut rng, n, k) {
        alpha[i] = 1.0;
    }

    Ok(PortfolioInstance {
        n,
        k,
        mu,
        sigma,
        alpha,
        lambda_weight: DEFAULT_LAMBDA,
        q_risk: DEFAULT_Q_RISK,
        seed,
        metadata: InstanceMetadata::generated(),
    })
}

/// `L L^T`, written so that entry `(i, j)` and `(j, i)` are the same float.
fn gram_lower(lower: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = lower.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = (0..=j).map(|t| lower[i][t] * lower[j][t]).sum();
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

fn check_cardinality(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidDimension(format!("k = {k} must lie in [1, {n}]")));
    }
    Ok(())
}

impl PortfolioInstance {
    /// Builds an instance from explicit data with the default trade-off
    /// weights. Thresholds may be fractional.
    pub fn new(mu: Vec<f64>, sigma: Vec<Vec<f64>>, alpha: Vec<f64>, k: usize) -> Result<Self> {
        let inst = Self {
            n: mu.len(),
            k,
            mu,
            sigma,
            alpha,
            lambda_weight: DEFAULT_LAMBDA,
            q_risk: DEFAULT_Q_RISK,
            seed: 0,
            metadata: InstanceMetadata::manual(),
        };
        inst.check_dimensions()?;
        Ok(inst)
    }

    pub fn with_weights(mut self, lambda_weight: f64, q_risk: f64) -> Self {
        self.lambda_weight = lambda_weight;
        self.q_risk = q_risk;
        self
    }

    /// Structural checks that must hold before any evaluation makes sense.
    pub fn check_dimensions(&self) -> Result<()> {
        check_cardinality(self.n, self.k)?;
        check_len(self.n, self.mu.len())?;
        check_len(self.n, self.alpha.len())?;
        check_len(self.n, self.sigma.len())?;
        for row in &self.sigma {
            check_len(self.n, row.len())?;
        }
        Ok(())
    }

    /// `omega' Sigma omega`.
    pub fn risk(&self, omega: &[u8]) -> Result<f64> {
        self.check_portfolio(omega)?;
        let mut acc = 0.0;
        for (i, &wi) in omega.iter().enumerate() {
            if wi == 0 {
                continue;
            }
            for (j, &wj) in omega.iter().enumerate() {
                if wj == 1 {
                    acc += self.sigma[i][j];
                }
            }
        }
        Ok(acc)
    }

    /// `mu' omega`.
    pub fn expected_return(&self, omega: &[u8]) -> Result<f64> {
        self.check_portfolio(omega)?;
        Ok(omega.iter().zip(&self.mu).filter(|(&w, _)| w == 1).map(|(_, m)| m).sum())
    }

    pub fn classical_objective(&self, omega: &[u8]) -> Result<f64> {
        Ok(self.q_risk * self.risk(omega)? - self.lambda_weight * self.expected_return(omega)?)
    }

    pub fn is_feasible(&self, omega: &[u8]) -> Result<bool> {
        self.check_portfolio(omega)?;
        let within_caps = omega.iter().zip(&self.alpha).all(|(&w, &a)| f64::from(w) <= a);
        let held = omega.iter().filter(|&&w| w == 1).count();
        Ok(within_caps && held <= self.k)
    }

    fn check_portfolio(&self, omega: &[u8]) -> Result<()> {
        check_len(self.n, omega.len())?;
        check_binary(omega)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if let Err(e) = self.check_dimensions() {
            report.push("dimensions", false, e.to_string());
            return report;
        }
        report.push("dimensions", true, format!("n = {}, k = {}", self.n, self.k));

        let mut worst = (0.0f64, 0, 0);
        for i in 0..self.n {
            for j in 0..self.n {
                let d = (self.sigma[i][j] - self.sigma[j][i]).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        report.push(
            "sigma_symmetric",
            worst.0 == 0.0,
            if worst.0 == 0.0 {
                "exactly symmetric".to_string()
            } else {
                format!("|sigma[{}][{}] - sigma[{}][{}]| = {:e}", worst.1, worst.2, worst.2, worst.1, worst.0)
            },
        );

        let min_eig = self.min_sigma_eigenvalue();
        report.push("sigma_psd", min_eig >= PSD_TOLERANCE, format!("minimum eigenvalue {min_eig:e}"));

        let mu_ok = self.mu.iter().all(|m| (MU_RANGE.0..=MU_RANGE.1).contains(m));
        report.push("mu_range", mu_ok, format!("expected returns within [{}, {}]", MU_RANGE.0, MU_RANGE.1));

        let ones = self.alpha.iter().filter(|&&a| a == 1.0).count();
        let zeros = self.alpha.iter().filter(|&&a| a == 0.0).count();
        report.push(
            "alpha_k_hot",
            ones == self.k && zeros == self.n - self.k,
            format!("{ones} ones, {zeros} zeros, k = {}", self.k),
        );
        report
    }

    /// Smallest eigenvalue of the symmetric part of sigma.
    pub fn min_sigma_eigenvalue(&self) -> f64 {
        let n = self.n;
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (self.sigma[i][j] + self.sigma[j][i]));
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Bit-for-bit stable JSON: floats use the shortest representation that
    /// parses back to the same `f64`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, InstanceParseError> {
        let inst: Self = serde_json::from_str(text)?;
        inst.check_dimensions()?;
        Ok(inst)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceParseError {
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("inconsistent instance: {0}")]
    Shape(#[from] Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check { name, passed, detail });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
