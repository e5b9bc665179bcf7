//! Slack-ancilla QAOA for cardinality- and threshold-constrained Markowitz
//! portfolio selection.
//!
//! The crate builds penalized QUBOs for a binary portfolio problem, maps them
//! exactly onto diagonal Ising Hamiltonians, evolves the QAOA ansatz on a
//! dense statevector and tunes its angles with a derivative-free optimizer
//! under a penalty-doubling feasibility schedule. Exhaustive oracles and a
//! classical relaxation baseline provide the ground truth.

pub mod bits;
pub mod bounds;
pub mod encode;
pub mod error;
pub mod instance;
pub mod optim;
pub mod oracle;
pub mod qaoa;
pub mod simulate;

pub use encode::{to_ising, Encoding, IsingHamiltonian, QuboProgram, VarLabel};
pub use error::{Error, Result};
pub use instance::{generate_instance, PortfolioInstance};
pub use num_complex::Complex64;
pub use optim::Optimizer;
pub use simulate::{EnergyTable, StateVector};
