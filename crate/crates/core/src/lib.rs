//! Weight-based coherence: the coherence weight of finite-dimensional quantum
//! states, its best incoherent approximation with certified duality gaps, the
//! closed-form qubit solution, projector-subtraction rules and mixed
//! maximally coherent states.

pub mod error;
pub mod hermitian;
pub mod mmcs;
pub mod qubit;
pub mod states;
pub mod weight;

pub use error::{Error, Result};
pub use hermitian::{ComplexMatrix, C64};
pub use states::DensityMatrix;
pub use weight::{coherence_weight, solve, BfaDecomposition, DualWitness, SolverConfig};
