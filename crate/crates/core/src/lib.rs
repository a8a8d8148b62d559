//! Simulation and verification toolkit for n-to-1 entanglement purification
//! protocols: bilocal Clifford protocols on Bell-diagonal inputs, their
//! universality conditions, exhaustive searches over small Clifford groups,
//! and the Choi-operator analysis of the PPT universal protocol.

pub mod bicep;
pub mod choi;
pub mod cli;
pub mod clifford;
pub mod error;
pub mod exec;
pub mod pauli;
pub mod states;
pub mod universality;

pub use clifford::{CliffordTableau, Gate, GateSequence};
pub use error::{Error, Result};
pub use exec::Exec;
pub use pauli::{Pauli, PauliString, StringClass, StringKind};
pub use states::{BellDiagonalState, DensityMatrix, WeightTable};
