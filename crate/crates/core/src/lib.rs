//! Simulation and exhaustive verification of graph-state distribution by a
//! phase quantum walk.
//!
//! Every party holds one data qubit and, for each incident network edge, one
//! half of a pre-shared two-qubit graph state. A controlled-phase walk step
//! followed by a measurement of the resource halves leaves the data qubits in
//! the target graph state up to a local Pauli correction, which this crate
//! computes, applies and verifies on a dense state-vector engine and on a
//! stabilizer tableau.

pub mod error;
pub mod graphs;
pub mod noise;
pub mod protocol;
pub mod stabilizer;
pub mod statevector;
pub mod verify;

pub use error::{Error, Result};
