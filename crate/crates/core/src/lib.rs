//! Quantum verifier reductions at desk scale.
//!
//! This crate implements two reductions from verifier-acceptance problems,
//! together with the simulation and spectral machinery needed to check every
//! bound they come with on small instances:
//!
//! - **Identity check on basis states**: a verifier circuit `U` is wrapped
//!   into `Z = U† R₂ U R₁` so that `Z` acts almost as the identity on every
//!   computational basis state exactly when no basis witness is accepted by
//!   `U` ([`idcheck`]).
//! - **Low-complexity low-energy states**: a verifier is compiled into a
//!   clock Hamiltonian whose ground space is reachable by a short preparation
//!   circuit exactly when the verifier accepts a basis witness ([`clock`]).
//!
//! Supporting layers: a small circuit IR with multi-controlled gates and a
//! text format ([`circuit`]), an exact statevector simulator ([`sim`]),
//! dense and matrix-free Hermitian eigensolvers ([`spectral`]), and seeded
//! instance generators for test corpora ([`random`]).
//!
//! Qubit 0 is always the least significant bit of a basis index.

pub mod circuit;
pub mod clock;
pub mod error;
pub mod idcheck;
pub mod limits;
pub mod random;
pub mod sim;
pub mod spectral;

pub use circuit::{Circuit, Gate, GateKind, VerifierSpec};
pub use clock::{ClockLayout, LocalHamiltonian, LocalTerm, LowEnergyInstance};
pub use error::Error;
pub use idcheck::{IdCheckInstance, ReductionParams, TheoremBounds};
pub use sim::StateVector;
pub use spectral::EigResult;
