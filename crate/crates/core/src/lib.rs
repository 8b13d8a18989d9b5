//! Numerical models of how measurement-like entanglement affects quantum motion.
//!
//! The crate covers survival probabilities and their behaviour under repeated
//! checks ([`unitary`]), measurement modelled as entanglement with a pointer
//! ([`vnmeasure`]), continuously monitored two-state and many-state systems
//! ([`apparatus`]), position-space decoherence master equations ([`spatial`]),
//! interaction-free interrogation ([`ifm`]) and classical rate equations
//! ([`ratekin`]). Units are ħ = 1 unless a function says otherwise.

pub mod apparatus;
pub mod error;
pub mod fit;
pub mod ifm;
pub mod qstate;
pub mod ratekin;
pub mod spatial;
pub mod table;
pub mod unitary;
pub mod vnmeasure;

pub use error::{Error, Result};
pub use qstate::{CMatrix, DensityMatrix, NumericPolicy, StateVector, C64};
pub use table::Table;
pub use unitary::Hamiltonian;
