//! Truncated Wigner simulation of permutation-invariant emitter ensembles
//! with local dissipation, together with exact reference solvers.

pub mod amplitude;
pub mod calibration;
pub mod chain;
pub mod cli;
pub mod error;
pub mod exact;
pub mod hamiltonian;
pub mod model;
pub mod phasespace;
pub mod observables;
pub mod twa;
