//! Low-lying states of the one-electron two-center Coulomb problem.
//!
//! The library builds compact trial wavefunctions in prolate spheroidal
//! coordinates, optimizes them variationally, measures their quality with a
//! perturbation theory constructed around them, cross-checks energies against
//! an independent eigenvalue solver, and evaluates radiative transition
//! strengths between the resulting states.

pub mod constants;
pub mod error;
pub mod model;
pub mod nonlinearization;
pub mod oracle;
pub mod quadrature;
pub mod reproduce;
pub mod roots;
pub mod simplex;
pub mod summation;
pub mod transitions;
pub mod trialfn;
pub mod united_atom;
pub mod variational;

pub use error::{Error, Result};
pub use model::{EnergyPair, Parity, PhysicalSetup, SeparatedState, StateLabel};
pub use trialfn::TrialParams;
