//! Power allocation for a single-mode bosonic multiple-access channel that
//! jointly serves over-the-air computation (OAC) devices and classical
//! communication devices.
//!
//! The library minimizes the LMMSE distortion of the computed sum of the OAC
//! symbols subject to a quantum sum-rate constraint on the communication
//! devices, using alternating optimization: a closed-form receive-coefficient
//! update, a one-dimensional bisection for the aggregate communication power,
//! and a projected-gradient refinement of the OAC powers. A seeded Monte-Carlo
//! simulator of the equivalent classical channel provides an independent
//! empirical MSE estimate for validation.

pub mod cli;
pub mod config;
pub mod entropy;
pub mod error;
pub mod estimator;
pub mod oracle;
pub mod projgrad;
pub mod rootfind;
pub mod solver;

pub use error::QiccError;
pub use estimator::{Allocation, Scenario};
pub use solver::{ConvergenceTrace, Solution, SolverParams};
