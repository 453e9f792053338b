//! Exact and asymptotic gap probabilities for the thinned circular unitary
//! ensemble, the conditional eigenvalue process, and its two-arc
//! equilibrium problem.

pub mod asymptotics;
pub mod conditional;
pub mod equilibrium;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod opuc;
pub mod parametrix;
pub mod symbol;

pub use error::{Error, Result};
