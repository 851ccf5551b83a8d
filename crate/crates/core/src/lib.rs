//! Numerical laboratory for detecting weak incoherent signals mixed into an
//! unknown noise background.
//!
//! The library is organised around a single detection problem: given many
//! copies of a state `(1 - theta) rho_n + theta rho_s`, decide whether the
//! mixing parameter `theta` is zero or equals a small known value `theta0`.
//! The modules provide
//!
//! - [`statemodel`]: density matrices, sensing scenarios, and the reduced
//!   signal constructions (Kraus and Lindblad short-time forms),
//! - [`divergence`]: exact and perturbative information quantities plus the
//!   asymptotic sample-complexity calculator,
//! - [`schurwss`]: classically simulated weak Schur sampling, the rank /
//!   purity / spectral-gap / hybrid tests, and the small-instance Schur
//!   projector machinery with the permutation-plus-Haar twirl,
//! - [`dmeqsp`]: the eigenvalue-filter model of the DME-QSP channel and its
//!   Bernoulli flag statistics,
//! - [`harness`]: seeded Monte Carlo estimation of type-1/type-2 errors,
//!   sample-complexity search, and scaling-law fits.
//!
//! Everything is deterministic given the master seed; per-trial seeds are
//! derived with [`seeding::derive_seed`].

pub mod divergence;
pub mod dmeqsp;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod schurwss;
pub mod seeding;
pub mod statemodel;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Outcome of a binary hypothesis test: `H0` keeps the null (no signal),
/// `H1` declares the signal present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    H0,
    H1,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::H0 => write!(f, "H0"),
            Decision::H1 => write!(f, "H1"),
        }
    }
}

/// Eigenvalues below this threshold (relative to unit trace) are treated as
/// zero when determining supports and ranks. Separates genuine zeros from
/// eigensolver noise at the dimensions this crate targets.
pub const RANK_TOL: f64 = 1e-9;
