//! Chance-constrained second-order cone optimal power flow.
//!
//! This crate implements an OPF pipeline built around the lifted-variable
//! second-order cone relaxation of the AC power flow equations:
//!
//! 1. [`network`] parses MATPOWER-style case files into a validated,
//!    per-unit network model.
//! 2. [`socopf`] builds the lifted SOC-OPF (variables `u = V²`,
//!    `c = V_i V_j cos θ_ij`, `s = −V_i V_j sin θ_ij`) and solves it with a
//!    sequential linearization of the angle-recovery constraint.
//! 3. [`sensitivity`] linearizes the alternative load flow equations at an
//!    operating point and derives the response of every state variable to
//!    wind deviations (linear decision rules).
//! 4. [`chance`] turns those sensitivities into deterministic uncertainty
//!    margins for Gaussian chance constraints, including the two-sided
//!    split of quadratic apparent-flow constraints.
//! 5. [`driver`] runs the outer iteration that alternates the tightened
//!    SOC-OPF with margin re-evaluation and critical-line screening.
//! 6. [`powerflow`] recovers an AC-feasible point from the relaxation
//!    solution (Newton-Raphson with reactive-limit enforcement).
//! 7. [`validation`] estimates empirical violation probabilities by
//!    Monte-Carlo power flow over sampled wind deviations.
//!
//! The conic subproblems go through the solver-agnostic IR in [`conic`],
//! backed by the Clarabel interior-point solver.

pub mod chance;
pub mod config;
pub mod conic;
pub mod driver;
pub mod error;
pub mod network;
pub mod powerflow;
pub mod sensitivity;
pub mod socopf;
pub mod validation;

pub use error::{CcopfError, Result};
pub use network::{Branch, Bus, BusKind, Generator, NetworkCase, WindFarm};
