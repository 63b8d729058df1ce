//! Core algorithms for hard-core interacting-particle continuous-time Markov
//! chains, as they appear in dissipative Rydberg gases and CSMA random-access
//! networks.
//!
//! Particles sit on an interference graph and flip between ground (0) and
//! excited (1); a particle can only excite while none of its neighbors is
//! excited. The crate provides:
//!
//! - [`graph`]: interference graphs from geometry or canonical topologies;
//! - [`statespace`]: exact enumeration of the feasible (independent-set)
//!   configurations and the dominant (maximum independent set) ones;
//! - [`equilibrium`]: the product-form stationary law, excitation
//!   probabilities, detailed-balance checks, and the large-ratio limit;
//! - [`dynamics`]: generator matrices, transient master-equation solutions,
//!   event-driven simulation, hitting times, and Monte Carlo estimators;
//! - [`physics`]: the map between laser parameters and flip rates;
//! - [`tuner`]: stochastic approximation driving per-particle drive strengths
//!   toward target excitation probabilities, the analytic line solution, and
//!   the achievable-region test.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm` feature
//! for float math without `std`, and `parallel` for multi-threaded ensembles.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod dynamics;
pub mod equilibrium;
pub mod graph;
pub mod physics;
pub mod statespace;
pub mod tuner;

mod error;
mod math;
pub mod rng;

mod simplex;

pub use error::{Error, Result};
pub use equilibrium::{EquilibriumTable, RateVector};
pub use graph::InterferenceGraph;
pub use statespace::{Configuration, StateSpace};
