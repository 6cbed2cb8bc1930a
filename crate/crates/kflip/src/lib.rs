//! Analytical and Monte Carlo toolkit for the k-flip Ising game on a
//! complete graph: N agents with binary strategies, k of which are uniformly
//! resampled each discrete time step and independently re-decide under noisy
//! myopic utilities.
//!
//! The crate computes, exactly at desk scale:
//!
//! - the one-step transition matrix over the adoption count, with two
//!   independent oracles ([`transition`]);
//! - choice probabilities, Curie-Weiss equilibria, spinodal fields and
//!   effective potentials ([`model`]);
//! - stationary distributions, the fundamental matrix, and the first two
//!   moments of first-hitting-time distributions ([`chain`]);
//! - the location of the escape-time minimum in k and the two-regime phase
//!   structure ([`escape`]);
//! - seed-reproducible stochastic simulation of the same dynamics
//!   ([`montecarlo`]).
//!
//! The `kflip` binary (see [`cli`]) exposes each capability as a subcommand
//! emitting CSV or JSON; the `examples/` directory shows library usage.

pub mod chain;
pub mod cli;
pub mod error;
pub mod escape;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod transition;

pub use error::{Error, Result};
pub use model::{GameParams, NoiseKind, NoiseModel};
