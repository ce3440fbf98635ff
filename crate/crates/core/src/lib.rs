//! Excitation-transport efficiency on noisy quantum networks.
//!
//! The crate simulates a single excitation hopping on random-removal and
//! Watts-Strogatz graphs while the site energies are driven by random
//! telegraph noise and each site couples to a structured thermal bath.
//! Dynamics follow a polaron-frame second-order master equation with an
//! anti-Hermitian sink; the quantity of interest is the transport
//! efficiency eta = 2*kappa * int rho_ss(t) dt on [0, t_up].
//!
//! Modules map onto the pipeline:
//! - [`graphs`]: network generation, BFS/sink selection, metrics.
//! - [`noise`]: telegraph-noise trajectories and site energies.
//! - [`bath`]: spectral density, quadrature, polaron correlation kernels.
//! - [`dynamics`]: density-matrix propagation and efficiency.
//! - [`ensemble`]: seeded campaigns, omega sweeps, curve classification.

pub mod bath;
pub mod dynamics;
pub mod ensemble;
mod error;
pub mod exec;
pub mod graphs;
pub mod noise;
pub mod util;

pub use error::{Error, Result};
