//! Simulation and limit theory for random graphs in the critical window.
//!
//! * [`graphcore`]: multigraphs, union-find components, hop distances.
//! * [`models`]: G(x,q), Erdős–Rényi, finite-type inhomogeneous graphs,
//!   the configuration model (static, dynamic, percolated) and
//!   bounded-size rules such as Bohman–Frieze.
//! * [`observables`]: susceptibilities, size-biased orders, exploration walks.
//! * [`limits`]: closed-form and ODE limits, kernel constants, parabolic
//!   Brownian excursions, the multiplicative coalescent.
//! * [`trees`]: p-trees and their tilts, connected G(x,q) components,
//!   Brownian excursions, real trees with shortcuts.
//! * [`metric`]: measured metric spaces, GHP distance, blob expansion.
//! * [`harness`]: seeded sweeps, estimators, statistical distances and the
//!   cross-model pipeline.

pub mod error;
pub mod graphcore;
pub mod harness;
pub mod limits;
pub mod metric;
pub mod models;
pub mod observables;
pub mod rng;
pub mod trees;

pub use error::{Error, Result};
