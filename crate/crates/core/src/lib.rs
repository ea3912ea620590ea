//! Mass-constrained ground states of the nonlinear Schrödinger energy on
//! non-compact metric graphs with an attractive potential on the compact
//! core.
//!
//! The crate provides
//! - metric graphs, meshes with shared vertex DOFs, and sampled potentials
//!   ([`graph`], [`mesh`]),
//! - the energy functional, line-profile (soliton) closed forms, functional
//!   inequalities, and the scaling laws ([`functional`]),
//! - a normalized-gradient-flow minimizer with multistart initialization and
//!   delocalization diagnostics ([`solver`]),
//! - explicit trial-function constructions, the existence criterion, the
//!   weak-potential nonexistence condition, and the n-fork mass window
//!   ([`criteria`]),
//! - monotone rearrangement onto an interval with equimeasurability and
//!   kinetic-energy comparison ([`rearrange`]).

pub mod criteria;
pub mod error;
pub mod functional;
pub mod graph;
pub mod mesh;
pub mod rearrange;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};
