//! Numerical laboratory for the dual-superconductor picture of confinement.
//!
//! * [`su2`]: quaternion SU(2) arithmetic.
//! * [`lattice`]: Wilson-action Monte Carlo (heatbath, overrelaxation, loops).
//! * [`mag`]: maximal abelian gauge, abelian projection, monopole currents.
//! * [`bps`]: continuum BPS monopole on a grid, 't Hooft tensor, charge, energy.
//! * [`dual_gl`]: dual Ginzburg–Landau flux-tube profiles and tensions.
//! * [`topo`]: Higgs mass and inflation e-folds from 3-manifold invariants.
//! * [`config`], [`manifest`], [`cli`]: run orchestration and file formats.

pub mod bps;
pub mod cli;
pub mod config;
pub mod dual_gl;
pub mod error;
pub mod lattice;
pub mod mag;
pub mod manifest;
pub mod stats;
pub mod su2;
pub mod topo;

pub use error::{Error, ErrorClass, Result};
