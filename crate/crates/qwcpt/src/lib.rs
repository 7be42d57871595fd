//! Dark resonances in a pair of tunneling-coupled quantum wells.
//!
//! The model is a four-level system in the rotating frame: two low levels
//! coupled by an infrared field with Rabi frequency `v` and a closed-loop
//! phase `phi`, and two excited levels split by twice the tunneling energy.
//! Two optical fields connect each low level to both excited ones, with
//! dipole ratios `q` and `kappa` between the branches. All frequencies and
//! rates are expressed in units of a reference relaxation rate gamma
//! (1.519e11 1/s); its SI value only matters when converting results out of
//! reduced units.
//!
//! The crate builds the 16-dimensional real generator of the density-matrix
//! equations ([`model`]), solves for the stationary state or integrates in
//! time ([`solver`]), reduces states to reported observables and dip
//! metrics ([`observables`]), runs parameter sweeps and bundled presets
//! ([`sweep`]), and reads/writes the versioned CSV and SVG outputs
//! ([`csv`], [`svg`]). The [`cli`] module implements the `qwcpt` binary.
//!
//! The interesting physics: with all three couplings active the levels form
//! a closed interaction contour, so observables depend on the loop phase
//! `phi`. At `phi = 0` destructive interference traps the population in a
//! dark superposition of the low levels and the photocurrent spectrum shows
//! a sharp dip; at `phi = pi/2` the trap is destroyed and the dip all but
//! vanishes. With the infrared coupling off (`v = 0`) the contour is open
//! and `phi` drops out entirely.

pub mod cli;
pub mod config;
pub mod csv;
pub mod error;
mod linalg;
pub mod model;
pub mod observables;
pub mod solver;
pub mod svg;
pub mod sweep;

pub use error::{Error, Result};
