//! Lattice laboratory for Clifford-module geometry: exact Clifford and
//! Grassmann algebra, gamma representations, metric charts with curvature
//! by finite differences, torsion potentials and their field strength,
//! discretized Dirac actions with analytic gradients, and solvers for the
//! resulting static and wave equations.

pub mod action;
pub mod battery;
pub mod clifford;
pub mod dense;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod sig;
pub mod spinor;
pub mod tolerances;
pub mod torsion;

pub use error::{Error, Result};
pub use sig::Signature;
