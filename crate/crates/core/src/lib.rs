//! Stabilized finite element methods for first-order advection–reaction
//! problems `β·∇u + σu = f` on the unit square, in both the classical
//! stabilized form and the primal–dual (optimization based) form.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`]: structured (optionally perturbed) triangulations and face sets,
//! * [`space`]: Lagrange spaces of degree 1 and 2, quadrature, interpolation,
//! * [`cases`]: velocity fields, manufactured solutions and boundary data,
//! * [`assembly`]: the advection form, GLS / CIP / DG stabilizations and
//!   boundary penalties, right-hand sides,
//! * [`linalg`]: CSR matrices, block composition and sparse direct solves,
//! * [`formulations`]: the standard and primal–dual solvers plus the
//!   runtime identity checks,
//! * [`analysis`]: error norms, convergence studies and robustness sweeps.

pub mod analysis;
pub mod assembly;
pub mod cases;
mod error;
pub mod formulations;
pub mod linalg;
pub mod mesh;
pub mod space;

pub use error::{Error, Result};

/// A point (or vector) in the plane.
pub type Point = [f64; 2];
