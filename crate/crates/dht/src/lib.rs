//! Numerical laboratory for a diffusive Holling-Tanner prey-predator system.
//!
//! The library provides:
//!
//! - the nondimensional model, its pointwise residual operators, and the
//!   dimensional-to-nondimensional parameter map ([`core_model`]);
//! - self-contained Airy function evaluation ([`special_fn`]);
//! - a catalogue of closed-form exact solution families ([`solutions`]);
//! - finite symmetry transformations that generate new solutions from seeds
//!   ([`transforms`]);
//! - ODE reductions with closed forms and an adaptive Runge-Kutta oracle
//!   ([`reductions`]);
//! - finite-difference residual reports, invariant-surface checks, and
//!   infinitesimal symmetry order estimation ([`verify`]);
//! - a method-of-lines PDE solver used as an independent oracle
//!   ([`fdsolver`]);
//! - approximate multi-peak superpositions ([`superpose`]);
//! - the command-line surface ([`cli`]).

pub mod cli;
pub mod core_model;
pub mod error;
pub mod fdsolver;
pub mod ode;
pub mod reductions;
pub mod solutions;
pub mod special_fn;
pub mod superpose;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
