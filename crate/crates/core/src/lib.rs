//! Numerical laboratory for Korovkin-type approximation under generalized
//! convergences.
//!
//! The crate is organised in four layers:
//!
//! - [`convergence`]: nets, summability matrices, Ψ-A densities, the concrete
//!   convergence modes (ordinary, Fréchet, density filters, Ψ-A-statistical,
//!   almost convergence), filter limsup/liminf and o/O rate classification.
//! - [`modular`]: quadrature grids, sampled functions, Orlicz modulars and the
//!   modulus of continuity.
//! - [`operators`]: Mellin moment operators, bivariate Kantorovich operators,
//!   gating by a filter-small index set and positivity probes.
//! - [`engine`]: test-function systems, property (ρ)-(*) and the two
//!   rate-of-approximation pipelines.
//!
//! Infinite limits are replaced by horizon statistics; every cut-off used is
//! a named constant in [`tolerances`].

pub mod convergence;
pub mod engine;
pub mod error;
pub mod modular;
pub mod operators;
pub mod sets;
pub mod summation;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
