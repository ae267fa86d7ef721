//! Quadrature grids, sampled functions, Orlicz modulars and the modulus of
//! continuity.

mod continuity;
mod grid;
mod orlicz;
mod phi;
mod sample;

pub use continuity::modulus_of_continuity;
pub use grid::{build_grid, distance, Grid, Region, MIN_RESOLUTION};
pub use orlicz::{check_modular_properties, orlicz_modular, ModularPropertyReport, OrliczModular};
pub use phi::PhiFunction;
pub use sample::{Evaluator, FunctionSample};
