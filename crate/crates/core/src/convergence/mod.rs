//! Nets, summability matrices and the concrete convergence modes.
//!
//! Each [`ConvergenceMode`] is a finite-horizon surrogate for an (ℓ)-limit:
//! limits over the index set are replaced by statistics over the last
//! quarter of the horizon, see [`crate::tolerances::tail_start`].

mod density;
mod limits;
mod matrix;
mod mode;
mod net;
mod rate;

pub use density::{triangular_density, DensityReport};
pub use limits::{filter_limsup_liminf, FilterBounds};
pub use matrix::{
    cesaro_entry, check_summability_axioms, degenerate_entry, A3Probe, AxiomReport, ShapeFunction,
    SummabilityMatrix,
};
pub use mode::{almost_deviation, mode_limit, ConvergenceMode, EpsCheck, LimitReport};
pub use net::{IndexKind, Net};
pub use rate::{rate_classify, RateClass, RateKind};
