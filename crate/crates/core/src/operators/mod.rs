//! Operator families: Mellin moment kernels, bivariate Kantorovich
//! operators, gating by an index set, and positivity probes.

mod family;
mod gauss_jacobi;
mod kantorovich;
mod mellin;
mod positivity;

pub use family::{gate_family, GatedFamily, Identity, NegatedIdentity, OperatorFamily, Zero};
pub use gauss_jacobi::{moment_rule, MomentRule};
pub use kantorovich::{gated_kantorovich, kantorovich_apply, Kantorovich, KantorovichParams, MAX_DEGREE};
pub use mellin::{mellin_apply, mellin_error_closed_form, Mellin, MellinParams, MomentTag, DEFAULT_QUADRATURE_POINTS};
pub use positivity::{check_positivity_set, PositivityReport, POSITIVITY_SLACK};
