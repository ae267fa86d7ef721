//! Named cut-offs that turn exact limits into finite-horizon statistics.

use serde::{Deserialize, Serialize};

/// Largest density a set may have and still count as filter-small.
pub const DENSITY_TOL: f64 = 1e-2;
/// Smallest admissible liminf of restricted row sums, condition (A2).
pub const A2_TOL: f64 = 1e-2;
/// Largest admissible column entry at the horizon, condition (A3).
pub const A3_TOL: f64 = 1e-2;
/// Largest filter-limsup of a ratio classified as little-o.
pub const O_TOL: f64 = 1e-2;
/// Resolution at which limsup and liminf are considered equal.
pub const LEVEL_TOL: f64 = 1e-6;
/// Largest filter-limsup of a ratio still classified as big-O.
pub const BIG_C_CAP: f64 = 1e6;

/// Slack on restricted row sums in condition (A1).
pub const A1_SLACK: f64 = 1e-12;
/// Number of bisection steps used for filter limsup/liminf.
pub const BISECTION_STEPS: usize = 60;
/// Minimum horizon of a net.
pub const MIN_NET_HORIZON: usize = 8;
/// Minimum number of matrix rows for density and axiom checks.
pub const MIN_MATRIX_ROWS: usize = 32;

/// Per-call overridable tolerance set. Reports embed the values used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub density_tol: f64,
    pub a2_tol: f64,
    pub a3_tol: f64,
    pub o_tol: f64,
    pub level_tol: f64,
    pub big_c_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            density_tol: DENSITY_TOL,
            a2_tol: A2_TOL,
            a3_tol: A3_TOL,
            o_tol: O_TOL,
            level_tol: LEVEL_TOL,
            big_c_cap: BIG_C_CAP,
        }
    }
}

/// Last index before the tail window `(tail_start, horizon]`.
///
/// The tail is the last quarter of the index range; every horizon statistic
/// standing in for a limit is computed over it.
pub fn tail_start(horizon: usize) -> usize {
    (3 * horizon).div_ceil(4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_is_last_quarter() {
        assert_eq!(tail_start(2000), 1500);
        assert_eq!(tail_start(32), 24);
        assert_eq!(tail_start(10), 8);
    }
}
