use serde::Serialize;

use super::mode::{tail_column_masses, ConvergenceMode};
use super::net::{IndexKind, Net};
use crate::error::{Error, Result};
use crate::summation::KahanSum;
use crate::tolerances::{tail_start, Tolerances, BISECTION_STEPS};

/// Filter limit superior and inferior; either may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FilterBounds {
    pub limsup: f64,
    pub liminf: f64,
}

impl FilterBounds {
    pub fn coincide(&self, level_tol: f64) -> bool {
        self.limsup.is_finite() && self.liminf.is_finite() && (self.limsup - self.liminf).abs() <= level_tol
    }
}

/// Weighted values of a net as seen by a mode's smallness test.
///
/// A set of indices is small when its total weight is at most `threshold`.
struct LevelProfile {
    values: Vec<f64>,
    weights: Vec<f64>,
    threshold: f64,
}

impl LevelProfile {
    fn new(mut pairs: Vec<(f64, f64)>, threshold: f64) -> Self {
        pairs.retain(|&(_, w)| w > 0.0);
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (values, weights) = pairs.into_iter().unzip();
        Self {
            values,
            weights,
            threshold,
        }
    }

    fn weight_where(&self, keep: impl Fn(f64) -> bool) -> f64 {
        let mut acc = KahanSum::new();
        for (&v, &w) in self.values.iter().zip(&self.weights) {
            if keep(v) {
                acc.add(w);
            }
        }
        acc.total()
    }

    /// `{x ≤ b}` is not filter-large, i.e. `{x > b}` is not small.
    fn in_upper_set(&self, b: f64) -> bool {
        self.weight_where(|v| v > b) > self.threshold
    }

    /// `{x ≥ a}` is not filter-large, i.e. `{x < a}` is not small.
    fn in_lower_set(&self, a: f64) -> bool {
        self.weight_where(|v| v < a) > self.threshold
    }

    /// Midpoint of the final bracket `[a, b]`, moved onto the nearest net
    /// value when one lies within the bracket width.
    ///
    /// The exact bound is always a net value inside the bracket, so equal
    /// bounds come out bitwise equal.
    fn snap(&self, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let width = b - a;
        let k = self.values.partition_point(|&v| v < mid);
        [k.checked_sub(1), Some(k)]
            .into_iter()
            .flatten()
            .filter_map(|idx| self.values.get(idx).copied())
            .filter(|v| (v - mid).abs() <= width)
            .min_by(|x, y| (x - mid).abs().total_cmp(&(y - mid).abs()))
            .unwrap_or(mid)
    }

    fn bounds(&self) -> FilterBounds {
        let (Some(&min), Some(&max)) = (self.values.first(), self.values.last()) else {
            return FilterBounds {
                limsup: f64::NEG_INFINITY,
                liminf: f64::INFINITY,
            };
        };
        let (lo, hi) = (min - 1.0, max + 1.0);

        let limsup = if self.in_upper_set(lo) {
            // Invariant: a in B, b not in B.
            let (mut a, mut b) = (lo, hi);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (a + b);
                if self.in_upper_set(mid) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            self.snap(a, b)
        } else {
            f64::NEG_INFINITY
        };

        let liminf = if self.in_lower_set(hi) {
            // Invariant: b in A, a not in A.
            let (mut a, mut b) = (lo, hi);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (a + b);
                if self.in_lower_set(mid) {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            self.snap(a, b)
        } else {
            f64::INFINITY
        };
        FilterBounds { limsup, liminf }
    }
}

fn profile(x: &Net, mode: &ConvergenceMode, tol: &Tolerances) -> Result<LevelProfile> {
    let horizon = x.horizon();
    if let Some(tail) = mode.tail_indices(horizon)? {
        let pairs = tail.into_iter().map(|w| (x.sequence_value(w), 1.0)).collect();
        return Ok(LevelProfile::new(pairs, 0.0));
    }
    match mode {
        ConvergenceMode::PsiAStatistical { matrix, shape } => {
            let start = tail_start(horizon);
            let rows = (horizon - start) as f64;
            let pairs = match x.kind() {
                IndexKind::Single => tail_column_masses(matrix, shape, horizon)
                    .into_iter()
                    .zip(x.values())
                    .map(|(m, &v)| (v, m))
                    .collect(),
                IndexKind::Pair => {
                    let mut pairs = Vec::new();
                    for i in start + 1..=horizon {
                        for j in shape.row_columns(matrix, i).take_while(|&j| j <= horizon) {
                            pairs.push((x.pair_value(i, j), matrix.entry(i, j) / rows));
                        }
                    }
                    pairs
                }
            };
            Ok(LevelProfile::new(pairs, tol.density_tol))
        }
        ConvergenceMode::Almost { .. } => Err(Error::UnsupportedMode(
            "filter limsup/liminf is not defined for almost convergence".into(),
        )),
        _ => unreachable!("tail modes handled above"),
    }
}

/// Filter limit superior and inferior of `x` under `mode`, by bisection over
/// levels in `[min − 1, max + 1]`.
pub fn filter_limsup_liminf(x: &Net, mode: &ConvergenceMode, tol: &Tolerances) -> Result<FilterBounds> {
    Ok(profile(x, mode, tol)?.bounds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::mode::mode_limit;
    use crate::sets::{is_perfect_square, IndexSet};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    #[test]
    fn alternating_signs_under_frechet() {
        let x = Net::single(100, |n| if n % 2 == 0 { 1.0 } else { -1.0 }).unwrap();
        let b = filter_limsup_liminf(&x, &ConvergenceMode::Frechet, &tol()).unwrap();
        assert!(close(b.limsup, 1.0) && close(b.liminf, -1.0), "{b:?}");
    }

    #[test]
    fn squares_vanish_under_density_filter() {
        let x = Net::single(1000, |n| is_perfect_square(n) as u8 as f64).unwrap();
        let mode = ConvergenceMode::density_filter(IndexSet::non_squares());
        let b = filter_limsup_liminf(&x, &mode, &tol()).unwrap();
        assert!(close(b.limsup, 0.0) && close(b.liminf, 0.0), "{b:?}");
        let f = filter_limsup_liminf(&x, &ConvergenceMode::Frechet, &tol()).unwrap();
        assert!(close(f.limsup, 1.0) && close(f.liminf, 0.0), "{f:?}");
    }

    #[test]
    fn constants_and_axiom_j() {
        let c = 2.25;
        let x = Net::single(300, |_| c).unwrap();
        let modes = [
            ConvergenceMode::Ordinary,
            ConvergenceMode::Frechet,
            ConvergenceMode::density_filter(IndexSet::non_squares()),
            ConvergenceMode::cesaro_statistical(300, &tol()).unwrap(),
        ];
        for mode in &modes {
            let b = filter_limsup_liminf(&x, mode, &tol()).unwrap();
            assert!(close(b.limsup, c) && close(b.liminf, c), "{}: {b:?}", mode.name());
            assert!(b.coincide(tol().level_tol));
            let schedule = [0.1, 1e-3, tol().level_tol];
            assert!(mode_limit(&x, mode, b.limsup, &schedule, &tol()).unwrap().converges);
        }
    }

    #[test]
    fn statistical_bounds_ignore_sparse_spikes() {
        let horizon = 2000;
        let x = Net::single(horizon, |n| if crate::sets::is_perfect_cube(n) { 9.0 } else { (n % 3) as f64 }).unwrap();
        let mode = ConvergenceMode::cesaro_statistical(horizon, &tol()).unwrap();
        let b = filter_limsup_liminf(&x, &mode, &tol()).unwrap();
        assert!(close(b.limsup, 2.0) && close(b.liminf, 0.0), "{b:?}");
    }

    #[test]
    fn pair_net_uses_matrix_weights() {
        // The diagonal carries mass 1/i per row, below density_tol in the tail.
        let x = Net::pair(200, |i, j| if i == j { 50.0 } else { (j % 2) as f64 }).unwrap();
        let mode = ConvergenceMode::cesaro_statistical(200, &tol()).unwrap();
        let b = filter_limsup_liminf(&x, &mode, &tol()).unwrap();
        assert!(close(b.limsup, 1.0) && close(b.liminf, 0.0), "{b:?}");
    }

    #[test]
    fn almost_is_unsupported() {
        let x = Net::single(64, |_| 0.0).unwrap();
        let err = filter_limsup_liminf(&x, &ConvergenceMode::Almost { m_max: 4 }, &tol());
        assert!(matches!(err, Err(Error::UnsupportedMode(_))));
    }
}
