use rayon::prelude::*;

use super::grid::distance;
use super::sample::FunctionSample;
use crate::error::{Error, Result};

const RELATIVE_SLACK: f64 = 1e-12;

/// `ω(f; δ) = max |f(s) − f(t)|` over node pairs with `d(s, t) ≤ δ`.
pub fn modulus_of_continuity(f: &FunctionSample, delta: f64) -> Result<f64> {
    let grid = f.grid();
    let h_min = grid.h_min();
    if !(delta.is_finite() && delta >= h_min * (1.0 - RELATIVE_SLACK)) {
        return Err(Error::DeltaBelowSpacing { delta, h_min });
    }
    let reach = delta * (1.0 + RELATIVE_SLACK);
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid.node(a)[0].total_cmp(&grid.node(b)[0]));
    let values = f.values();

    let omega = (0..order.len())
        .into_par_iter()
        .map(|pos| {
            let s = grid.node(order[pos]);
            let fs = values[order[pos]];
            let mut best = 0.0f64;
            for &other in &order[pos + 1..] {
                let t = grid.node(other);
                if t[0] - s[0] > reach {
                    break;
                }
                if distance(s, t) <= reach {
                    best = best.max((fs - values[other]).abs());
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::grid::{build_grid, Region};

    /// Quadratic pair scan.
    fn oracle(f: &FunctionSample, delta: f64) -> f64 {
        let g = f.grid();
        let mut best = 0.0f64;
        for a in 0..g.len() {
            for b in 0..g.len() {
                if distance(g.node(a), g.node(b)) <= delta * (1.0 + RELATIVE_SLACK) {
                    best = best.max((f.values()[a] - f.values()[b]).abs());
                }
            }
        }
        best
    }

    #[test]
    fn constant_has_zero_modulus() {
        let g = build_grid(Region::unit_box(1), 64).unwrap();
        let f = FunctionSample::constant(&g, 4.0).unwrap();
        assert_eq!(modulus_of_continuity(&f, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn identity_and_square() {
        let g = build_grid(Region::unit_box(1), 512).unwrap();
        let h = g.h_min();
        let id = FunctionSample::from_fn(&g, |p| p[0]).unwrap();
        let w = modulus_of_continuity(&id, 0.25).unwrap();
        assert!((w - 0.25).abs() <= 2.0 * h);
        assert_eq!(w, oracle(&id, 0.25));
        let sq = FunctionSample::from_fn(&g, |p| p[0] * p[0]).unwrap();
        let w = modulus_of_continuity(&sq, 0.1).unwrap();
        assert!((w - 0.19).abs() <= 2.0 * h);
        assert_eq!(w, oracle(&sq, 0.1));
    }

    #[test]
    fn matches_pair_scan_in_two_dimensions() {
        for region in [Region::unit_box(2), Region::Simplex2] {
            let g = build_grid(region, 12).unwrap();
            let f = FunctionSample::from_fn(&g, |p| (4.0 * p[0]).sin() * p[1] + p[0] * p[0]).unwrap();
            for delta in [g.h_min(), 0.1, 0.37, 2.0] {
                assert_eq!(modulus_of_continuity(&f, delta).unwrap(), oracle(&f, delta));
            }
        }
    }

    #[test]
    fn delta_below_spacing() {
        let g = build_grid(Region::unit_box(1), 10).unwrap();
        let f = FunctionSample::zero(&g);
        assert!(matches!(modulus_of_continuity(&f, 0.05), Err(Error::DeltaBelowSpacing { .. })));
    }
}
