use std::sync::Arc;

use super::family::{gate_family, GatedFamily, OperatorFamily};
use crate::error::{Error, Result};
use crate::modular::{Evaluator, FunctionSample, Grid, Region};
use crate::sets::IndexSet;
use crate::summation::KahanSum;

/// Largest degree evaluated; multinomials are formed in log space.
pub const MAX_DEGREE: usize = 400;

#[derive(Clone, Debug)]
pub struct KantorovichParams {
    pub horizon: usize,
    /// Indices where the gated family vanishes; squares by default.
    pub gate: IndexSet,
}

impl KantorovichParams {
    pub fn new(horizon: usize) -> Result<Self> {
        Self::with_gate(horizon, IndexSet::squares())
    }

    pub fn with_gate(horizon: usize, gate: IndexSet) -> Result<Self> {
        if horizon == 0 || horizon > MAX_DEGREE {
            return Err(Error::IndexOutOfRange {
                index: horizon,
                max: MAX_DEGREE,
            });
        }
        Ok(Self { horizon, gate })
    }

    /// Natural density of the gate set up to the horizon.
    pub fn gate_density(&self) -> f64 {
        self.gate.natural_density(self.horizon)
    }
}

/// Bivariate Kantorovich operators on the unit simplex.
#[derive(Clone, Debug)]
pub struct Kantorovich {
    horizon: usize,
}

impl Kantorovich {
    pub fn new(horizon: usize) -> Result<Self> {
        KantorovichParams::new(horizon)?;
        Ok(Self { horizon })
    }
}

/// `ln k!` for `k = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// `k·ln x`, with `0·ln 0 = 0` and `k·ln 0 = −∞` for `k > 0`.
fn power_log(k: usize, ln_x: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * ln_x
    }
}

/// Cell means of `f` over `[k/(n+1), (k+1)/(n+1)] × [j/(n+1), (j+1)/(n+1)]`,
/// `k + j ≤ n`, from a 2×2 midpoint stencil.
fn cell_means(n: usize, f: &dyn Fn(&[f64]) -> f64) -> Vec<f64> {
    let h = 1.0 / (n + 1) as f64;
    let offsets = [0.25, 0.75];
    let mut means = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for k in 0..=n {
        for j in 0..=n - k {
            let mut acc = KahanSum::new();
            for du in offsets {
                for dv in offsets {
                    acc.add(f(&[(k as f64 + du) * h, (j as f64 + dv) * h]));
                }
            }
            means.push(0.25 * acc.total());
        }
    }
    means
}

fn evaluate(n: usize, ln_fact: &[f64], means: &[f64], point: &[f64]) -> f64 {
    let x = point[0].max(0.0);
    let y = point[1].max(0.0);
    let z = (1.0 - x - y).max(0.0);
    let (lx, ly, lz) = (x.ln(), y.ln(), z.ln());
    let mut acc = KahanSum::new();
    let mut idx = 0;
    for k in 0..=n {
        for j in 0..=n - k {
            let l = n - k - j;
            let log_p = ln_fact[n] - ln_fact[k] - ln_fact[j] - ln_fact[l]
                + power_log(k, lx)
                + power_log(j, ly)
                + power_log(l, lz);
            if log_p > f64::NEG_INFINITY {
                acc.add(log_p.exp() * means[idx]);
            }
            idx += 1;
        }
    }
    acc.total()
}

impl OperatorFamily for Kantorovich {
    fn name(&self) -> String {
        "kantorovich".into()
    }

    fn positivity_declared(&self) -> bool {
        true
    }

    fn domain_note(&self) -> String {
        "functions evaluable on [0, 1]^2, output on the unit simplex".into()
    }

    fn max_index(&self) -> Option<usize> {
        Some(self.horizon)
    }

    fn supports(&self, grid: &Grid) -> Result<()> {
        if *grid.region() == Region::Simplex2 {
            Ok(())
        } else {
            Err(Error::WrongRegion {
                expected: "simplex2".into(),
            })
        }
    }

    fn prepare(&self, n: usize, f: Evaluator) -> Result<Evaluator> {
        self.check_index(n)?;
        let means = cell_means(n, &*f);
        let ln_fact = ln_factorials(n);
        Ok(Arc::new(move |p: &[f64]| evaluate(n, &ln_fact, &means, p)))
    }
}

/// `P_n f` on a simplex grid.
pub fn kantorovich_apply(f: &FunctionSample, n: usize) -> Result<FunctionSample> {
    if n > MAX_DEGREE {
        return Err(Error::IndexOutOfRange { index: n, max: MAX_DEGREE });
    }
    Kantorovich::new(n.max(1))?.apply(n, f)
}

/// `P*_n = s_n·P_n`.
pub fn gated_kantorovich(params: &KantorovichParams) -> Result<GatedFamily> {
    Ok(gate_family(Arc::new(Kantorovich::new(params.horizon)?), params.gate.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::build_grid;

    fn simplex() -> Arc<Grid> {
        build_grid(Region::Simplex2, 12).unwrap()
    }

    /// Direct summation with factorials in floating point.
    fn oracle(n: usize, f: impl Fn(f64, f64) -> f64, x: f64, y: f64) -> f64 {
        let fact = |m: usize| (1..=m).map(|i| i as f64).product::<f64>();
        let h = 1.0 / (n + 1) as f64;
        let mut total = 0.0;
        for k in 0..=n {
            for j in 0..=n - k {
                let l = n - k - j;
                let p = fact(n) / (fact(k) * fact(j) * fact(l))
                    * x.powi(k as i32)
                    * y.powi(j as i32)
                    * (1.0 - x - y).powi(l as i32);
                let mut mean = 0.0;
                for du in [0.25, 0.75] {
                    for dv in [0.25, 0.75] {
                        mean += 0.25 * f((k as f64 + du) * h, (j as f64 + dv) * h);
                    }
                }
                total += p * mean;
            }
        }
        total
    }

    #[test]
    fn constants_are_preserved() {
        let g = simplex();
        let one = FunctionSample::constant(&g, 1.0).unwrap();
        let out = kantorovich_apply(&one, 5).unwrap();
        assert!(out.values().iter().all(|&v| (v - 1.0).abs() <= 1e-8));
        assert!((out.eval(&[0.0, 0.0]) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn first_moment() {
        let g = simplex();
        let u = FunctionSample::from_fn(&g, |p| p[0]).unwrap();
        let out = kantorovich_apply(&u, 1).unwrap();
        assert!((out.eval(&[0.0, 0.0]) - 0.25).abs() <= 1e-6);
        for n in [1, 9, 30] {
            let out = kantorovich_apply(&u, n).unwrap();
            for p in g.sup_points() {
                let exact = (2.0 * n as f64 * p[0] + 1.0) / (2.0 * (n + 1) as f64);
                assert!((out.eval(p) - exact).abs() < 1e-12);
            }
        }
        let out = kantorovich_apply(&u, 9).unwrap();
        let err = out.sub(&u).unwrap().sup_abs();
        assert!((err - 0.05).abs() <= 1e-4);
    }

    #[test]
    fn matches_direct_summation() {
        let f = |u: f64, v: f64| (u - 0.3).abs() + v * v * u;
        let family = Kantorovich::new(20).unwrap();
        for n in [1, 4, 20] {
            let out = family.prepare(n, Arc::new(move |p: &[f64]| f(p[0], p[1]))).unwrap();
            for (x, y) in [(0.1, 0.2), (0.5, 0.5), (0.0, 1.0), (0.33, 0.0)] {
                assert!((out(&[x, y]) - oracle(n, f, x, y)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gate_and_limits() {
        let g = simplex();
        let one = FunctionSample::constant(&g, 1.0).unwrap();
        let gated = gated_kantorovich(&KantorovichParams::new(50).unwrap()).unwrap();
        assert!(gated.apply(4, &one).unwrap().values().iter().all(|&v| v == 0.0));
        assert!(gated.apply(5, &one).unwrap().values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(kantorovich_apply(&one, 401).is_err());
        let square = build_grid(Region::unit_box(2), 4).unwrap();
        assert!(matches!(kantorovich_apply(&FunctionSample::zero(&square), 3), Err(Error::WrongRegion { .. })));
    }

    #[test]
    fn stable_at_the_degree_cap() {
        let g = build_grid(Region::Simplex2, 6).unwrap();
        let one = FunctionSample::constant(&g, 1.0).unwrap();
        let out = kantorovich_apply(&one, MAX_DEGREE).unwrap();
        assert!(out.values().iter().all(|&v| (v - 1.0).abs() <= 1e-8));
    }
}
