use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::{distance, Evaluator, FunctionSample, Grid, Region};
use crate::summation::KahanSum;

/// Tolerance for `P_s(s) = 0`.
pub const P1_TOL: f64 = 1e-10;

/// Coordinate map of a Euclidean quadratic system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiMap {
    Identity,
    Exp,
}

impl PhiMap {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Self::Identity => t,
            Self::Exp => t.exp(),
        }
    }
}

/// Functions `e_0..e_m`, coefficients `a_0..a_m` and the derived
/// `P_s(t) = Σ a_r(s)·e_r(t)`.
#[derive(Clone, Debug)]
pub struct TestSystem {
    name: String,
    grid: Arc<Grid>,
    e: Vec<FunctionSample>,
    a: Vec<FunctionSample>,
    n_bound: f64,
    c0: Option<f64>,
    verification: Option<PAxiomReport>,
}

/// Outcome of the (P1)–(P3) checks on a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PAxiomReport {
    pub p1_ok: bool,
    pub p1_max_residual: f64,
    /// `min P_s(t)/d(s, t)` over node pairs with `d ≥ delta_min`.
    pub c1_est: f64,
    pub delta_min: f64,
    /// `min` central second difference of `t ↦ P_s(t)`, 1-D grids only.
    pub c0_est: Option<f64>,
}

impl TestSystem {
    pub fn new(name: impl Into<String>, e: Vec<FunctionSample>, a: Vec<FunctionSample>) -> Result<Self> {
        if e.len() != a.len() || e.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need matching e and a lists of length at least 2, got {} and {}",
                e.len(),
                a.len()
            )));
        }
        let grid = Arc::clone(e[0].grid());
        if e.iter().chain(&a).any(|f| !f.grid().same_as(&grid)) {
            return Err(Error::GridMismatch);
        }
        if e.iter().chain(&a).any(|f| !f.is_analytic()) {
            return Err(Error::InvalidArgument("test-system functions need closed forms".into()));
        }
        if grid.sup_points().any(|p| e[0].eval(p) != 1.0) {
            return Err(Error::InvalidArgument("e_0 must be the constant one".into()));
        }
        let n_bound = a.iter().map(FunctionSample::sup_abs).fold(0.0, f64::max);
        Ok(Self {
            name: name.into(),
            grid,
            e,
            a,
            n_bound,
            c0: None,
            verification: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Index of the last test function.
    pub fn m(&self) -> usize {
        self.e.len() - 1
    }

    pub fn e(&self) -> &[FunctionSample] {
        &self.e
    }

    pub fn a(&self) -> &[FunctionSample] {
        &self.a
    }

    /// `sup |a_r|` over nodes, probe points and `r`.
    pub fn n_bound(&self) -> f64 {
        self.n_bound
    }

    /// Declared (P3) constant.
    pub fn c0(&self) -> Option<f64> {
        self.c0
    }

    pub fn verification(&self) -> Option<&PAxiomReport> {
        self.verification.as_ref()
    }

    /// Grid-estimated (P2) constant, once verified.
    pub fn c1(&self) -> Option<f64> {
        self.verification.as_ref().map(|r| r.c1_est)
    }

    pub fn p(&self, s: &[f64], t: &[f64]) -> f64 {
        let mut acc = KahanSum::new();
        for (a, e) in self.a.iter().zip(&self.e) {
            acc.add(a.eval(s) * e.eval(t));
        }
        acc.total()
    }

    /// `t ↦ P_s(t)`.
    pub fn p_slice(&self, s: &[f64]) -> Evaluator {
        let coeffs: Vec<f64> = self.a.iter().map(|a| a.eval(s)).collect();
        let e: Vec<_> = self.e.iter().map(|f| f.as_fn()).collect();
        Arc::new(move |t| {
            let mut acc = KahanSum::new();
            for (c, f) in coeffs.iter().zip(&e) {
                acc.add(c * f(t));
            }
            acc.total()
        })
    }

    /// Runs [`verify_p_axioms`] and keeps the report; fails unless (P1)
    /// holds and the (P2) estimate is positive.
    pub fn verified(mut self, delta_min: f64) -> Result<Self> {
        let report = verify_p_axioms(&self, delta_min)?;
        if !report.p1_ok {
            return Err(Error::UnverifiedSystem(format!(
                "P_s(s) reaches {} at some node",
                report.p1_max_residual
            )));
        }
        if report.c1_est <= 0.0 {
            return Err(Error::UnverifiedSystem(format!("C1 estimate {} is not positive", report.c1_est)));
        }
        self.verification = Some(report);
        Ok(self)
    }
}

/// Euclidean quadratic system `P_s(t) = Σ (φ(s_i) − φ(t_i))²`.
pub fn build_test_system_euclidean(phi_map: PhiMap, dim: usize, grid: &Arc<Grid>) -> Result<TestSystem> {
    if grid.dim() != dim {
        return Err(Error::InvalidArgument(format!(
            "Euclidean system of dimension {dim} on a grid of dimension {}",
            grid.dim()
        )));
    }
    let mut e = vec![FunctionSample::constant(grid, 1.0)?];
    let mut a = vec![FunctionSample::from_fn(grid, move |s| {
        s.iter().map(|&x| phi_map.eval(x).powi(2)).sum()
    })?];
    for i in 0..dim {
        e.push(FunctionSample::from_fn(grid, move |t| phi_map.eval(t[i]))?);
        a.push(FunctionSample::from_fn(grid, move |s| -2.0 * phi_map.eval(s[i]))?);
    }
    e.push(FunctionSample::from_fn(grid, move |t| t.iter().map(|&x| phi_map.eval(x).powi(2)).sum())?);
    a.push(FunctionSample::constant(grid, 1.0)?);
    TestSystem::new(format!("euclidean-{phi_map:?}-{dim}").to_lowercase(), e, a)
}

/// Trigonometric system `P_s(t) = 1 − cos(s − t)` on `[a, b] ⊂ (0, π/2)`.
pub fn build_test_system_trig(a: f64, b: f64, grid: &Arc<Grid>) -> Result<TestSystem> {
    if !(0.0 < a && a < b && b < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!("[{a}, {b}] is not inside (0, π/2)")));
    }
    match grid.region() {
        Region::Box { intervals } if intervals.len() == 1 && intervals[0] == (a, b) => {}
        _ => {
            return Err(Error::InvalidArgument(format!("trigonometric system needs a grid on [{a}, {b}]")));
        }
    }
    let e = vec![
        FunctionSample::constant(grid, 1.0)?,
        FunctionSample::from_fn(grid, |t| t[0].cos())?,
        FunctionSample::from_fn(grid, |t| t[0].sin())?,
    ];
    let coeffs = vec![
        FunctionSample::constant(grid, 1.0)?,
        FunctionSample::from_fn(grid, |s| -s[0].cos())?,
        FunctionSample::from_fn(grid, |s| -s[0].sin())?,
    ];
    let mut system = TestSystem::new("trig", e, coeffs)?;
    system.c0 = Some((b - a).cos());
    Ok(system)
}

/// Grid checks of (P1), (P2) and, on 1-D grids, (P3).
pub fn verify_p_axioms(system: &TestSystem, delta_min: f64) -> Result<PAxiomReport> {
    let grid = system.grid();
    let h_min = grid.h_min();
    if !(delta_min.is_finite() && delta_min >= h_min * (1.0 - 1e-12)) {
        return Err(Error::DeltaBelowSpacing { delta: delta_min, h_min });
    }
    let n = grid.len();
    let nodes: Vec<&[f64]> = grid.nodes().collect();
    // Coefficients and test functions tabulated at the nodes.
    let a_tab: Vec<Vec<f64>> = (0..n).map(|k| system.a.iter().map(|a| a.values()[k]).collect()).collect();
    let e_tab: Vec<Vec<f64>> = (0..n).map(|k| system.e.iter().map(|e| e.values()[k]).collect()).collect();
    let p = |s: usize, t: usize| -> f64 {
        let mut acc = KahanSum::new();
        for (a, e) in a_tab[s].iter().zip(&e_tab[t]) {
            acc.add(a * e);
        }
        acc.total()
    };

    let p1_max_residual = (0..n).map(|k| p(k, k).abs()).fold(0.0, f64::max);
    let reach = delta_min * (1.0 - 1e-12);
    let c1_est = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut best = f64::INFINITY;
            for t in 0..n {
                let d = distance(nodes[s], nodes[t]);
                if d >= reach {
                    best = best.min(p(s, t) / d);
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    if c1_est == f64::INFINITY {
        return Err(Error::InvalidArgument(format!("no node pair at distance at least {delta_min}")));
    }

    let c0_est = (grid.dim() == 1 && n >= 3).then(|| {
        let h = nodes[1][0] - nodes[0][0];
        (0..n)
            .into_par_iter()
            .map(|s| {
                (1..n - 1)
                    .map(|t| (p(s, t + 1) - 2.0 * p(s, t) + p(s, t - 1)) / (h * h))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min)
    });

    Ok(PAxiomReport {
        p1_ok: p1_max_residual <= P1_TOL,
        p1_max_residual,
        c1_est,
        delta_min,
        c0_est,
    })
}
