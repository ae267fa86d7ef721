use std::sync::Arc;

use serde::Serialize;

use super::grid::Grid;
use super::phi::PhiFunction;
use super::sample::FunctionSample;
use crate::error::{Error, Result};
use crate::summation::KahanSum;

/// `ρ^φ[f] = ∫_G φ(|f|) dμ` on a quadrature grid.
#[derive(Clone, Debug)]
pub struct OrliczModular {
    phi: PhiFunction,
    grid: Arc<Grid>,
    q: f64,
}

impl OrliczModular {
    /// `q` is the declared quasi-semiconvexity constant; convex φ admit 1.
    pub fn new(phi: PhiFunction, grid: &Arc<Grid>, q: f64) -> Result<Self> {
        phi.validate()?;
        if !(q.is_finite() && q >= 1.0) {
            return Err(Error::InvalidArgument(format!("quasi-semiconvexity constant {q} must be at least 1")));
        }
        Ok(Self {
            phi,
            grid: Arc::clone(grid),
            q,
        })
    }

    pub fn convex(phi: PhiFunction, grid: &Arc<Grid>) -> Result<Self> {
        Self::new(phi, grid, 1.0)
    }

    pub fn phi(&self) -> PhiFunction {
        self.phi
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn modular(&self, f: &FunctionSample) -> Result<f64> {
        if !self.grid.same_as(f.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(self.modular_of_values(f.values()))
    }

    pub(crate) fn modular_of_values(&self, values: &[f64]) -> f64 {
        let mut acc = KahanSum::new();
        for (&w, &v) in self.grid.weights().iter().zip(values) {
            acc.add(w * self.phi.eval(v.abs()));
        }
        acc.total()
    }

    /// `ρ[c·1] = φ(|c|)·μ(G)`.
    pub fn of_constant(&self, c: f64) -> f64 {
        self.phi.eval(c.abs()) * self.grid.measure()
    }
}

pub fn orlicz_modular(f: &FunctionSample, rho: &OrliczModular) -> Result<f64> {
    rho.modular(f)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModularPropertyReport {
    pub monotone: bool,
    pub finite: bool,
    pub strongly_finite: bool,
    pub quasi_semiconvex_ok: bool,
}

impl ModularPropertyReport {
    pub fn all(&self) -> bool {
        self.monotone && self.finite && self.strongly_finite && self.quasi_semiconvex_ok
    }
}

/// Numeric checks of monotonicity, finiteness and Q-quasi-semiconvexity.
pub fn check_modular_properties(rho: &OrliczModular, probes: &[FunctionSample]) -> Result<ModularPropertyReport> {
    const SLACK: f64 = 1e-12;
    if probes.is_empty() {
        return Err(Error::InvalidArgument("no probes".into()));
    }
    let values: Vec<f64> = probes.iter().map(|f| rho.modular(f)).collect::<Result<_>>()?;

    let mut monotone = true;
    for (a, f) in probes.iter().enumerate() {
        for (b, g) in probes.iter().enumerate() {
            let dominated = f.values().iter().zip(g.values()).all(|(x, y)| x.abs() <= y.abs());
            if dominated && values[a] > values[b] + SLACK {
                monotone = false;
            }
        }
    }

    let lambdas = [0.1, 1.0, 10.0];
    let chi: Vec<f64> = lambdas.iter().map(|&l| rho.of_constant(l)).collect();
    let finite = chi.iter().any(|v| v.is_finite());
    let strongly_finite = chi.iter().all(|v| v.is_finite());

    let q = rho.q();
    let mut quasi_semiconvex_ok = true;
    for f in probes {
        let f = f.abs();
        for a in [0.1, 0.5, 1.0] {
            let lhs = rho.modular(&f.scale(a))?;
            let rhs = q * a * rho.modular(&f.scale(q))?;
            if lhs > rhs + SLACK {
                quasi_semiconvex_ok = false;
            }
        }
    }

    Ok(ModularPropertyReport {
        monotone,
        finite,
        strongly_finite,
        quasi_semiconvex_ok,
    })
}
