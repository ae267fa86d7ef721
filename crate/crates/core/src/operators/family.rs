use std::sync::Arc;

use crate::error::{Error, Result};
use crate::modular::{Evaluator, FunctionSample, Grid};
use crate::sets::IndexSet;

/// A net `w ↦ T_w` of linear operators on sampled functions.
pub trait OperatorFamily: Send + Sync {
    fn name(&self) -> String;

    fn positivity_declared(&self) -> bool;

    /// Description of the domain the family acts on.
    fn domain_note(&self) -> String;

    /// Largest admissible index, if bounded.
    fn max_index(&self) -> Option<usize> {
        None
    }

    fn supports(&self, _grid: &Grid) -> Result<()> {
        Ok(())
    }

    /// Closed form of `T_w f`, evaluable anywhere in the region.
    fn prepare(&self, w: usize, f: Evaluator) -> Result<Evaluator>;

    fn check_index(&self, w: usize) -> Result<()> {
        let max = self.max_index().unwrap_or(usize::MAX);
        if w == 0 || w > max {
            return Err(Error::IndexOutOfRange { index: w, max });
        }
        Ok(())
    }

    /// `T_w f` on the grid of `f`; the result keeps the closed form.
    fn apply(&self, w: usize, f: &FunctionSample) -> Result<FunctionSample> {
        self.supports(f.grid())?;
        self.check_index(w)?;
        let out = self.prepare(w, f.as_fn())?;
        FunctionSample::from_evaluator(f.grid(), out)
    }

    /// `(T_w f)(point)`.
    fn apply_at(&self, w: usize, f: Evaluator, point: &[f64]) -> Result<f64> {
        self.check_index(w)?;
        Ok(self.prepare(w, f)?(point))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl OperatorFamily for Identity {
    fn name(&self) -> String {
        "identity".into()
    }
    fn positivity_declared(&self) -> bool {
        true
    }
    fn domain_note(&self) -> String {
        "all sampled functions".into()
    }
    fn prepare(&self, _w: usize, f: Evaluator) -> Result<Evaluator> {
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Zero;

impl OperatorFamily for Zero {
    fn name(&self) -> String {
        "zero".into()
    }
    fn positivity_declared(&self) -> bool {
        true
    }
    fn domain_note(&self) -> String {
        "all sampled functions".into()
    }
    fn prepare(&self, _w: usize, _f: Evaluator) -> Result<Evaluator> {
        Ok(Arc::new(|_| 0.0))
    }
}

/// `T_w f = −f`; linear but not positive.
#[derive(Clone, Copy, Debug, Default)]
pub struct NegatedIdentity;

impl OperatorFamily for NegatedIdentity {
    fn name(&self) -> String {
        "negated-identity".into()
    }
    fn positivity_declared(&self) -> bool {
        false
    }
    fn domain_note(&self) -> String {
        "all sampled functions".into()
    }
    fn prepare(&self, _w: usize, f: Evaluator) -> Result<Evaluator> {
        Ok(Arc::new(move |p| -f(p)))
    }
}

/// `s_w·T_w` with `s_w = 0` on the gate set and `1` elsewhere.
#[derive(Clone)]
pub struct GatedFamily {
    base: Arc<dyn OperatorFamily>,
    gate: IndexSet,
}

pub fn gate_family(base: Arc<dyn OperatorFamily>, gate: IndexSet) -> GatedFamily {
    GatedFamily { base, gate }
}

impl GatedFamily {
    pub fn gate(&self) -> &IndexSet {
        &self.gate
    }

    pub fn base(&self) -> &Arc<dyn OperatorFamily> {
        &self.base
    }
}

impl OperatorFamily for GatedFamily {
    fn name(&self) -> String {
        format!("gated({}, {})", self.base.name(), self.gate.name())
    }
    fn positivity_declared(&self) -> bool {
        self.base.positivity_declared()
    }
    fn domain_note(&self) -> String {
        self.base.domain_note()
    }
    fn max_index(&self) -> Option<usize> {
        self.base.max_index()
    }
    fn supports(&self, grid: &Grid) -> Result<()> {
        self.base.supports(grid)
    }
    fn prepare(&self, w: usize, f: Evaluator) -> Result<Evaluator> {
        if self.gate.contains(w) {
            Ok(Arc::new(|_| 0.0))
        } else {
            self.base.prepare(w, f)
        }
    }
}
