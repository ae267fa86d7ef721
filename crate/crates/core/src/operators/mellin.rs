use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::family::OperatorFamily;
use super::gauss_jacobi::{moment_rule, MomentRule};
use crate::error::{Error, Result};
use crate::modular::{Evaluator, FunctionSample, Grid};
use crate::sets::IndexSet;
use crate::summation::KahanSum;

pub const DEFAULT_QUADRATURE_POINTS: usize = 24;

/// Multivariate moment kernel `K_w(t) = c_w·Π t_r^w` on `[0, 1]^N`, with
/// `c_w = (w+1)^N` on the distinguished set `F` and `(w+1)^{N+1}` off it.
#[derive(Clone, Debug)]
pub struct MellinParams {
    pub dim: usize,
    pub in_f: IndexSet,
    pub horizon: usize,
    pub quadrature_points: usize,
}

impl MellinParams {
    /// `F` = non-squares.
    pub fn new(dim: usize, horizon: usize) -> Result<Self> {
        Self::with_set(dim, horizon, IndexSet::non_squares())
    }

    pub fn with_set(dim: usize, horizon: usize, in_f: IndexSet) -> Result<Self> {
        let params = Self {
            dim,
            in_f,
            horizon,
            quadrature_points: DEFAULT_QUADRATURE_POINTS,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if self.quadrature_points == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
        }
        let members = self.in_f.count_up_to(self.horizon);
        if members < 2 || self.horizon - members < 2 {
            return Err(Error::InvalidArgument(format!(
                "set '{}' needs at least two members and two non-members up to {}",
                self.in_f.name(),
                self.horizon
            )));
        }
        Ok(())
    }

    pub fn in_f(&self, w: usize) -> bool {
        self.in_f.contains(w)
    }

    /// Total kernel mass: `1` on `F`, `w + 1` off it.
    pub fn kernel_mass(&self, w: usize) -> f64 {
        if self.in_f(w) {
            1.0
        } else {
            (w + 1) as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mellin {
    params: MellinParams,
    rules: Arc<Mutex<HashMap<usize, Arc<MomentRule>>>>,
}

impl Mellin {
    pub fn new(params: MellinParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            rules: Arc::default(),
        })
    }

    fn rule(&self, w: usize) -> Arc<MomentRule> {
        let mut cache = self.rules.lock().unwrap_or_else(|e| e.into_inner());
        Arc::clone(
            cache
                .entry(w)
                .or_insert_with(|| Arc::new(moment_rule(w, self.params.quadrature_points))),
        )
    }

    pub fn params(&self) -> &MellinParams {
        &self.params
    }
}

/// Nested per-axis compensated quadrature of `f(s·t)` against `Π (w+1) t_r^w`.
fn integrate(rule: &MomentRule, f: &dyn Fn(&[f64]) -> f64, s: &[f64]) -> f64 {
    fn level(rule: &MomentRule, f: &dyn Fn(&[f64]) -> f64, s: &[f64], point: &mut Vec<f64>) -> f64 {
        let axis = point.len();
        let mut acc = KahanSum::new();
        for (&t, &a) in rule.nodes.iter().zip(&rule.weights) {
            point.push(s[axis] * t);
            let inner = if axis + 1 == s.len() { f(point) } else { level(rule, f, s, point) };
            point.pop();
            acc.add(a * inner);
        }
        acc.total()
    }
    level(rule, f, s, &mut Vec::with_capacity(s.len()))
}

impl OperatorFamily for Mellin {
    fn name(&self) -> String {
        format!("mellin(N={}, F={})", self.params.dim, self.params.in_f.name())
    }

    fn positivity_declared(&self) -> bool {
        true
    }

    fn domain_note(&self) -> String {
        format!("continuous functions on [0, 1]^{}", self.params.dim)
    }

    fn max_index(&self) -> Option<usize> {
        Some(self.params.horizon)
    }

    fn supports(&self, grid: &Grid) -> Result<()> {
        if grid.dim() == self.params.dim && grid.region().is_unit_box() {
            Ok(())
        } else {
            Err(Error::WrongRegion {
                expected: format!("unit box [0, 1]^{}", self.params.dim),
            })
        }
    }

    fn prepare(&self, w: usize, f: Evaluator) -> Result<Evaluator> {
        self.check_index(w)?;
        let rule = self.rule(w);
        let mass = self.params.kernel_mass(w);
        let dim = self.params.dim;
        Ok(Arc::new(move |s: &[f64]| {
            debug_assert_eq!(s.len(), dim);
            mass * integrate(&rule, &*f, s)
        }))
    }
}

/// Apply the moment operator with index `w` to `f`.
pub fn mellin_apply(f: &FunctionSample, w: usize, params: &MellinParams) -> Result<FunctionSample> {
    Mellin::new(params.clone())?.apply(w, f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentTag {
    /// Constant one.
    E0,
    /// A coordinate `t_r`.
    Er,
    /// A squared coordinate `t_r²`.
    Er2,
}

/// Sup-norm error of `M_w` on the tagged test function.
pub fn mellin_error_closed_form(tag: MomentTag, w: usize, params: &MellinParams) -> Result<f64> {
    let wf = w as f64;
    match tag {
        MomentTag::E0 => Ok(if params.in_f(w) { 0.0 } else { wf }),
        MomentTag::Er | MomentTag::Er2 if !params.in_f(w) => Err(Error::InvalidArgument(format!(
            "closed form for {tag:?} needs w in F, got w = {w}"
        ))),
        MomentTag::Er => Ok(1.0 / (wf + 2.0)),
        MomentTag::Er2 => Ok(2.0 / (wf + 3.0)),
    }
}
