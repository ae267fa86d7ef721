use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::sync::Arc;

use rayon::prelude::*;

use super::grid::Grid;
use crate::error::{Error, Result};

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Node values of a function on a grid, optionally backed by a closed form
/// used for off-node evaluation.
#[derive(Clone)]
pub struct FunctionSample {
    grid: Arc<Grid>,
    values: Vec<f64>,
    evaluator: Option<Evaluator>,
}

impl fmt::Debug for FunctionSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSample")
            .field("grid", &self.grid.region())
            .field("resolution", &self.grid.resolution())
            .field("analytic", &self.evaluator.is_some())
            .finish()
    }
}

impl FunctionSample {
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let evaluator: Evaluator = Arc::new(f);
        Self::from_evaluator(grid, evaluator)
    }

    pub fn from_evaluator(grid: &Arc<Grid>, evaluator: Evaluator) -> Result<Self> {
        let values = grid.nodes().collect::<Vec<_>>().par_iter().map(|p| evaluator(p)).collect();
        Self::build(grid, values, Some(evaluator))
    }

    /// Node values only; off-node evaluation interpolates.
    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Self::build(grid, values, None)
    }

    fn build(grid: &Arc<Grid>, values: Vec<f64>, evaluator: Option<Evaluator>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("node {:?}", grid.node(k))));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
            evaluator,
        })
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Result<Self> {
        Self::from_fn(grid, move |_| c)
    }

    pub fn zero(grid: &Arc<Grid>) -> Self {
        Self::constant(grid, 0.0).expect("zero is finite")
    }

    /// Reads rows `x_1, …, x_N, value` (with a header row) and matches each
    /// row to a grid node. Every node must be covered exactly once.
    pub fn from_csv(grid: &Arc<Grid>, reader: impl Read) -> Result<Self> {
        const QUANTUM: f64 = 1e-9;
        let key = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| (x / QUANTUM).round() as i64).collect() };
        let lookup: HashMap<Vec<i64>, usize> = grid.nodes().enumerate().map(|(k, p)| (key(p), k)).collect();

        let dim = grid.dim();
        let mut values = vec![None; grid.len()];
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != dim + 1 {
                return Err(Error::InvalidArgument(format!(
                    "row {}: expected {} columns, found {}",
                    line + 2,
                    dim + 1,
                    record.len()
                )));
            }
            let numbers = record
                .iter()
                .map(|field| field.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::InvalidArgument(format!("row {}: {e}", line + 2)))?;
            let k = *lookup.get(&key(&numbers[..dim])).ok_or_else(|| {
                Error::InvalidArgument(format!("row {}: {:?} is not a grid node", line + 2, &numbers[..dim]))
            })?;
            if values[k].replace(numbers[dim]).is_some() {
                return Err(Error::InvalidArgument(format!("row {}: node {k} given twice", line + 2)));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| Error::InvalidArgument(format!("node {:?} missing", grid.node(k)))))
            .collect::<Result<Vec<f64>>>()?;
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn evaluator(&self) -> Option<&Evaluator> {
        self.evaluator.as_ref()
    }

    pub fn is_analytic(&self) -> bool {
        self.evaluator.is_some()
    }

    /// Value at an arbitrary point of the region.
    pub fn eval(&self, point: &[f64]) -> f64 {
        match &self.evaluator {
            Some(f) => f(point),
            None => self.grid.interpolate(&self.values, point),
        }
    }

    /// Callable view used by operators that integrate off the nodes.
    pub fn as_fn(&self) -> Evaluator {
        match &self.evaluator {
            Some(f) => Arc::clone(f),
            None => {
                let grid = Arc::clone(&self.grid);
                let values = self.values.clone();
                Arc::new(move |p| grid.interpolate(&values, p))
            }
        }
    }

    /// Sup of `|f|` over the nodes, and over the probe points when a closed
    /// form is available.
    pub fn sup_abs(&self) -> f64 {
        let nodes = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        match &self.evaluator {
            Some(f) => self.grid.probe_points().fold(nodes, |m, p| m.max(f(p).abs())),
            None => nodes,
        }
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `α·self + β·other`.
    pub fn lin_comb(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let evaluator: Option<Evaluator> = match (&self.evaluator, &other.evaluator) {
            (Some(f), Some(g)) => {
                let (f, g) = (Arc::clone(f), Arc::clone(g));
                Some(Arc::new(move |p| alpha * f(p) + beta * g(p)))
            }
            _ => None,
        };
        Self::build(&self.grid, values, evaluator)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(move |v| c * v).expect("scaling by a finite constant")
    }

    /// Pointwise `g ∘ f`.
    pub fn map(&self, g: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static) -> Result<Self> {
        let values = self.values.iter().map(|&v| g(v)).collect();
        let evaluator: Option<Evaluator> = self.evaluator.as_ref().map(|f| {
            let f = Arc::clone(f);
            Arc::new(move |p: &[f64]| g(f(p))) as Evaluator
        });
        Self::build(&self.grid, values, evaluator)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs).expect("abs of finite values")
    }
}
