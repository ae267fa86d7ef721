use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::summation::KahanSum;
use crate::tolerances::{tail_start, Tolerances, A1_SLACK, MIN_MATRIX_ROWS};

type Entry = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;
type Bound = Arc<dyn Fn(usize) -> usize + Send + Sync>;

/// Entry of the Cesàro matrix: `1/i` for `j ≤ i`, zero otherwise.
pub fn cesaro_entry(i: usize, j: usize) -> f64 {
    debug_assert!(i >= 1 && j >= 1);
    if j <= i {
        1.0 / i as f64
    } else {
        0.0
    }
}

/// Entry of the matrix `1/i²` for `j ≤ i²`, for which (A2) fails under the
/// triangular shape.
pub fn degenerate_entry(i: usize, j: usize) -> f64 {
    debug_assert!(i >= 1 && j >= 1);
    let i_sq = i.saturating_mul(i);
    if j <= i_sq {
        1.0 / (i as f64 * i as f64)
    } else {
        0.0
    }
}

/// Non-negative infinite matrix with finitely supported rows.
#[derive(Clone)]
pub struct SummabilityMatrix {
    name: String,
    entry: Entry,
    row_support: Bound,
    counting: bool,
}

impl SummabilityMatrix {
    /// `row_support(i)` must bound the non-zero columns of row `i`.
    pub fn new(
        name: impl Into<String>,
        entry: impl Fn(usize, usize) -> f64 + Send + Sync + 'static,
        row_support: impl Fn(usize) -> usize + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            entry: Arc::new(entry),
            row_support: Arc::new(row_support),
            counting: false,
        }
    }

    /// Row `i` spreads unit mass evenly over columns `1..=support(i)`.
    ///
    /// Restricted row sums of such a matrix are computed as a count divided
    /// by the support, so a full row sums to exactly one.
    pub fn counting(name: impl Into<String>, support: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        let support: Bound = Arc::new(support);
        let inner = Arc::clone(&support);
        let mut matrix = Self::new(
            name,
            move |i, j| {
                let n = inner(i);
                if j <= n {
                    1.0 / n as f64
                } else {
                    0.0
                }
            },
            move |i| support(i),
        );
        matrix.counting = true;
        matrix
    }

    pub fn cesaro() -> Self {
        Self::counting("cesaro", |i| i)
    }

    pub fn degenerate() -> Self {
        Self::counting("degenerate", |i| i.saturating_mul(i))
    }

    pub fn identity() -> Self {
        Self::new("identity", |i, j| if i == j { 1.0 } else { 0.0 }, |i| i)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        (self.entry)(i, j)
    }

    pub fn row_support(&self, i: usize) -> usize {
        (self.row_support)(i)
    }

    pub fn is_counting(&self) -> bool {
        self.counting
    }

    /// Mass of `count` columns of row `i` of a counting matrix.
    pub(crate) fn counted_mass(&self, i: usize, count: usize) -> f64 {
        debug_assert!(self.counting);
        count as f64 / self.row_support(i) as f64
    }
}

impl fmt::Debug for SummabilityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SummabilityMatrix").field(&self.name).finish()
    }
}

/// The shape function Ψ selecting the admissible part `Ψ(i, j) ≥ 0` of each row.
#[derive(Clone)]
pub struct ShapeFunction {
    name: String,
    psi: Entry,
    column_bound: Option<Bound>,
}

impl ShapeFunction {
    pub fn new(name: impl Into<String>, psi: impl Fn(usize, usize) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            psi: Arc::new(psi),
            column_bound: None,
        }
    }

    /// Declares that `Ψ(i, j) < 0` whenever `j > bound(i)`.
    pub fn with_column_bound(mut self, bound: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        self.column_bound = Some(Arc::new(bound));
        self
    }

    /// `Ψ(i, j) = i − j`.
    pub fn triangular() -> Self {
        Self::new("triangular", |i, j| i as f64 - j as f64).with_column_bound(|i| i)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn psi(&self, i: usize, j: usize) -> f64 {
        (self.psi)(i, j)
    }

    pub fn admits(&self, i: usize, j: usize) -> bool {
        self.psi(i, j) >= 0.0
    }

    /// Admissible columns of row `i` that can carry matrix mass, ascending.
    pub(crate) fn row_columns<'a>(
        &'a self,
        matrix: &SummabilityMatrix,
        i: usize,
    ) -> impl Iterator<Item = usize> + 'a {
        let mut last = matrix.row_support(i);
        if let Some(bound) = &self.column_bound {
            last = last.min(bound(i));
        }
        (1..=last).filter(move |&j| self.admits(i, j))
    }
}

impl fmt::Debug for ShapeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ShapeFunction").field(&self.name).finish()
    }
}

/// Restricted row sum `Σ_{j: Ψ(i,j) ≥ 0} a_{i,j}`, ascending in `j`.
pub(crate) fn restricted_row_sum(matrix: &SummabilityMatrix, shape: &ShapeFunction, i: usize) -> f64 {
    if matrix.is_counting() {
        return matrix.counted_mass(i, shape.row_columns(matrix, i).count());
    }
    let mut acc = KahanSum::new();
    for j in shape.row_columns(matrix, i) {
        acc.add(matrix.entry(i, j));
    }
    acc.total()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct A3Probe {
    pub column: usize,
    pub entry_at_horizon: f64,
    pub non_increasing: bool,
}

/// Outcome of the (A1)–(A3) checks at a finite horizon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub i_max: usize,
    pub a1: bool,
    pub a1_max_row_sum: f64,
    pub a2: bool,
    /// Minimum restricted row sum over the last quarter of rows.
    pub a2_liminf_estimate: f64,
    pub a3: bool,
    pub a3_probes: Vec<A3Probe>,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.a1 && self.a2 && self.a3
    }

    pub fn failures(&self) -> Vec<&'static str> {
        [(self.a1, "A1"), (self.a2, "A2"), (self.a3, "A3")]
            .into_iter()
            .filter(|(ok, _)| !ok)
            .map(|(_, name)| name)
            .collect()
    }
}

pub fn check_summability_axioms(
    matrix: &SummabilityMatrix,
    shape: &ShapeFunction,
    i_max: usize,
    tol: &Tolerances,
) -> Result<AxiomReport> {
    if i_max < MIN_MATRIX_ROWS {
        return Err(Error::HorizonTooSmall {
            horizon: i_max,
            min: MIN_MATRIX_ROWS,
        });
    }
    let row_sums: Vec<f64> = (1..=i_max).map(|i| restricted_row_sum(matrix, shape, i)).collect();
    let a1_max_row_sum = row_sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tail = tail_start(i_max);
    let a2_liminf_estimate = row_sums[tail..].iter().copied().fold(f64::INFINITY, f64::min);

    let probe_columns = {
        let mut cols = vec![1, 2, i_max.div_ceil(4)];
        cols.dedup();
        cols
    };
    let a3_probes: Vec<A3Probe> = probe_columns
        .into_iter()
        .map(|j| {
            let column: Vec<f64> = (tail + 1..=i_max).map(|i| matrix.entry(i, j)).collect();
            A3Probe {
                column: j,
                entry_at_horizon: matrix.entry(i_max, j),
                non_increasing: column.windows(2).all(|p| p[1] <= p[0]),
            }
        })
        .collect();
    let a3 = a3_probes
        .iter()
        .all(|p| p.entry_at_horizon <= tol.a3_tol && p.non_increasing);

    Ok(AxiomReport {
        i_max,
        a1: a1_max_row_sum <= 1.0 + A1_SLACK,
        a1_max_row_sum,
        a2: a2_liminf_estimate >= tol.a2_tol,
        a2_liminf_estimate,
        a3,
        a3_probes,
    })
}
