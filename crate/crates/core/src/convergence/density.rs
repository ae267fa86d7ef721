use rayon::prelude::*;
use serde::Serialize;

use super::matrix::{ShapeFunction, SummabilityMatrix};
use crate::error::{Error, Result};
use crate::summation::{kahan_sum, KahanSum};
use crate::tolerances::{tail_start, Tolerances, A1_SLACK, MIN_MATRIX_ROWS};

/// Finite-horizon estimate of a Ψ-A density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    /// Mean of the partial sums over the last quarter of rows.
    pub estimate: f64,
    /// `(i, Σ_{j ∈ K_i} a_{i,j})` for `i = 1..=i_max`.
    pub partial_sums: Vec<(usize, f64)>,
    /// `oscillation ≤ density_tol`.
    pub converged: bool,
    /// `max − min` of the partial sums over the last quarter of rows.
    pub oscillation: f64,
}

/// Ψ-A density of the pair set `K`, estimated over rows `1..=i_max`.
///
/// Row `i` contributes `S_i = Σ a_{i,j}` over admissible columns `j` with
/// `(i, j) ∈ K`, summed in ascending `j`. Fails if any restricted row sum
/// exceeds one, i.e. the matrix violates (A1) within the horizon.
pub fn triangular_density(
    k: &(dyn Fn(usize, usize) -> bool + Sync),
    matrix: &SummabilityMatrix,
    shape: &ShapeFunction,
    i_max: usize,
    tol: &Tolerances,
) -> Result<DensityReport> {
    if i_max < MIN_MATRIX_ROWS {
        return Err(Error::HorizonTooSmall {
            horizon: i_max,
            min: MIN_MATRIX_ROWS,
        });
    }
    let rows: Vec<(f64, f64)> = (1..=i_max)
        .into_par_iter()
        .map(|i| {
            if matrix.is_counting() {
                let (mut total, mut inside) = (0usize, 0usize);
                for j in shape.row_columns(matrix, i) {
                    total += 1;
                    inside += usize::from(k(i, j));
                }
                return (matrix.counted_mass(i, total), matrix.counted_mass(i, inside));
            }
            let mut total = KahanSum::new();
            let mut inside = KahanSum::new();
            for j in shape.row_columns(matrix, i) {
                let a = matrix.entry(i, j);
                total.add(a);
                if k(i, j) {
                    inside.add(a);
                }
            }
            (total.total(), inside.total())
        })
        .collect();

    if let Some((idx, (total, _))) = rows
        .iter()
        .enumerate()
        .find(|(_, (total, _))| *total > 1.0 + A1_SLACK)
    {
        return Err(Error::AxiomViolation {
            condition: "A1",
            detail: format!("restricted row sum {total} at row {}", idx + 1),
        });
    }

    let partial_sums: Vec<(usize, f64)> = rows
        .iter()
        .enumerate()
        .map(|(idx, &(_, s))| (idx + 1, s))
        .collect();
    let window = &partial_sums[tail_start(i_max)..];
    let estimate = kahan_sum(window.iter().map(|&(_, s)| s)) / window.len() as f64;
    let max = window.iter().map(|&(_, s)| s).fold(f64::NEG_INFINITY, f64::max);
    let min = window.iter().map(|&(_, s)| s).fold(f64::INFINITY, f64::min);
    let oscillation = max - min;
    Ok(DensityReport {
        estimate,
        partial_sums,
        converged: oscillation <= tol.density_tol,
        oscillation,
    })
}
