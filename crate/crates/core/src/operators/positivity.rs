use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::family::OperatorFamily;
use crate::error::{Error, Result};
use crate::modular::{FunctionSample, Grid};
use crate::tolerances::Tolerances;

pub const POSITIVITY_SLACK: f64 = 1e-8;
pub const MIN_TRIALS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    /// Indices where every probe image stayed nonnegative.
    pub passed: Vec<usize>,
    pub failed: Vec<usize>,
    /// `|failed| / w_max`.
    pub complement_density: f64,
    pub complement_small: bool,
}

/// Sum of three squared random affine functions.
fn random_probe(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> Result<FunctionSample> {
    let dim = grid.dim();
    let terms: Vec<(f64, Vec<f64>)> = (0..3)
        .map(|_| {
            let c = rng.gen_range(-1.0..1.0);
            let b = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (c, b)
        })
        .collect();
    FunctionSample::from_fn(grid, move |p| {
        terms
            .iter()
            .map(|(c, b)| {
                let affine = c + b.iter().zip(p).map(|(bi, pi)| bi * pi).sum::<f64>();
                affine * affine
            })
            .sum()
    })
}

/// Indices `w ≤ w_max` where the family maps random nonnegative convex
/// probes to nonnegative samples.
pub fn check_positivity_set(
    family: &dyn OperatorFamily,
    grid: &Arc<Grid>,
    w_max: usize,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<PositivityReport> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!("{trials} trials; at least {MIN_TRIALS} needed")));
    }
    if w_max == 0 {
        return Err(Error::InvalidArgument("w_max must be positive".into()));
    }
    family.supports(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes = (0..trials)
        .map(|_| random_probe(grid, &mut rng))
        .collect::<Result<Vec<_>>>()?;

    let mut passed = Vec::new();
    let mut failed = Vec::new();
    for w in 1..=w_max {
        let mut ok = true;
        for probe in &probes {
            let image = family.apply(w, probe)?;
            if image.values().iter().any(|&v| v < -POSITIVITY_SLACK) {
                ok = false;
                break;
            }
        }
        if ok {
            passed.push(w);
        } else {
            failed.push(w);
        }
    }
    let complement_density = failed.len() as f64 / w_max as f64;
    Ok(PositivityReport {
        passed,
        failed,
        complement_density,
        complement_small: complement_density <= tol.density_tol,
    })
}
