use nalgebra::{DMatrix, SymmetricEigen};

use crate::summation::kahan_sum;

/// Gauss rule for the probability density `(w + 1)·t^w` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentRule {
    pub nodes: Vec<f64>,
    /// Positive weights whose compensated sum is exactly `1.0`.
    pub weights: Vec<f64>,
}

/// `points`-point rule exact for polynomials of degree `2·points − 1`
/// against `t^w`, via Golub–Welsch on the Jacobi recurrence with `α = 0`,
/// `β = w` mapped from `[−1, 1]` by `t = (1 + x)/2`.
pub fn moment_rule(w: usize, points: usize) -> MomentRule {
    assert!(points >= 1);
    let beta = w as f64;
    let ab = beta; // α + β with α = 0
    let mut jacobi = DMatrix::<f64>::zeros(points, points);
    for n in 0..points {
        let k = n as f64;
        jacobi[(n, n)] = if n == 0 {
            beta / (ab + 2.0)
        } else {
            beta * beta / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
        };
        if n + 1 < points {
            let k = k + 1.0;
            let s = 2.0 * k + ab;
            let b = 4.0 * k * k * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
            jacobi[(n, n + 1)] = b.sqrt();
            jacobi[(n + 1, n)] = b.sqrt();
        }
    }
    let eigen = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let v0 = eigen.eigenvectors[(0, i)];
            ((1.0 + eigen.eigenvalues[i]) / 2.0, v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, mut weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();

    let total = kahan_sum(weights.iter().copied());
    for x in &mut weights {
        *x /= total;
    }
    let heaviest = (0..points).max_by(|&a, &b| weights[a].total_cmp(&weights[b])).unwrap();
    for _ in 0..8 {
        let residual = 1.0 - kahan_sum(weights.iter().copied());
        if residual == 0.0 {
            break;
        }
        weights[heaviest] += residual;
    }
    MomentRule { nodes, weights }
}
