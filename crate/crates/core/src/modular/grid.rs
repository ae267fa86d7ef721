use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::kahan_sum;

pub const MIN_RESOLUTION: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Region {
    /// Product of closed intervals, one per axis.
    Box { intervals: Vec<(f64, f64)> },
    /// `{(x, y): x, y ≥ 0, x + y ≤ 1}`.
    Simplex2,
}

impl Region {
    pub fn unit_box(dim: usize) -> Self {
        Self::Box {
            intervals: vec![(0.0, 1.0); dim],
        }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Self::Box {
            intervals: vec![(a, b)],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Box { intervals } => intervals.len(),
            Self::Simplex2 => 2,
        }
    }

    pub fn is_unit_box(&self) -> bool {
        matches!(self, Self::Box { intervals } if intervals.iter().all(|&iv| iv == (0.0, 1.0)))
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Box { intervals } => {
                let axes: Vec<String> = intervals.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
                axes.join(" x ")
            }
            Self::Simplex2 => "simplex2".into(),
        }
    }
}

/// Midpoint quadrature grid with Euclidean metric.
#[derive(Debug, PartialEq)]
pub struct Grid {
    region: Region,
    resolution: usize,
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    h_min: f64,
    /// Box corners or simplex vertices; sup norms also look here.
    probe_points: Vec<f64>,
    /// `(i, j, upper)` → node index, Simplex2 only.
    triangle_index: Vec<Option<usize>>,
}

/// Builds a midpoint rule with `resolution` cells per axis.
pub fn build_grid(region: Region, resolution: usize) -> Result<Arc<Grid>> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} is below {MIN_RESOLUTION}"
        )));
    }
    let grid = match &region {
        Region::Box { intervals } => box_grid(intervals, resolution)?,
        Region::Simplex2 => simplex_grid(resolution),
    };
    Ok(Arc::new(grid))
}

fn box_grid(intervals: &[(f64, f64)], res: usize) -> Result<Grid> {
    if intervals.is_empty() {
        return Err(Error::InvalidArgument("box needs at least one axis".into()));
    }
    for &(a, b) in intervals {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidArgument(format!("degenerate interval [{a}, {b}]")));
        }
    }
    let dim = intervals.len();
    let count = res
        .checked_pow(dim as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::InvalidArgument(format!("{res}^{dim} nodes is too many")))?;
    let steps: Vec<f64> = intervals.iter().map(|&(a, b)| (b - a) / res as f64).collect();
    let volume: f64 = intervals.iter().map(|&(a, b)| b - a).product();
    let weight = volume / count as f64;

    let mut nodes = Vec::with_capacity(count * dim);
    let mut multi = vec![0usize; dim];
    for _ in 0..count {
        for axis in 0..dim {
            nodes.push(intervals[axis].0 + (multi[axis] as f64 + 0.5) * steps[axis]);
        }
        for axis in (0..dim).rev() {
            multi[axis] += 1;
            if multi[axis] < res {
                break;
            }
            multi[axis] = 0;
        }
    }

    let mut probe_points = Vec::with_capacity(dim << dim);
    for corner in 0..1usize << dim {
        for (axis, &(a, b)) in intervals.iter().enumerate() {
            probe_points.push(if corner >> (dim - 1 - axis) & 1 == 1 { b } else { a });
        }
    }

    Ok(Grid {
        region: Region::Box {
            intervals: intervals.to_vec(),
        },
        resolution: res,
        dim,
        nodes,
        weights: vec![weight; count],
        h_min: steps.iter().copied().fold(f64::INFINITY, f64::min),
        probe_points,
        triangle_index: Vec::new(),
    })
}

fn simplex_grid(res: usize) -> Grid {
    let h = 1.0 / res as f64;
    let mut nodes = Vec::new();
    let mut triangle_index = vec![None; res * res * 2];
    let mut count = 0;
    for i in 0..res {
        for j in 0..res {
            if i + j < res {
                nodes.extend([(i as f64 + 1.0 / 3.0) * h, (j as f64 + 1.0 / 3.0) * h]);
                triangle_index[(i * res + j) * 2] = Some(count);
                count += 1;
            }
            if i + j + 1 < res {
                nodes.extend([(i as f64 + 2.0 / 3.0) * h, (j as f64 + 2.0 / 3.0) * h]);
                triangle_index[(i * res + j) * 2 + 1] = Some(count);
                count += 1;
            }
        }
    }
    Grid {
        region: Region::Simplex2,
        resolution: res,
        dim: 2,
        nodes,
        weights: vec![0.5 * h * h; count],
        h_min: std::f64::consts::SQRT_2 * h / 3.0,
        probe_points: vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0],
        triangle_index,
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl Grid {
    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.nodes[k * self.dim..(k + 1) * self.dim]
    }

    pub fn nodes(&self) -> std::slice::ChunksExact<'_, f64> {
        self.nodes.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total quadrature mass `μ(G)`.
    pub fn measure(&self) -> f64 {
        kahan_sum(self.weights.iter().copied())
    }

    /// Smallest distance between distinct nodes.
    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    pub fn probe_points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.probe_points.chunks_exact(self.dim)
    }

    /// Nodes followed by probe points.
    pub fn sup_points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.nodes().chain(self.probe_points())
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        std::ptr::eq(self, other) || (self.region == other.region && self.resolution == other.resolution)
    }


    /// Clamped multilinear interpolation through the node values (Box) or the
    /// value of the containing triangle (Simplex2).
    pub(crate) fn interpolate(&self, values: &[f64], point: &[f64]) -> f64 {
        let res = self.resolution;
        match &self.region {
            Region::Box { intervals } => {
                let dim = self.dim;
                let mut base = vec![0usize; dim];
                let mut frac = vec![0.0; dim];
                for axis in 0..dim {
                    let (a, b) = intervals[axis];
                    let u = ((point[axis] - a) / (b - a) * res as f64 - 0.5).clamp(0.0, (res - 1) as f64);
                    let i0 = (u.floor() as usize).min(res - 2);
                    base[axis] = i0;
                    frac[axis] = u - i0 as f64;
                }
                let mut acc = 0.0;
                for corner in 0..1usize << dim {
                    let mut weight = 1.0;
                    let mut flat = 0;
                    for axis in 0..dim {
                        let up = corner >> (dim - 1 - axis) & 1;
                        weight *= if up == 1 { frac[axis] } else { 1.0 - frac[axis] };
                        flat = flat * res + base[axis] + up;
                    }
                    if weight != 0.0 {
                        acc += weight * values[flat];
                    }
                }
                acc
            }
            Region::Simplex2 => {
                let h = 1.0 / res as f64;
                let x = point[0].clamp(0.0, 1.0);
                let y = point[1].clamp(0.0, 1.0);
                let mut i = ((x / h).floor() as usize).min(res - 1);
                let mut j = ((y / h).floor() as usize).min(res - 1);
                let upper = (x / h - i as f64) + (y / h - j as f64) > 1.0;
                while i + j >= res {
                    if i >= j { i -= 1 } else { j -= 1 }
                }
                let slot = (i * res + j) * 2;
                let k = if upper { self.triangle_index[slot + 1] } else { None }
                    .or(self.triangle_index[slot])
                    .expect("lower triangle exists whenever i + j < res");
                values[k]
            }
        }
    }
}
