use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::MIN_NET_HORIZON;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexKind {
    /// Indexed by `w ∈ {1, …, horizon}`.
    Single,
    /// Indexed by `(i, j) ∈ {1, …, horizon}²`.
    Pair,
}

/// A real-valued net truncated at a finite horizon.
///
/// Single nets are exposed to pair modes through the column extension
/// `x_{i,j} = x_j`; pair nets are exposed to single modes through the
/// diagonal `x_w = x_{w,w}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Net {
    kind: IndexKind,
    horizon: usize,
    values: Vec<f64>,
}

impl Net {
    pub fn single(horizon: usize, mut f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::from_values((1..=horizon).map(&mut f).collect())
    }

    pub fn pair(horizon: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_horizon(horizon)?;
        let mut values = Vec::with_capacity(horizon * horizon);
        for i in 1..=horizon {
            for j in 1..=horizon {
                values.push(f(i, j));
            }
        }
        Self::build(IndexKind::Pair, horizon, values)
    }

    /// Single net whose `w`-th value is `values[w - 1]`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let horizon = values.len();
        check_horizon(horizon)?;
        Self::build(IndexKind::Single, horizon, values)
    }

    fn build(kind: IndexKind, horizon: usize, values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let at = match kind {
                IndexKind::Single => format!("w = {}", pos + 1),
                IndexKind::Pair => format!("(i, j) = ({}, {})", pos / horizon + 1, pos % horizon + 1),
            };
            return Err(Error::NonFinite(at));
        }
        Ok(Self { kind, horizon, values })
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Raw values: `w = 1..=horizon` for single nets, row-major for pairs.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value seen by single-index modes (diagonal for pair nets).
    pub fn sequence_value(&self, w: usize) -> f64 {
        match self.kind {
            IndexKind::Single => self.values[w - 1],
            IndexKind::Pair => self.values[(w - 1) * self.horizon + (w - 1)],
        }
    }

    /// Value seen by pair-index modes (column extension for single nets).
    pub fn pair_value(&self, i: usize, j: usize) -> f64 {
        match self.kind {
            IndexKind::Single => self.values[j - 1],
            IndexKind::Pair => self.values[(i - 1) * self.horizon + (j - 1)],
        }
    }

    /// Values seen by single-index modes, `w = 1..=horizon`.
    pub fn sequence(&self) -> Vec<f64> {
        (1..=self.horizon).map(|w| self.sequence_value(w)).collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::build(self.kind, self.horizon, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Net, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::build(self.kind, self.horizon, values)
    }

    pub fn check_compatible(&self, other: &Net) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::Mismatch(format!("{:?} vs {:?} index kinds", self.kind, other.kind)));
        }
        if self.horizon != other.horizon {
            return Err(Error::Mismatch(format!(
                "horizons {} and {}",
                self.horizon, other.horizon
            )));
        }
        Ok(())
    }
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon < MIN_NET_HORIZON {
        return Err(Error::HorizonTooSmall {
            horizon,
            min: MIN_NET_HORIZON,
        });
    }
    Ok(())
}
