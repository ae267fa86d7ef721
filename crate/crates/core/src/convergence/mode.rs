use serde::Serialize;

use super::density::triangular_density;
use super::matrix::{check_summability_axioms, ShapeFunction, SummabilityMatrix};
use super::net::{IndexKind, Net};
use crate::error::{Error, Result};
use crate::sets::IndexSet;
use crate::summation::{kahan_sum, KahanSum};
use crate::tolerances::{tail_start, Tolerances};

/// A concrete (ℓ)-limit.
///
/// Variants can be built directly; [`ConvergenceMode::psi_a_statistical`]
/// additionally verifies (A1)–(A3) at the working horizon, which is the only
/// way to trust limit queries under a matrix filter.
#[derive(Clone, Debug)]
pub enum ConvergenceMode {
    Ordinary,
    /// Filter of cofinite sets.
    Frechet,
    /// Filter generated by a density-one set `F` and the cofinite sets.
    DensityFilter { filter_set: IndexSet },
    /// Filter `F_A^Ψ` of pair sets whose complement has Ψ-A density zero.
    PsiAStatistical {
        matrix: SummabilityMatrix,
        shape: ShapeFunction,
    },
    /// Shifted Cesàro means, uniformly in the shift `m ≤ m_max`.
    Almost { m_max: usize },
}

impl ConvergenceMode {
    pub fn density_filter(filter_set: IndexSet) -> Self {
        Self::DensityFilter { filter_set }
    }

    /// Ψ-A-statistical mode, rejected unless (A1)–(A3) hold at `horizon`.
    pub fn psi_a_statistical(
        matrix: SummabilityMatrix,
        shape: ShapeFunction,
        horizon: usize,
        tol: &Tolerances,
    ) -> Result<Self> {
        let report = check_summability_axioms(&matrix, &shape, horizon, tol)?;
        if let Some(&condition) = report.failures().first() {
            return Err(Error::AxiomViolation {
                condition,
                detail: format!(
                    "matrix '{}' with shape '{}' at horizon {horizon}: {:?}",
                    matrix.name(),
                    shape.name(),
                    report
                ),
            });
        }
        Ok(Self::PsiAStatistical { matrix, shape })
    }

    /// Triangular A-statistical convergence with the Cesàro matrix.
    pub fn cesaro_statistical(horizon: usize, tol: &Tolerances) -> Result<Self> {
        Self::psi_a_statistical(SummabilityMatrix::cesaro(), ShapeFunction::triangular(), horizon, tol)
    }

    pub fn name(&self) -> String {
        match self {
            Self::Ordinary => "ordinary".into(),
            Self::Frechet => "frechet".into(),
            Self::DensityFilter { filter_set } => format!("density-filter({})", filter_set.name()),
            Self::PsiAStatistical { matrix, shape } => {
                format!("psi-a-statistical({}, {})", matrix.name(), shape.name())
            }
            Self::Almost { m_max } => format!("almost(m_max={m_max})"),
        }
    }

    /// Single-index modes whose filter is generated by a tail window.
    pub(crate) fn tail_indices(&self, horizon: usize) -> Result<Option<Vec<usize>>> {
        let tail = tail_start(horizon) + 1..=horizon;
        match self {
            Self::Ordinary | Self::Frechet => Ok(Some(tail.collect())),
            Self::DensityFilter { filter_set } => {
                validate_filter_set(filter_set, horizon)?;
                Ok(Some(tail.filter(|&w| filter_set.contains(w)).collect()))
            }
            _ => Ok(None),
        }
    }
}

fn validate_filter_set(set: &IndexSet, horizon: usize) -> Result<()> {
    let members = set.count_up_to(horizon);
    if members < horizon.div_ceil(2) {
        return Err(Error::InvalidMode(format!(
            "filter set '{}' has {members} members up to {horizon}, fewer than half",
            set.name()
        )));
    }
    if !(tail_start(horizon) + 1..=horizon).any(|w| set.contains(w)) {
        return Err(Error::InvalidMode(format!(
            "filter set '{}' has no member in the tail window",
            set.name()
        )));
    }
    Ok(())
}

/// Result of testing one tolerance of an ε-schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsCheck {
    pub eps: f64,
    pub passed: bool,
    /// Mode-specific size of the exceptional set: the largest tail deviation
    /// for filter and almost modes, the density estimate of `K(ε)` for Ψ-A.
    pub statistic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub candidate: f64,
    pub converges: bool,
    pub checks: Vec<EpsCheck>,
    /// First failing check, or the finest tolerance when all pass.
    pub worst: EpsCheck,
}

/// Sup over shifts `0 ≤ m ≤ m_max` of `|mean(x_{m+1..m+n}) − candidate|`
/// with `n = horizon − m_max`.
pub fn almost_deviation(x: &Net, m_max: usize, candidate: f64) -> Result<f64> {
    let horizon = x.horizon();
    if m_max + 1 >= horizon {
        return Err(Error::HorizonTooSmall {
            horizon,
            min: m_max + 2,
        });
    }
    let n = horizon - m_max;
    let seq = x.sequence();
    let sup = (0..=m_max)
        .map(|m| {
            let mean = kahan_sum(seq[m..m + n].iter().copied()) / n as f64;
            (mean - candidate).abs()
        })
        .fold(0.0, f64::max);
    Ok(sup)
}

/// Tests whether `x` converges to `candidate` in `mode` at every tolerance of
/// the (strictly decreasing) schedule.
pub fn mode_limit(
    x: &Net,
    mode: &ConvergenceMode,
    candidate: f64,
    eps_schedule: &[f64],
    tol: &Tolerances,
) -> Result<LimitReport> {
    if !candidate.is_finite() {
        return Err(Error::InvalidArgument(format!("candidate limit {candidate} is not finite")));
    }
    if eps_schedule.is_empty() {
        return Err(Error::InvalidArgument("empty eps schedule".into()));
    }
    if eps_schedule.iter().any(|e| !(e.is_finite() && *e > 0.0))
        || eps_schedule.windows(2).any(|p| p[1] >= p[0])
    {
        return Err(Error::InvalidArgument(format!(
            "eps schedule {eps_schedule:?} must be positive and strictly decreasing"
        )));
    }

    let horizon = x.horizon();
    let checks: Vec<EpsCheck> = if let Some(tail) = mode.tail_indices(horizon)? {
        let deviation = tail
            .iter()
            .map(|&w| (x.sequence_value(w) - candidate).abs())
            .fold(0.0, f64::max);
        eps_schedule
            .iter()
            .map(|&eps| EpsCheck {
                eps,
                passed: deviation <= eps,
                statistic: deviation,
            })
            .collect()
    } else {
        match mode {
            ConvergenceMode::Almost { m_max } => {
                let deviation = almost_deviation(x, *m_max, candidate)?;
                eps_schedule
                    .iter()
                    .map(|&eps| EpsCheck {
                        eps,
                        passed: deviation <= eps,
                        statistic: deviation,
                    })
                    .collect()
            }
            ConvergenceMode::PsiAStatistical { matrix, shape } => {
                let mut out = Vec::with_capacity(eps_schedule.len());
                let mut masses = None;
                for &eps in eps_schedule {
                    let estimate = exceptional_density(x, matrix, shape, candidate, eps, &mut masses, tol)?;
                    out.push(EpsCheck {
                        eps,
                        passed: estimate <= tol.density_tol,
                        statistic: estimate,
                    });
                }
                out
            }
            _ => unreachable!("tail modes handled above"),
        }
    };

    let converges = checks.iter().all(|c| c.passed);
    let worst = checks
        .iter()
        .find(|c| !c.passed)
        .or_else(|| checks.last())
        .cloned()
        .expect("schedule is non-empty");
    Ok(LimitReport {
        candidate,
        converges,
        checks,
        worst,
    })
}

/// Weight of column `j` averaged over the tail rows, `j ≤ horizon`.
///
/// For a single net under column extension, the density estimate of a
/// column set is the sum of these masses over its members.
pub(crate) fn tail_column_masses(matrix: &SummabilityMatrix, shape: &ShapeFunction, horizon: usize) -> Vec<f64> {
    let start = tail_start(horizon);
    let rows = (horizon - start) as f64;
    let mut mass = vec![KahanSum::new(); horizon];
    for i in start + 1..=horizon {
        for j in shape.row_columns(matrix, i).take_while(|&j| j <= horizon) {
            mass[j - 1].add(matrix.entry(i, j) / rows);
        }
    }
    mass.iter().map(KahanSum::total).collect()
}

/// Density of `K(ε) = {(i, j): Ψ(i, j) ≥ 0, |x_{i,j} − candidate| ≥ ε}`.
fn exceptional_density(
    x: &Net,
    matrix: &SummabilityMatrix,
    shape: &ShapeFunction,
    candidate: f64,
    eps: f64,
    masses: &mut Option<Vec<f64>>,
    tol: &Tolerances,
) -> Result<f64> {
    let horizon = x.horizon();
    match x.kind() {
        IndexKind::Single => {
            let masses = masses.get_or_insert_with(|| tail_column_masses(matrix, shape, horizon));
            Ok(kahan_sum(
                x.values()
                    .iter()
                    .zip(masses.iter())
                    .filter(|(v, _)| (*v - candidate).abs() >= eps)
                    .map(|(_, m)| *m),
            ))
        }
        IndexKind::Pair => {
            let far: Vec<bool> = x.values().iter().map(|v| (v - candidate).abs() >= eps).collect();
            let k = |i: usize, j: usize| j <= horizon && far[(i - 1) * horizon + (j - 1)];
            Ok(triangular_density(&k, matrix, shape, horizon, tol)?.estimate)
        }
    }
}
