use serde::Serialize;

use super::limits::filter_limsup_liminf;
use super::mode::ConvergenceMode;
use super::net::Net;
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Verdict ordering: `LittleO < BigO < Neither`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum RateKind {
    LittleO,
    BigO,
    Neither,
}

impl RateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::LittleO => "o",
            Self::BigO => "O",
            Self::Neither => "neither",
        }
    }

    /// Every little-o verdict also satisfies the big-O bound.
    pub fn satisfies_big_o(self) -> bool {
        self != Self::Neither
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateClass {
    pub kind: RateKind,
    /// Filter limsup of `|num| / |den|`.
    pub limsup_estimate: f64,
    /// Ratio at `w = 1, 2, 4, …` and at the horizon.
    pub evidence: Vec<(usize, f64)>,
}

/// Classifies `num` against `den` as little-o, big-O or neither under `mode`.
pub fn rate_classify(num: &Net, den: &Net, mode: &ConvergenceMode, tol: &Tolerances) -> Result<RateClass> {
    num.check_compatible(den)?;
    if let Some(pos) = den.values().iter().position(|&d| d == 0.0) {
        return Err(Error::ZeroDenominator(format!("denominator vanishes at raw index {}", pos + 1)));
    }
    let ratio = num.zip_with(den, |a, b| a.abs() / b.abs())?;
    let limsup = filter_limsup_liminf(&ratio, mode, tol)?.limsup;
    let kind = if limsup <= tol.o_tol {
        RateKind::LittleO
    } else if limsup.is_finite() && limsup <= tol.big_c_cap {
        RateKind::BigO
    } else {
        RateKind::Neither
    };
    let horizon = ratio.horizon();
    let mut ladder: Vec<usize> = std::iter::successors(Some(1usize), |w| w.checked_mul(2))
        .take_while(|&w| w < horizon)
        .collect();
    ladder.push(horizon);
    let evidence = ladder.into_iter().map(|w| (w, ratio.sequence_value(w))).collect();
    Ok(RateClass {
        kind,
        limsup_estimate: limsup,
        evidence,
    })
}
