use serde::Serialize;

use crate::convergence::{filter_limsup_liminf, ConvergenceMode, Net};
use crate::error::{Error, Result};
use crate::modular::{FunctionSample, OrliczModular};
use crate::operators::OperatorFamily;
use crate::tolerances::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoStarEntry {
    pub probe: usize,
    pub tau: f64,
    /// Filter limsup of `w ↦ ρ[τ·T_w f] / ρ[τ·f]`.
    pub limsup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoStarReport {
    pub e_est: f64,
    /// `e_est` is finite and at most `big_c_cap`.
    pub holds: bool,
    pub entries: Vec<RhoStarEntry>,
}

/// Estimates the smallest `E` with `limsup_w ρ[τ·T_w f] ≤ E·ρ[τ·f]`.
pub fn check_rho_star(
    family: &dyn OperatorFamily,
    rho: &OrliczModular,
    probes: &[FunctionSample],
    mode: &ConvergenceMode,
    tau_list: &[f64],
    horizon: usize,
    tol: &Tolerances,
) -> Result<RhoStarReport> {
    if probes.is_empty() || tau_list.is_empty() {
        return Err(Error::InvalidArgument("need at least one probe and one tau".into()));
    }
    let mut entries = Vec::new();
    for (idx, f) in probes.iter().enumerate() {
        let images = (1..=horizon).map(|w| family.apply(w, f)).collect::<Result<Vec<_>>>()?;
        for &tau in tau_list {
            if !(tau.is_finite() && tau > 0.0) {
                return Err(Error::InvalidArgument(format!("tau {tau} must be positive")));
            }
            let denominator = rho.modular(&f.scale(tau))?;
            if denominator <= 0.0 {
                return Err(Error::VanishingDenominator(format!("ρ[τ·f] = 0 for probe {idx}, τ = {tau}")));
            }
            let ratios = images
                .iter()
                .map(|img| Ok(rho.modular(&img.scale(tau))? / denominator))
                .collect::<Result<Vec<f64>>>()?;
            let limsup = filter_limsup_liminf(&Net::from_values(ratios)?, mode, tol)?.limsup;
            entries.push(RhoStarEntry { probe: idx, tau, limsup });
        }
    }
    let e_est = entries.iter().map(|e| e.limsup).fold(f64::NEG_INFINITY, f64::max);
    Ok(RhoStarReport {
        e_est,
        holds: e_est.is_finite() && e_est <= tol.big_c_cap,
        entries,
    })
}
