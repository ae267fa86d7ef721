use rayon::prelude::*;

use super::system::TestSystem;
use crate::convergence::{rate_classify, ConvergenceMode, Net, RateClass};
use crate::error::{Error, Result};
use crate::modular::{distance, modulus_of_continuity, FunctionSample, OrliczModular};
use crate::operators::OperatorFamily;
use crate::tolerances::Tolerances;

/// Relative cut-off below which a sample counts as vanishing.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Slack for the error decomposition inequality.
pub const DECOMPOSITION_SLACK: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct PipelineSettings {
    pub gamma: f64,
    pub horizon: usize,
    pub mode: ConvergenceMode,
    pub tolerances: Tolerances,
}

/// A Lipschitz function with a declared Lipschitz constant.
#[derive(Clone, Debug)]
pub struct LipschitzProbe {
    pub label: String,
    pub f: FunctionSample,
    pub lipschitz: f64,
}

/// Error net of one test function against its own ξ net.
#[derive(Clone, Debug)]
pub struct NetRecord {
    pub label: String,
    pub error_net: Net,
    pub xi: Net,
    pub classification: RateClass,
}

#[derive(Clone, Debug)]
pub struct ProbeRecord {
    pub label: String,
    pub tau: f64,
    /// `1 + sup|f|` for the Lipschitz pipeline, `sup|f|` for the continuity one.
    pub m_sup: f64,
    pub lipschitz: Option<f64>,
    pub error_net: Net,
    /// `error / ξ` with the combined ξ.
    pub ratio_net: Net,
    pub classification: RateClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Implication {
    pub o_premise: bool,
    pub o_conclusion: bool,
    pub o_held: bool,
    pub big_o_premise: bool,
    pub big_o_conclusion: bool,
    pub big_o_held: bool,
}

impl Implication {
    fn from_records(tests: &[NetRecord], probes: &[ProbeRecord]) -> Self {
        let o_premise = tests.iter().all(|t| t.classification.kind == crate::convergence::RateKind::LittleO);
        let o_conclusion = probes.iter().all(|p| p.classification.kind == crate::convergence::RateKind::LittleO);
        let big_o_premise = tests.iter().all(|t| t.classification.kind.satisfies_big_o());
        let big_o_conclusion = probes.iter().all(|p| p.classification.kind.satisfies_big_o());
        Self {
            o_premise,
            o_conclusion,
            o_held: !o_premise || o_conclusion,
            big_o_premise,
            big_o_conclusion,
            big_o_held: !big_o_premise || big_o_conclusion,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineKind {
    Lipschitz,
    Continuity,
}

#[derive(Clone, Debug)]
pub struct RateReport {
    pub pipeline: PipelineKind,
    pub family: String,
    pub mode: String,
    pub gamma: f64,
    /// Smallest τ over the probes.
    pub tau: f64,
    pub q: f64,
    pub c1: Option<f64>,
    pub delta_min: Option<f64>,
    pub n_bound: Option<f64>,
    /// `max_r ξ^r` indexwise.
    pub xi_combined: Net,
    pub test_functions: Vec<NetRecord>,
    pub probes: Vec<ProbeRecord>,
    /// `δ^f_w`, continuity pipeline only.
    pub delta_net: Option<Net>,
    /// `ω(f; max(δ^f_w, h_min))`, continuity pipeline only.
    pub omega_net: Option<Net>,
    pub implication: Implication,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {x} must be positive and finite")))
    }
}

/// `min{γ·C1 / (2·C2·(m+1)·N·Q²), γ / (2·M·Q²)}`.
pub fn tau_lipschitz(gamma: f64, c1: f64, c2: f64, functions: usize, n_bound: f64, q: f64, m_sup: f64) -> Result<f64> {
    for (name, x) in [("gamma", gamma), ("C1", c1), ("C2", c2), ("N", n_bound), ("M", m_sup)] {
        positive(name, x)?;
    }
    if functions == 0 || q < 1.0 {
        return Err(Error::InvalidArgument(format!("need m+1 ≥ 1 and Q ≥ 1, got {functions} and {q}")));
    }
    let q2 = q * q;
    let first = gamma * c1 / (2.0 * c2 * functions as f64 * n_bound * q2);
    let second = gamma / (2.0 * m_sup * q2);
    Ok(first.min(second))
}

/// `γ / (8·M·Q²)`.
pub fn tau_continuity(gamma: f64, m_sup: f64, q: f64) -> Result<f64> {
    positive("gamma", gamma)?;
    positive("M", m_sup)?;
    if q < 1.0 {
        return Err(Error::InvalidArgument(format!("Q = {q} must be at least 1")));
    }
    let q2 = q * q;
    Ok(gamma / (8.0 * m_sup * q2))
}

fn check_xi(xi: &Net, horizon: usize, label: &str) -> Result<()> {
    if xi.horizon() != horizon {
        return Err(Error::Mismatch(format!("ξ net '{label}' has horizon {}, expected {horizon}", xi.horizon())));
    }
    if let Some(pos) = xi.values().iter().position(|&v| v == 0.0) {
        return Err(Error::ZeroDenominator(format!("ξ net '{label}' vanishes at w = {}", pos + 1)));
    }
    Ok(())
}

fn combine_xi(nets: &[&Net]) -> Result<Net> {
    let n = nets[0].values().len();
    Net::from_values(
        (0..n)
            .map(|k| nets.iter().map(|x| x.values()[k]).fold(f64::NEG_INFINITY, f64::max))
            .collect(),
    )
}

/// `ρ[c·(T_w f − f)]`.
fn scaled_error(family: &dyn OperatorFamily, rho: &OrliczModular, w: usize, f: &FunctionSample, c: f64) -> Result<f64> {
    let image = family.apply(w, f)?;
    let diff: Vec<f64> = image.values().iter().zip(f.values()).map(|(t, v)| c * (t - v)).collect();
    Ok(rho.modular_of_values(&diff))
}

fn classify(errors: Vec<f64>, xi: &Net, settings: &PipelineSettings) -> Result<(Net, RateClass)> {
    let net = Net::from_values(errors)?;
    let class = rate_classify(&net, xi, &settings.mode, &settings.tolerances)?;
    Ok((net, class))
}

fn check_grids(rho: &OrliczModular, samples: &[&FunctionSample]) -> Result<()> {
    if samples.iter().all(|f| f.grid().same_as(rho.grid())) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Error nets of the test functions against their ξ nets, and of Lipschitz
/// probes at the τ prescribed for them against the combined ξ.
pub fn rates_pipeline_lipschitz(
    family: &dyn OperatorFamily,
    system: &TestSystem,
    rho: &OrliczModular,
    xi: &[Net],
    probes: &[LipschitzProbe],
    settings: &PipelineSettings,
) -> Result<RateReport> {
    let verification = system
        .verification()
        .ok_or_else(|| Error::UnverifiedSystem(format!("system '{}' has not been verified", system.name())))?;
    let c1 = verification.c1_est;
    positive("gamma", settings.gamma)?;
    if probes.is_empty() {
        return Err(Error::InvalidArgument("no probes".into()));
    }
    let functions = system.m() + 1;
    if xi.len() != functions {
        return Err(Error::InvalidArgument(format!("{} ξ nets for {functions} test functions", xi.len())));
    }
    let horizon = settings.horizon;
    for (r, x) in xi.iter().enumerate() {
        check_xi(x, horizon, &format!("xi{r}"))?;
    }
    let mut all: Vec<&FunctionSample> = system.e().iter().collect();
    all.extend(probes.iter().map(|p| &p.f));
    check_grids(rho, &all)?;

    let q = rho.q();
    let mut taus = Vec::with_capacity(probes.len());
    for p in probes {
        let m_sup = 1.0 + p.f.sup_abs();
        taus.push((tau_lipschitz(settings.gamma, c1, p.lipschitz, functions, system.n_bound(), q, m_sup)?, m_sup));
    }

    // rows[w - 1] = (test-function errors, probe errors)
    let rows = (1..=horizon)
        .into_par_iter()
        .map(|w| {
            let tests = system
                .e()
                .iter()
                .map(|e| scaled_error(family, rho, w, e, settings.gamma))
                .collect::<Result<Vec<f64>>>()?;
            let probe_errors = probes
                .iter()
                .zip(&taus)
                .map(|(p, &(tau, _))| scaled_error(family, rho, w, &p.f, tau))
                .collect::<Result<Vec<f64>>>()?;
            Ok((tests, probe_errors))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut test_functions = Vec::with_capacity(functions);
    for (r, x) in xi.iter().enumerate() {
        let (error_net, classification) = classify(rows.iter().map(|(t, _)| t[r]).collect(), x, settings)?;
        test_functions.push(NetRecord {
            label: format!("e{r}"),
            error_net,
            xi: x.clone(),
            classification,
        });
    }
    let xi_combined = combine_xi(&xi.iter().collect::<Vec<_>>())?;
    let mut probe_records = Vec::with_capacity(probes.len());
    for (k, p) in probes.iter().enumerate() {
        let (error_net, classification) = classify(rows.iter().map(|(_, e)| e[k]).collect(), &xi_combined, settings)?;
        let ratio_net = error_net.zip_with(&xi_combined, |e, x| e / x)?;
        probe_records.push(ProbeRecord {
            label: p.label.clone(),
            tau: taus[k].0,
            m_sup: taus[k].1,
            lipschitz: Some(p.lipschitz),
            error_net,
            ratio_net,
            classification,
        });
    }

    let implication = Implication::from_records(&test_functions, &probe_records);
    Ok(RateReport {
        pipeline: PipelineKind::Lipschitz,
        family: family.name(),
        mode: settings.mode.name(),
        gamma: settings.gamma,
        tau: taus.iter().map(|t| t.0).fold(f64::INFINITY, f64::min),
        q,
        c1: Some(c1),
        delta_min: Some(verification.delta_min),
        n_bound: Some(system.n_bound()),
        xi_combined,
        test_functions,
        probes: probe_records,
        delta_net: None,
        omega_net: None,
        implication,
    })
}

/// `sup_{s ∈ supp f} |T_w(d(s, ·))(s)|`.
pub fn distance_moment(family: &dyn OperatorFamily, f: &FunctionSample, w: usize) -> Result<f64> {
    let grid = f.grid();
    let sup = f.sup_abs();
    let mut best = 0.0f64;
    for (k, s) in grid.nodes().enumerate() {
        if f.values()[k].abs() <= SUPPORT_CUTOFF * sup {
            continue;
        }
        let anchor = s.to_vec();
        let slice = std::sync::Arc::new(move |t: &[f64]| distance(&anchor, t));
        best = best.max(family.apply_at(w, slice, s)?.abs());
    }
    Ok(best)
}

/// Error nets of `e_0` and of the modulus term, and of `f` at
/// `τ = γ/(8·M·Q²)` against `max(ξ⁰, ξ*)`.
pub fn rates_pipeline_continuity(
    family: &dyn OperatorFamily,
    f: &FunctionSample,
    rho: &OrliczModular,
    xi0: &Net,
    xistar: &Net,
    settings: &PipelineSettings,
) -> Result<RateReport> {
    positive("gamma", settings.gamma)?;
    let horizon = settings.horizon;
    check_xi(xi0, horizon, "xi0")?;
    check_xi(xistar, horizon, "xistar")?;
    let one = FunctionSample::constant(f.grid(), 1.0)?;
    check_grids(rho, &[f, &one])?;
    let m_sup = f.sup_abs();
    if m_sup == 0.0 {
        return Err(Error::InvalidArgument("f vanishes identically".into()));
    }
    let q = rho.q();
    let tau = tau_continuity(settings.gamma, m_sup, q)?;
    let h_min = f.grid().h_min();

    // (δ, ω, e0 error, ω term, f error) per w
    let rows = (1..=horizon)
        .into_par_iter()
        .map(|w| {
            let delta = distance_moment(family, f, w)?;
            let omega = modulus_of_continuity(f, delta.max(h_min))?;
            let e0 = scaled_error(family, rho, w, &one, settings.gamma)?;
            let omega_term = rho.of_constant(settings.gamma * omega);
            let err = scaled_error(family, rho, w, f, tau)?;
            Ok([delta, omega, e0, omega_term, err])
        })
        .collect::<Result<Vec<[f64; 5]>>>()?;
    let column = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<f64>>();

    let (e0_net, e0_class) = classify(column(2), xi0, settings)?;
    let (omega_term_net, omega_class) = classify(column(3), xistar, settings)?;
    let test_functions = vec![
        NetRecord {
            label: "e0".into(),
            error_net: e0_net,
            xi: xi0.clone(),
            classification: e0_class,
        },
        NetRecord {
            label: "omega".into(),
            error_net: omega_term_net,
            xi: xistar.clone(),
            classification: omega_class,
        },
    ];
    let xi_combined = combine_xi(&[xi0, xistar])?;
    let (error_net, classification) = classify(column(4), &xi_combined, settings)?;
    let ratio_net = error_net.zip_with(&xi_combined, |e, x| e / x)?;
    let probes = vec![ProbeRecord {
        label: "f".into(),
        tau,
        m_sup,
        lipschitz: None,
        error_net,
        ratio_net,
        classification,
    }];
    let implication = Implication::from_records(&test_functions, &probes);
    Ok(RateReport {
        pipeline: PipelineKind::Continuity,
        family: family.name(),
        mode: settings.mode.name(),
        gamma: settings.gamma,
        tau,
        q,
        c1: None,
        delta_min: None,
        n_bound: None,
        xi_combined,
        test_functions,
        probes,
        delta_net: Some(Net::from_values(column(0))?),
        omega_net: Some(Net::from_values(column(1))?),
        implication,
    })
}

/// Both sides of `ρ[τ(T_w f − f)] ≤ ρ[2τ·C2/C1·(T_w P_(·))(·)] + ρ[2τ·M·(T_w e_0 − e_0)]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DecompositionCheck {
    pub w: usize,
    pub left: f64,
    pub p_term: f64,
    pub e0_term: f64,
    pub right: f64,
    pub holds: bool,
}

pub fn decomposition_check(
    family: &dyn OperatorFamily,
    system: &TestSystem,
    rho: &OrliczModular,
    probe: &LipschitzProbe,
    tau: f64,
    w: usize,
) -> Result<DecompositionCheck> {
    let c1 = system
        .c1()
        .ok_or_else(|| Error::UnverifiedSystem(format!("system '{}' has not been verified", system.name())))?;
    positive("tau", tau)?;
    let grid = system.grid();
    check_grids(rho, &[&probe.f, &system.e()[0]])?;
    let m_sup = 1.0 + probe.f.sup_abs();

    let left = scaled_error(family, rho, w, &probe.f, tau)?;
    let t_p = grid
        .nodes()
        .map(|s| family.apply_at(w, system.p_slice(s), s))
        .collect::<Result<Vec<f64>>>()?;
    let scale = 2.0 * tau * probe.lipschitz / c1;
    let p_term = rho.modular_of_values(&t_p.iter().map(|v| scale * v).collect::<Vec<_>>());
    let e0_term = scaled_error(family, rho, w, &system.e()[0], 2.0 * tau * m_sup)?;
    let right = p_term + e0_term;
    Ok(DecompositionCheck {
        w,
        left,
        p_term,
        e0_term,
        right,
        holds: left <= right + DECOMPOSITION_SLACK,
    })
}
