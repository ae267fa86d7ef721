//! The experiments behind `run`.

use std::collections::BTreeMap;
use std::sync::Arc;

use korovkin_lab::convergence::{
    check_summability_axioms, filter_limsup_liminf, mode_limit, triangular_density, AxiomReport, ConvergenceMode,
    DensityReport, Net, RateKind, ShapeFunction,
};
use korovkin_lab::engine::{
    build_test_system_euclidean, build_test_system_trig, check_rho_star, csv_header, rates_pipeline_continuity,
    rates_pipeline_lipschitz, verify_p_axioms, LipschitzProbe, PAxiomReport, PhiMap, PipelineSettings, RateReport,
    TestSystem,
};
use korovkin_lab::modular::{build_grid, FunctionSample, Grid, OrliczModular};
use korovkin_lab::operators::{
    gated_kantorovich, Identity, Kantorovich, KantorovichParams, Mellin, MellinParams, OperatorFamily, Zero,
};
use korovkin_lab::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{
    ExperimentConfig, ExperimentKind, FamilyName, KindName, MatrixName, PipelineName, SetName, SystemSpec,
};
use crate::error::CliError;
use crate::report::{ExpectationCheck, Results};

/// Default separation for the (P2) estimate in the rate experiments.
pub const DEFAULT_RATE_DELTA_MIN: f64 = 0.5;
/// Terms in a seeded random probe `Σ a_k sin(⟨b_k, t⟩ + c_k)`.
const RANDOM_PROBE_TERMS: usize = 3;

pub fn run_experiment(config: &ExperimentConfig) -> Result<Results, CliError> {
    let tol = config.tolerances();
    let echo = serde_json::to_value(config).map_err(|e| CliError::Config(e.to_string()))?;
    match config.experiment {
        ExperimentKind::MellinRates | ExperimentKind::KantorovichRates => rates(config, echo, tol),
        ExperimentKind::Density => {
            let (matrix, set) = (config.params.matrix.unwrap_or(MatrixName::Cesaro), config.params.set.unwrap_or(SetName::Squares));
            density(echo, tol, matrix, set, config.horizon, &config.expect)
        }
        ExperimentKind::Limit => limit(config, echo, tol),
        ExperimentKind::Limsup => limsup(config, echo, tol),
        ExperimentKind::CheckSystem => check_system(config, echo, tol),
        ExperimentKind::RhoStar => rho_star(config, echo, tol),
    }
}

fn grid_of(config: &ExperimentConfig) -> Result<Arc<Grid>, CliError> {
    let spec = config.grid.as_ref().ok_or_else(|| CliError::Config("grid is required".into()))?;
    Ok(build_grid(spec.region.clone(), spec.resolution)?)
}

fn mode_of(config: &ExperimentConfig, tol: &Tolerances) -> Result<ConvergenceMode, CliError> {
    config
        .mode
        .as_ref()
        .ok_or_else(|| CliError::Config("mode is required".into()))?
        .build(config.horizon, tol)
}

fn uses_simplex(family: FamilyName) -> bool {
    matches!(family, FamilyName::Kantorovich | FamilyName::GatedKantorovich)
}

fn family_of(config: &ExperimentConfig, family: FamilyName) -> Result<Box<dyn OperatorFamily>, CliError> {
    let horizon = config.horizon;
    let p = &config.params;
    Ok(match family {
        FamilyName::Mellin => {
            let dim = grid_of(config)?.dim();
            let kernel_set = p.kernel_set.unwrap_or(SetName::NonSquares).index_set();
            Box::new(Mellin::new(MellinParams::with_set(dim, horizon, kernel_set)?)?)
        }
        FamilyName::Kantorovich => Box::new(Kantorovich::new(horizon)?),
        FamilyName::GatedKantorovich => {
            let gate = p.gate_set.unwrap_or(SetName::Squares).index_set();
            Box::new(gated_kantorovich(&KantorovichParams::with_gate(horizon, gate)?)?)
        }
        FamilyName::Identity => Box::new(Identity),
        FamilyName::Zero => Box::new(Zero),
    })
}

/// Fixed probes for the family plus `random` seeded trigonometric sums,
/// each with a Lipschitz bound.
fn probes_for(grid: &Arc<Grid>, simplex: bool, seed: u64, random: usize) -> Result<Vec<LipschitzProbe>, CliError> {
    let probe = |label: &str, lipschitz: f64, f: FunctionSample| LipschitzProbe {
        label: label.to_string(),
        f,
        lipschitz,
    };
    let mut out = if simplex {
        vec![
            probe("uv", 1.0, FunctionSample::from_fn(grid, |t| t[0] * t[1])?),
            probe("sin-sum", 2f64.sqrt(), FunctionSample::from_fn(grid, |t| (t[0] + t[1]).sin())?),
        ]
    } else {
        let n = grid.dim() as f64;
        vec![
            probe("t1", 1.0, FunctionSample::from_fn(grid, |t| t[0])?),
            probe(
                "mean-square",
                2.0 / n.sqrt(),
                FunctionSample::from_fn(grid, move |t| t.iter().map(|x| x * x).sum::<f64>() / n)?,
            ),
            probe(
                "sine",
                1.0,
                FunctionSample::from_fn(grid, |t| (std::f64::consts::PI * t[0]).sin() / std::f64::consts::PI)?,
            ),
        ]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    for k in 0..random {
        let terms: Vec<(f64, Vec<f64>, f64)> = (0..RANDOM_PROBE_TERMS)
            .map(|_| {
                let a = rng.gen_range(-1.0..1.0);
                let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect();
                (a, b, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let lipschitz = terms
            .iter()
            .map(|(a, b, _)| a.abs() * b.iter().map(|x| x * x).sum::<f64>().sqrt())
            .sum::<f64>();
        let f = FunctionSample::from_fn(grid, move |t| {
            terms
                .iter()
                .map(|(a, b, c)| a * (b.iter().zip(t).map(|(x, y)| x * y).sum::<f64>() + c).sin())
                .sum()
        })?;
        out.push(probe(&format!("random-{k}"), lipschitz, f));
    }
    Ok(out)
}

fn fmt(x: f64) -> String {
    x.to_string()
}

fn rates(config: &ExperimentConfig, echo: serde_json::Value, tol: Tolerances) -> Result<Results, CliError> {
    let horizon = config.horizon;
    let p = &config.params;
    let grid = grid_of(config)?;
    let simplex = config.experiment == ExperimentKind::KantorovichRates;
    let family = family_of(config, if simplex { FamilyName::GatedKantorovich } else { FamilyName::Mellin })?;
    let phi = config.phi.unwrap_or(korovkin_lab::modular::PhiFunction::Linear);
    let rho = OrliczModular::new(phi, &grid, p.q.unwrap_or(1.0))?;
    let xi = config.xi.ok_or_else(|| CliError::Config("xi is required".into()))?.net(horizon)?;
    let settings = PipelineSettings {
        gamma: config.gamma.unwrap_or(1.0),
        horizon,
        mode: mode_of(config, &tol)?,
        tolerances: tol,
    };
    let probes = probes_for(&grid, simplex, config.seed, p.random_probes.unwrap_or(0))?;

    let pipeline = p.pipeline.unwrap_or(PipelineName::Lipschitz);
    let reports: Vec<RateReport> = match pipeline {
        PipelineName::Lipschitz => {
            let delta_min = p.delta_min.unwrap_or(DEFAULT_RATE_DELTA_MIN);
            let system = build_test_system_euclidean(PhiMap::Identity, grid.dim(), &grid)?.verified(delta_min)?;
            let xis: Vec<Net> = (0..=system.m()).map(|_| xi.clone()).collect();
            vec![rates_pipeline_lipschitz(family.as_ref(), &system, &rho, &xis, &probes, &settings)?]
        }
        PipelineName::Continuity => {
            if p.delta_min.is_some() {
                return Err(CliError::Config("params.delta_min applies only to the lipschitz pipeline".into()));
            }
            probes
                .iter()
                .map(|probe| {
                    let mut report = rates_pipeline_continuity(family.as_ref(), &probe.f, &rho, &xi, &xi, &settings)?;
                    report.probes[0].label = probe.label.clone();
                    Ok(report)
                })
                .collect::<Result<_, CliError>>()?
        }
    };

    let first = &reports[0];
    let mut results = Results::new(echo, tol, &[]);
    let mut probe_index = 0;
    let mut implications = BTreeMap::new();
    let mut taus = BTreeMap::new();
    for report in &reports {
        for (k, probe) in report.probes.iter().enumerate() {
            let rows = report.rows(k)?;
            let table = if probe_index == 0 {
                results.evidence()
            } else {
                results.tables.push(crate::report::Table::new(format!("evidence_{probe_index}"), &[]));
                results.tables.last_mut().expect("just pushed")
            };
            table.header = csv_header(report.m());
            table.rows = rows
                .into_iter()
                .map(|r| {
                    let mut rec = vec![r.w.to_string()];
                    rec.extend(r.errors.iter().copied().map(fmt));
                    rec.extend([fmt(r.err_f), fmt(r.ratio_f), r.class.to_string()]);
                    rec
                })
                .collect();
            results.classifications.insert(probe.label.clone(), probe.classification.kind.as_str().into());
            results.limsup_estimates.insert(probe.label.clone(), probe.classification.limsup_estimate);
            implications.insert(probe.label.clone(), report.implication);
            taus.insert(probe.label.clone(), probe.tau);
            probe_index += 1;
        }
    }
    for rec in &first.test_functions {
        results.classifications.insert(rec.label.clone(), rec.classification.kind.as_str().into());
        results.limsup_estimates.insert(rec.label.clone(), rec.classification.limsup_estimate);
    }
    let evidence_files: Vec<String> = results.tables.iter().map(|t| format!("{}.csv", t.name)).collect();
    let probe_files: BTreeMap<String, String> = reports
        .iter()
        .flat_map(|r| r.probes.iter().map(|p| p.label.clone()))
        .zip(evidence_files)
        .collect();
    results.note("pipeline", first.pipeline);
    results.note("family", &first.family);
    results.note("mode", &first.mode);
    results.note("gamma", first.gamma);
    results.note("q", first.q);
    results.note("c1", first.c1);
    results.note("delta_min", first.delta_min);
    results.note("n_bound", first.n_bound);
    results.note("tau", &taus);
    results.note("implication", &implications);
    results.note("evidence_files", &probe_files);

    let kinds: Vec<RateKind> = reports
        .iter()
        .flat_map(|r| {
            r.test_functions
                .iter()
                .map(|t| t.classification.kind)
                .chain(r.probes.iter().map(|p| p.classification.kind))
        })
        .collect();
    let e = &config.expect;
    if let Some(want) = e.all_big_o {
        results.expectations.push(ExpectationCheck::equal("all_big_o", want, kinds.iter().all(|k| k.satisfies_big_o())));
    }
    if let Some(want) = e.all_little_o {
        results.expectations.push(ExpectationCheck::equal("all_little_o", want, kinds.iter().all(|&k| k == RateKind::LittleO)));
    }
    if let Some(want) = e.implication_held {
        let held = implications.values().all(|i| i.o_held && i.big_o_held);
        results.expectations.push(ExpectationCheck::equal("implication_held", want, held));
    }
    if let Some(wanted) = &e.classifications {
        for (label, kind) in wanted {
            let observed = results.classifications.get(label).cloned();
            let held = observed.as_deref() == Some(kind.as_str());
            results.expectations.push(ExpectationCheck::new(&format!("classification.{label}"), kind, observed, held));
        }
    }
    if let Some((lo, hi)) = e.limsup_range {
        // Only nets classified exactly big-O carry a meaningful finite limsup.
        let big: BTreeMap<String, f64> = results
            .classifications
            .iter()
            .filter(|(_, k)| k.as_str() == KindName::BigO.as_str())
            .map(|(label, _)| (label.clone(), results.limsup_estimates[label]))
            .collect();
        let held = big.values().all(|&v| lo <= v && v <= hi);
        results.expectations.push(ExpectationCheck::new("limsup_range", [lo, hi], big, held));
    }
    Ok(results)
}

/// Density of the column set `{(i, j): j ∈ set}` and the axiom report of the matrix.
pub fn density_summary(
    matrix: MatrixName,
    set: SetName,
    i_max: usize,
    tol: &Tolerances,
) -> Result<(DensityReport, AxiomReport), CliError> {
    let a = matrix.matrix();
    let shape = ShapeFunction::triangular();
    let members = set.index_set();
    let report = triangular_density(&|_, j| members.contains(j), &a, &shape, i_max, tol)?;
    let axioms = check_summability_axioms(&a, &shape, i_max, tol)?;
    Ok((report, axioms))
}

pub fn density_json(matrix: MatrixName, set: SetName, i_max: usize, report: &DensityReport, axioms: &AxiomReport) -> serde_json::Value {
    json!({
        "matrix": matrix,
        "set": set,
        "i_max": i_max,
        "estimate": report.estimate,
        "converged": report.converged,
        "oscillation": report.oscillation,
        "axioms": {
            "a1": axioms.a1,
            "a1_max_row_sum": axioms.a1_max_row_sum,
            "a2": axioms.a2,
            "a2_liminf_estimate": axioms.a2_liminf_estimate,
            "a3": axioms.a3,
            "failures": axioms.failures(),
        },
    })
}

fn density(
    echo: serde_json::Value,
    tol: Tolerances,
    matrix: MatrixName,
    set: SetName,
    i_max: usize,
    expect: &crate::config::Expectations,
) -> Result<Results, CliError> {
    let (report, axioms) = density_summary(matrix, set, i_max, &tol)?;
    let mut results = Results::new(echo, tol, &["i", "partial_sum"]);
    results.evidence().rows = report.partial_sums.iter().map(|&(i, s)| vec![i.to_string(), fmt(s)]).collect();
    if let serde_json::Value::Object(map) = density_json(matrix, set, i_max, &report, &axioms) {
        results.summary.extend(map);
    }
    if let Some((lo, hi)) = expect.estimate_range {
        let held = lo <= report.estimate && report.estimate <= hi;
        results.expectations.push(ExpectationCheck::new("estimate_range", [lo, hi], report.estimate, held));
    }
    if let Some(want) = expect.axioms_pass {
        results.expectations.push(ExpectationCheck::equal("axioms_pass", want, axioms.passes()));
    }
    Ok(results)
}

fn net_of(config: &ExperimentConfig) -> Result<Net, CliError> {
    config
        .params
        .net
        .as_ref()
        .ok_or_else(|| CliError::Config("params.net is required".into()))?
        .build(config.horizon, config.seed)
}

fn limit(config: &ExperimentConfig, echo: serde_json::Value, tol: Tolerances) -> Result<Results, CliError> {
    let x = net_of(config)?;
    let mode = mode_of(config, &tol)?;
    let candidate = config.params.candidate.ok_or_else(|| CliError::Config("params.candidate is required".into()))?;
    let schedule = config.params.eps_schedule.clone().unwrap_or_default();
    let report = mode_limit(&x, &mode, candidate, &schedule, &tol)?;
    let mut results = Results::new(echo, tol, &["eps", "passed", "statistic"]);
    results.evidence().rows = report
        .checks
        .iter()
        .map(|c| vec![fmt(c.eps), c.passed.to_string(), fmt(c.statistic)])
        .collect();
    let verdict = if report.converges { "converges" } else { "does-not-converge" };
    results.classifications.insert("net".into(), verdict.into());
    results.note("mode", mode.name());
    results.note("candidate", candidate);
    results.note("converges", report.converges);
    results.note("worst", &report.worst);
    if let Some(want) = config.expect.converges {
        results.expectations.push(ExpectationCheck::equal("converges", want, report.converges));
    }
    Ok(results)
}

fn limsup(config: &ExperimentConfig, echo: serde_json::Value, tol: Tolerances) -> Result<Results, CliError> {
    let x = net_of(config)?;
    let mode = mode_of(config, &tol)?;
    let bounds = filter_limsup_liminf(&x, &mode, &tol)?;
    let converges = bounds.coincide(tol.level_tol);
    let mut results = Results::new(echo, tol, &["w", "value"]);
    results.evidence().rows = x.values().iter().enumerate().map(|(k, &v)| vec![(k + 1).to_string(), fmt(v)]).collect();
    results.classifications.insert("net".into(), if converges { "converges" } else { "does-not-converge" }.into());
    results.limsup_estimates.insert("net".into(), bounds.limsup);
    results.note("mode", mode.name());
    results.note("limsup", bounds.limsup);
    results.note("liminf", bounds.liminf);
    results.note("converges", converges);
    if let Some(want) = config.expect.converges {
        results.expectations.push(ExpectationCheck::equal("converges", want, converges));
    }
    if let Some((lo, hi)) = config.expect.limsup_range {
        let held = lo <= bounds.limsup && bounds.limsup <= hi;
        results.expectations.push(ExpectationCheck::new("limsup_range", [lo, hi], bounds.limsup, held));
    }
    Ok(results)
}

/// Builds the named system on `grid`; the trigonometric one needs the grid on `[a, b]`.
pub fn system_of(spec: SystemSpec, grid: &Arc<Grid>) -> Result<TestSystem, CliError> {
    Ok(match spec {
        SystemSpec::Euclid { phi_map } => build_test_system_euclidean(phi_map, grid.dim(), grid)?,
        SystemSpec::Trig { a, b } => build_test_system_trig(a, b, grid)?,
    })
}

pub fn system_json(system: &TestSystem, report: &PAxiomReport) -> serde_json::Value {
    json!({
        "system": system.name(),
        "functions": system.m() + 1,
        "h_min": system.grid().h_min(),
        "n_bound": system.n_bound(),
        "p1_ok": report.p1_ok,
        "p1_max_residual": report.p1_max_residual,
        "c1_est": report.c1_est,
        "delta_min": report.delta_min,
        "c0_est": report.c0_est,
    })
}

fn check_system(config: &ExperimentConfig, echo: serde_json::Value, tol: Tolerances) -> Result<Results, CliError> {
    let grid = grid_of(config)?;
    let spec = config.params.system.ok_or_else(|| CliError::Config("params.system is required".into()))?;
    let system = system_of(spec, &grid)?;
    let report = verify_p_axioms(&system, config.params.delta_min.unwrap_or(grid.h_min()))?;
    let mut results = Results::new(echo, tol, &["quantity", "value"]);
    let mut rows = vec![
        vec!["p1_max_residual".to_string(), fmt(report.p1_max_residual)],
        vec!["c1_est".to_string(), fmt(report.c1_est)],
        vec!["delta_min".to_string(), fmt(report.delta_min)],
        vec!["n_bound".to_string(), fmt(system.n_bound())],
    ];
    if let Some(c0) = report.c0_est {
        rows.push(vec!["c0_est".to_string(), fmt(c0)]);
    }
    results.evidence().rows = rows;
    if let serde_json::Value::Object(map) = system_json(&system, &report) {
        results.summary.extend(map);
    }
    if let Some(want) = config.expect.p1_ok {
        results.expectations.push(ExpectationCheck::equal("p1_ok", want, report.p1_ok));
    }
    if let Some(min) = config.expect.min_c1 {
        results.expectations.push(ExpectationCheck::new("min_c1", min, report.c1_est, report.c1_est >= min));
    }
    Ok(results)
}

fn rho_star(config: &ExperimentConfig, echo: serde_json::Value, tol: Tolerances) -> Result<Results, CliError> {
    let p = &config.params;
    let grid = grid_of(config)?;
    let family_name = p.family.unwrap_or(FamilyName::Mellin);
    let family = family_of(config, family_name)?;
    let phi = config.phi.unwrap_or(korovkin_lab::modular::PhiFunction::Linear);
    let rho = OrliczModular::convex(phi, &grid)?;
    let mode = mode_of(config, &tol)?;
    let probes = probes_for(&grid, uses_simplex(family_name), config.seed, p.random_probes.unwrap_or(0))?;
    let samples: Vec<FunctionSample> = probes.iter().map(|p| p.f.clone()).collect();
    let tau_list = p.tau_list.clone().unwrap_or_default();
    let report = check_rho_star(family.as_ref(), &rho, &samples, &mode, &tau_list, config.horizon, &tol)?;

    let mut results = Results::new(echo, tol, &["probe", "tau", "limsup"]);
    results.evidence().rows = report
        .entries
        .iter()
        .map(|e| vec![probes[e.probe].label.clone(), fmt(e.tau), fmt(e.limsup)])
        .collect();
    results.limsup_estimates.insert("e_est".into(), report.e_est);
    results.classifications.insert("rho_star".into(), if report.holds { "holds" } else { "fails" }.into());
    results.note("family", family.name());
    results.note("mode", mode.name());
    results.note("e_est", report.e_est);
    results.note("holds", report.holds);
    results.note("probes", probes.iter().map(|p| p.label.clone()).collect::<Vec<_>>());
    if let Some(want) = config.expect.holds {
        results.expectations.push(ExpectationCheck::equal("holds", want, report.holds));
    }
    if let Some((lo, hi)) = config.expect.limsup_range {
        let held = lo <= report.e_est && report.e_est <= hi;
        results.expectations.push(ExpectationCheck::new("limsup_range", [lo, hi], report.e_est, held));
    }
    Ok(results)
}
