//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use korovkin_lab::convergence::{
    almost_deviation, check_summability_axioms, filter_limsup_liminf, mode_limit, triangular_density,
    ConvergenceMode, Net, RateKind, ShapeFunction, SummabilityMatrix,
};
use korovkin_lab::engine::{
    build_test_system_euclidean, decomposition_check, rates_pipeline_continuity, rates_pipeline_lipschitz,
    tau_lipschitz, LipschitzProbe, PhiMap, PipelineSettings, TestSystem,
};
use korovkin_lab::modular::{build_grid, modulus_of_continuity, FunctionSample, Grid, OrliczModular, PhiFunction, Region};
use korovkin_lab::operators::{
    gated_kantorovich, kantorovich_apply, mellin_error_closed_form, Identity, KantorovichParams, Mellin,
    MellinParams, MomentTag, OperatorFamily,
};
use korovkin_lab::sets::{is_perfect_cube, is_perfect_square, IndexSet};
use korovkin_lab::{Error, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn lib<T>(r: korovkin_lab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit_grid(dim: usize, res: usize) -> Result<Arc<Grid>, String> {
    lib(build_grid(Region::unit_box(dim), res))
}

fn reciprocal(horizon: usize) -> Result<Net, String> {
    lib(Net::single(horizon, |w| 1.0 / w as f64))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)`, a deterministic function of `(seed, i, j)`.
fn hash_unit(seed: u64, i: usize, j: usize) -> f64 {
    let h = splitmix(seed ^ splitmix(i as u64 ^ splitmix(j as u64)));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn mellin_constants() -> Outcome {
    let mut checked = 0;
    for (dim, res) in [(1, 64), (2, 16)] {
        let grid = unit_grid(dim, res)?;
        let params = lib(MellinParams::new(dim, 50))?;
        let family = lib(Mellin::new(params.clone()))?;
        let one = lib(FunctionSample::constant(&grid, 1.0))?;
        for w in 1..=50 {
            let image = lib(family.apply(w, &one))?;
            if params.in_f(w) {
                let err = lib(image.sub(&one))?.sup_abs();
                ensure(err <= 1e-10, || format!("N={dim}, w={w}: |M_w e0 - 1| = {err:e}"))?;
            } else {
                let target = (w + 1) as f64;
                let exact = image.values().iter().all(|&v| v == target)
                    && grid.probe_points().all(|p| image.eval(p) == target);
                ensure(exact, || format!("N={dim}, w={w}: image of e0 is not exactly {target}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (N, w) cases"))
}

fn mellin_moments() -> Outcome {
    let mut worst_first = 0.0f64;
    let mut worst_second = f64::NEG_INFINITY;
    for (dim, res) in [(1, 64), (2, 16)] {
        let grid = unit_grid(dim, res)?;
        let params = lib(MellinParams::new(dim, 50))?;
        let family = lib(Mellin::new(params.clone()))?;
        for w in (2..=50).filter(|&w| params.in_f(w)) {
            let wf = w as f64;
            for r in 0..dim {
                let coord = lib(FunctionSample::from_fn(&grid, move |t| t[r]))?;
                let err = lib(lib(family.apply(w, &coord))?.sub(&coord))?.sup_abs();
                let expected = 1.0 / (wf + 2.0);
                let closed = lib(mellin_error_closed_form(MomentTag::Er, w, &params))?;
                ensure(closed == expected, || format!("closed form {closed} for w={w}"))?;
                worst_first = worst_first.max((err - expected).abs());
                ensure((err - expected).abs() <= 1e-8, || format!("N={dim}, w={w}, r={r}: error {err}, expected {expected}"))?;

                let square = lib(FunctionSample::from_fn(&grid, move |t| t[r] * t[r]))?;
                let err2 = lib(lib(family.apply(w, &square))?.sub(&square))?.sup_abs();
                let bound = 2.0 / (wf + 3.0);
                worst_second = worst_second.max(err2 - bound);
                ensure(err2 <= bound + 1e-8, || format!("N={dim}, w={w}, r={r}: squared error {err2} above {bound}"))?;
            }
        }
    }
    Ok(format!("max |err - 1/(w+2)| = {worst_first:.2e}, max (err2 - 2/(w+3)) = {worst_second:.2e}"))
}

fn mellin_rates() -> Outcome {
    let horizon = 400;
    let grid = unit_grid(1, 64)?;
    let system = lib(lib(build_test_system_euclidean(PhiMap::Identity, 1, &grid))?.verified(0.5))?;
    let rho = lib(OrliczModular::convex(PhiFunction::Linear, &grid))?;
    let family = lib(Mellin::new(lib(MellinParams::new(1, horizon))?))?;
    let xi: Vec<Net> = (0..=system.m()).map(|_| reciprocal(horizon)).collect::<Result<_, _>>()?;
    let probes = vec![
        LipschitzProbe {
            label: "t".into(),
            f: lib(FunctionSample::from_fn(&grid, |t| t[0]))?,
            lipschitz: 1.0,
        },
        LipschitzProbe {
            label: "t^2".into(),
            f: lib(FunctionSample::from_fn(&grid, |t| t[0] * t[0]))?,
            lipschitz: 2.0,
        },
        LipschitzProbe {
            label: "sin(pi t)/pi".into(),
            f: lib(FunctionSample::from_fn(&grid, |t| (std::f64::consts::PI * t[0]).sin() / std::f64::consts::PI))?,
            lipschitz: 1.0,
        },
    ];
    let mut settings = PipelineSettings {
        gamma: 10.0,
        horizon,
        mode: ConvergenceMode::density_filter(IndexSet::non_squares()),
        tolerances: Tolerances::default(),
    };
    let report = lib(rates_pipeline_lipschitz(&family, &system, &rho, &xi, &probes, &settings))?;
    let mut estimates = Vec::new();
    for rec in &report.test_functions {
        let class = &rec.classification;
        ensure(class.kind.satisfies_big_o(), || format!("{} classified {}", rec.label, class.kind.as_str()))?;
        if class.kind == RateKind::BigO {
            ensure((0.1..=10.0).contains(&class.limsup_estimate), || {
                format!("{} limsup {} outside [0.1, 10]", rec.label, class.limsup_estimate)
            })?;
        }
        estimates.push(format!("{}={}:{:.3}", rec.label, class.kind.as_str(), class.limsup_estimate));
    }
    for rec in &report.probes {
        let class = &rec.classification;
        ensure(class.kind == RateKind::BigO, || format!("probe {} classified {}", rec.label, class.kind.as_str()))?;
        ensure((0.1..=10.0).contains(&class.limsup_estimate), || {
            format!("probe {} limsup {} outside [0.1, 10]", rec.label, class.limsup_estimate)
        })?;
        estimates.push(format!("{}={}:{:.3}", rec.label, class.kind.as_str(), class.limsup_estimate));
    }
    ensure(report.implication.big_o_held, || "big-O implication failed".into())?;

    settings.mode = ConvergenceMode::Frechet;
    let frechet = lib(rates_pipeline_lipschitz(&family, &system, &rho, &xi, &probes, &settings))?;
    let e0 = &frechet.test_functions[0].classification;
    ensure(e0.kind == RateKind::Neither, || format!("Frechet e0 classified {}", e0.kind.as_str()))?;
    Ok(format!("{}; frechet e0=neither", estimates.join(", ")))
}

fn kantorovich() -> Outcome {
    let grid = lib(build_grid(Region::Simplex2, 16))?;
    let one = lib(FunctionSample::constant(&grid, 1.0))?;
    for n in [1, 9, 49] {
        let image = lib(kantorovich_apply(&one, n))?;
        let err = lib(image.sub(&one))?.sup_abs();
        ensure(err <= 1e-8, || format!("n={n}: |P_n e0 - e0| = {err:e}"))?;
        let expected = 1.0 / (2.0 * (n + 1) as f64);
        for axis in 0..2 {
            let coord = lib(FunctionSample::from_fn(&grid, move |t| t[axis]))?;
            let err = lib(lib(kantorovich_apply(&coord, n))?.sub(&coord))?.sup_abs();
            ensure((err - expected).abs() <= 1e-4, || format!("n={n}, axis {axis}: error {err}, expected {expected}"))?;
        }
    }

    let horizon = 100;
    let system = lib(lib(build_test_system_euclidean(PhiMap::Identity, 2, &grid))?.verified(0.5))?;
    let rho = lib(OrliczModular::convex(PhiFunction::Linear, &grid))?;
    let family = lib(gated_kantorovich(&lib(KantorovichParams::new(horizon))?))?;
    let xi: Vec<Net> = (0..=system.m()).map(|_| reciprocal(horizon)).collect::<Result<_, _>>()?;
    let probes = vec![
        LipschitzProbe {
            label: "uv".into(),
            f: lib(FunctionSample::from_fn(&grid, |t| t[0] * t[1]))?,
            lipschitz: 1.0,
        },
        LipschitzProbe {
            label: "sin(u+v)".into(),
            f: lib(FunctionSample::from_fn(&grid, |t| (t[0] + t[1]).sin()))?,
            lipschitz: std::f64::consts::SQRT_2,
        },
    ];
    let settings = PipelineSettings {
        gamma: 1.0,
        horizon,
        mode: ConvergenceMode::density_filter(IndexSet::non_squares()),
        tolerances: Tolerances::default(),
    };
    let report = lib(rates_pipeline_lipschitz(&family, &system, &rho, &xi, &probes, &settings))?;
    let mut classes = Vec::new();
    for (label, class) in report
        .test_functions
        .iter()
        .map(|r| (&r.label, &r.classification))
        .chain(report.probes.iter().map(|r| (&r.label, &r.classification)))
    {
        ensure(class.kind.satisfies_big_o(), || format!("{label} classified {}", class.kind.as_str()))?;
        classes.push(format!("{label}={}:{:.3}", class.kind.as_str(), class.limsup_estimate));
    }
    Ok(classes.join(", "))
}

type Predicate = Arc<dyn Fn(usize, usize) -> bool + Send + Sync>;

/// A random pair set drawn from one of four families.
fn random_predicate(rng: &mut ChaCha8Rng, family: usize) -> (String, Predicate) {
    match family % 4 {
        0 => {
            let seed: u64 = rng.gen();
            let p: f64 = rng.gen_range(0.0..1.0);
            (format!("random(p={p:.2})"), Arc::new(move |i, j| hash_unit(seed, i, j) < p))
        }
        1 => {
            let c: f64 = rng.gen_range(1.0..2.0);
            let p: f64 = rng.gen_range(3.0..4.0);
            let members: Vec<usize> = (1..)
                .map(|k: usize| (c * (k as f64).powf(p)).floor() as usize)
                .take_while(|&m| m <= 4000)
                .collect();
            (format!("power-columns(c={c:.2}, p={p:.2})"), Arc::new(move |_, j| members.binary_search(&j).is_ok()))
        }
        2 => {
            let rows: usize = rng.gen_range(1..=200);
            (format!("rows<={rows}"), Arc::new(move |i, _| i <= rows))
        }
        _ => {
            let width: usize = rng.gen_range(0..=5);
            (format!("band(|i-j|<={width})"), Arc::new(move |i, j| i.abs_diff(j) <= width))
        }
    }
}

fn density_engine() -> Outcome {
    let tol = Tolerances::default();
    let cesaro = SummabilityMatrix::cesaro();
    let shape = ShapeFunction::triangular();
    let estimate = |k: &Predicate, rows: usize| -> Result<f64, String> {
        Ok(lib(triangular_density(&|i, j| k(i, j), &cesaro, &shape, rows, &tol))?.estimate)
    };

    let whole = lib(triangular_density(&|_, _| true, &cesaro, &shape, 2000, &tol))?;
    for &(i, s) in &whole.partial_sums {
        ensure(s == 1.0, || format!("row {i} of the whole plane sums to {s}"))?;
    }
    ensure(whole.estimate >= tol.a2_tol, || format!("density of the whole plane {}", whole.estimate))?;
    let squares = lib(triangular_density(&|_, j| is_perfect_square(j), &cesaro, &shape, 5000, &tol))?.estimate;
    ensure(squares <= 0.02, || format!("square columns have density {squares}"))?;

    let rows = 2000;
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1d2d3);
    let mut small: Vec<(String, Predicate)> = Vec::new();
    for k in 0..50 {
        let (name, pred) = random_predicate(&mut rng, k);
        let est_k = estimate(&pred, rows)?;
        let seed: u64 = rng.gen();
        let p: f64 = rng.gen_range(0.0..1.0);
        let inner = Arc::clone(&pred);
        let superset: Predicate = Arc::new(move |i, j| inner(i, j) || hash_unit(seed, i, j) < p);
        let est_h = estimate(&superset, rows)?;
        ensure(est_k <= est_h + 2.0 * tol.density_tol, || format!("{name}: subset {est_k} above superset {est_h}"))?;
        if est_k <= tol.density_tol {
            small.push((name, pred));
        }
    }
    ensure(small.len() >= 10, || format!("only {} density-zero predicates drawn", small.len()))?;
    for pair in small.windows(2) {
        let (a, b) = (Arc::clone(&pair[0].1), Arc::clone(&pair[1].1));
        let union: Predicate = Arc::new(move |i, j| a(i, j) || b(i, j));
        let est = estimate(&union, rows)?;
        ensure(est <= 2.0 * tol.density_tol, || format!("{} ∪ {}: {est}", pair[0].0, pair[1].0))?;
    }

    let degenerate = lib(check_summability_axioms(&SummabilityMatrix::degenerate(), &shape, 1000, &tol))?;
    ensure(degenerate.failures() == vec!["A2"], || format!("degenerate matrix failures {:?}", degenerate.failures()))?;
    let rejected = ConvergenceMode::psi_a_statistical(SummabilityMatrix::degenerate(), shape.clone(), 1000, &tol);
    ensure(
        matches!(rejected, Err(Error::AxiomViolation { condition: "A2", .. })),
        || "degenerate matrix accepted as a mode".into(),
    )?;
    Ok(format!(
        "square columns {squares:.4}, {} density-zero predicates, degenerate matrix: (A2) fails",
        small.len()
    ))
}

/// How the random nets of the axiom suite are shaped for one mode.
struct NetShape {
    mode: ConvergenceMode,
    /// Longest arbitrary prefix.
    prefix_max: usize,
    /// Arbitrary values on the cubes.
    cube_spikes: bool,
}

impl NetShape {
    fn disturb(&self, rng: &mut ChaCha8Rng, w: usize, prefix: usize) -> Option<f64> {
        if w <= prefix || (self.cube_spikes && is_perfect_cube(w)) {
            Some(rng.gen_range(-5.0..5.0))
        } else {
            None
        }
    }

    /// A net converging to a random limit, and that limit.
    fn convergent(&self, rng: &mut ChaCha8Rng, horizon: usize) -> Result<(Net, f64), String> {
        let limit: f64 = rng.gen_range(-2.0..2.0);
        self.convergent_to(rng, horizon, limit).map(|n| (n, limit))
    }

    fn convergent_to(&self, rng: &mut ChaCha8Rng, horizon: usize, limit: f64) -> Result<Net, String> {
        let prefix = rng.gen_range(0..=self.prefix_max);
        let decay: f64 = rng.gen_range(-1.0..1.0);
        let values = (1..=horizon)
            .map(|w| self.disturb(rng, w, prefix).unwrap_or(limit + decay * (w as f64).powi(-12)))
            .collect();
        lib(Net::from_values(values))
    }

    /// A net cycling through three random levels, and its lowest and highest level.
    fn oscillating(&self, rng: &mut ChaCha8Rng, horizon: usize) -> Result<(Net, f64, f64), String> {
        let levels: [f64; 3] = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let prefix = rng.gen_range(0..=self.prefix_max);
        let seed: u64 = rng.gen();
        let values = (1..=horizon)
            .map(|w| {
                self.disturb(rng, w, prefix)
                    .unwrap_or(levels[(hash_unit(seed, w, 0) * 3.0) as usize])
            })
            .collect();
        let lo = levels.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((lib(Net::from_values(values))?, lo, hi))
    }
}

fn axiom_suite_for(shape: &NetShape, seed: u64, pairs: usize, horizon: usize) -> Result<(), String> {
    let tol = Tolerances::default();
    let level = tol.level_tol;
    let schedule = [1.0, 0.1, 1e-3, level];
    let mode = &shape.mode;
    let converges = |x: &Net, c: f64| -> Result<bool, String> { Ok(lib(mode_limit(x, mode, c, &schedule, &tol))?.converges) };
    let bounds = |x: &Net| lib(filter_limsup_liminf(x, mode, &tol));
    let zip = |a: &Net, b: &Net, f: fn(f64, f64) -> f64| lib(a.zip_with(b, f));
    // (j): the bounds coincide iff the net converges to their common value.
    let coherent = |x: &Net, tag: &str| -> Result<(), String> {
        let b = bounds(x)?;
        let at_limsup = b.limsup.is_finite() && converges(x, b.limsup)?;
        ensure(b.coincide(level) == at_limsup, || {
            format!("(j) {tag}: bounds {b:?}, converges at limsup: {at_limsup}")
        })
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for pair in 0..pairs {
        let ctx = |axiom: &str, detail: String| format!("pair {pair}, {axiom}: {detail}");
        let (x, lx) = shape.convergent(&mut rng, horizon)?;
        let (y, ly) = shape.convergent(&mut rng, horizon)?;
        ensure(converges(&x, lx)? && converges(&y, ly)?, || ctx("generator", "nets do not converge".into()))?;

        // (c) constants.
        let c: f64 = rng.gen_range(-5.0..5.0);
        let constant = lib(Net::single(horizon, |_| c))?;
        ensure(converges(&constant, c)?, || ctx("(c)", format!("constant {c}")))?;
        let bc = bounds(&constant)?;
        ensure(bc.limsup == c && bc.liminf == c || bc.coincide(level) && (bc.limsup - c).abs() <= level, || {
            ctx("(c)", format!("bounds {bc:?} of constant {c}"))
        })?;

        // (a) linearity.
        let (a1, a2): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let combo = lib(x.zip_with(&y, |u, v| a1 * u + a2 * v))?;
        ensure(converges(&combo, a1 * lx + a2 * ly)?, || ctx("(a)", format!("{a1} x + {a2} y")))?;

        // (b) monotonicity of accepted limits; limits come from the bounds.
        let (d, _) = shape.convergent(&mut rng, horizon)?;
        let above = zip(&x, &d, |u, v| u + v.abs())?;
        let (bx, babove) = (bounds(&x)?, bounds(&above)?);
        ensure(converges(&x, bx.limsup)? && converges(&above, babove.limsup)?, || {
            ctx("(b)", "limsup is not an accepted limit".into())
        })?;
        ensure(bx.limsup <= babove.limsup + level, || ctx("(b)", format!("{} > {}", bx.limsup, babove.limsup)))?;
        ensure((bx.limsup - lx).abs() <= level, || ctx("(b)", format!("limit {} expected {lx}", bx.limsup)))?;

        // (d) absolute values.
        ensure(converges(&lib(x.map(f64::abs))?, lx.abs())?, || ctx("(d)", format!("|x| to {}", lx.abs())))?;

        // (e) squeeze between two nets with the same limit.
        let x2 = shape.convergent_to(&mut rng, horizon, lx)?;
        let theta_seed: u64 = rng.gen();
        let squeezed = lib(Net::from_values(
            x.values()
                .iter()
                .zip(x2.values())
                .enumerate()
                .map(|(k, (&p, &q))| p + hash_unit(theta_seed, k, 1) * (q - p))
                .collect(),
        ))?;
        ensure(converges(&squeezed, lx)?, || ctx("(e)", format!("squeezed net to {lx}")))?;

        let (u, ulo, uhi) = shape.oscillating(&mut rng, horizon)?;
        let (v, _, _) = shape.oscillating(&mut rng, horizon)?;
        let (bu, bv) = (bounds(&u)?, bounds(&v)?);
        ensure((bu.limsup - uhi).abs() <= level && (bu.liminf - ulo).abs() <= level, || {
            ctx("bounds", format!("{bu:?}, levels [{ulo}, {uhi}]"))
        })?;

        // (f) ordering and duality.
        let neg = lib(u.map(|t| -t))?;
        let bneg = bounds(&neg)?;
        ensure(bu.liminf <= bu.limsup, || ctx("(f)", format!("{bu:?}")))?;
        ensure((bu.limsup + bneg.liminf).abs() <= level && (bu.liminf + bneg.limsup).abs() <= level, || {
            ctx("(f)", format!("{bu:?} vs negated {bneg:?}"))
        })?;

        // (g) sub- and superadditivity.
        let sum = zip(&u, &v, |p, q| p + q)?;
        let bsum = bounds(&sum)?;
        ensure(bsum.limsup <= bu.limsup + bv.limsup + level, || ctx("(g)(i)", format!("{bsum:?} vs {bu:?} + {bv:?}")))?;
        ensure(bsum.liminf >= bu.liminf + bv.liminf - level, || ctx("(g)(ii)", format!("{bsum:?} vs {bu:?} + {bv:?}")))?;

        // (h) monotonicity of the bounds.
        let raised = zip(&u, &v, |p, q| p + q.abs())?;
        let braised = bounds(&raised)?;
        ensure(bu.limsup <= braised.limsup + level && bu.liminf <= braised.liminf + level, || {
            ctx("(h)", format!("{bu:?} vs {braised:?}"))
        })?;

        // (j) on convergent and oscillating nets alike.
        for (net, tag) in [(&x, "x"), (&combo, "combo"), (&squeezed, "squeezed"), (&u, "u"), (&sum, "u+v"), (&raised, "u+|v|")] {
            coherent(net, tag).map_err(|e| ctx("(j)", e))?;
        }
        if !bu.coincide(level) {
            ensure(!converges(&u, 0.5 * (bu.limsup + bu.liminf))?, || ctx("(j)", "oscillating net converges".into()))?;
        }
    }
    Ok(())
}

fn axiom_suite() -> Outcome {
    let horizon = 2000;
    let tol = Tolerances::default();
    let shapes = [
        NetShape {
            mode: ConvergenceMode::Ordinary,
            prefix_max: 1000,
            cube_spikes: false,
        },
        NetShape {
            mode: ConvergenceMode::Frechet,
            prefix_max: 1000,
            cube_spikes: false,
        },
        NetShape {
            mode: ConvergenceMode::density_filter(IndexSet::non_cubes()),
            prefix_max: 1000,
            cube_spikes: true,
        },
        NetShape {
            mode: lib(ConvergenceMode::cesaro_statistical(horizon, &tol))?,
            prefix_max: 3,
            cube_spikes: true,
        },
    ];
    for (k, shape) in shapes.iter().enumerate() {
        axiom_suite_for(shape, 0xa5a5 + k as u64, 100, horizon).map_err(|e| format!("{}: {e}", shape.mode.name()))?;
    }
    Ok(format!(
        "100 pairs each under {}",
        shapes.iter().map(|s| s.mode.name()).collect::<Vec<_>>().join(", ")
    ))
}

fn almost_convergence() -> Outcome {
    let (n, m_max) = (1000, 100);
    let horizon = n + m_max;
    let alternating = lib(Net::single(horizon, |w| if w % 2 == 0 { 1.0 } else { 0.0 }))?;
    let deviation = lib(almost_deviation(&alternating, m_max, 0.5))?;
    let seq = alternating.sequence();
    let brute = (0..=m_max)
        .map(|m| ((m + 1..=m + n).map(|w| seq[w - 1]).sum::<f64>() / n as f64 - 0.5).abs())
        .fold(0.0, f64::max);
    ensure((deviation - brute).abs() <= 1e-12, || format!("deviation {deviation} vs brute force {brute}"))?;
    ensure(deviation <= 1.0 / (2.0 * n as f64), || format!("deviation {deviation} above 1/(2n)"))?;
    let tol = Tolerances::default();
    let almost = ConvergenceMode::Almost { m_max };
    ensure(lib(mode_limit(&alternating, &almost, 0.5, &[0.1, 1e-3], &tol))?.converges, || {
        "alternating net rejected under almost convergence".into()
    })?;

    let squares = lib(Net::single(horizon, |w| if is_perfect_square(w) { 1.0 } else { 0.0 }))?;
    let under_almost = lib(mode_limit(&squares, &almost, 0.0, &[0.1, 0.05], &tol))?;
    ensure(under_almost.converges, || format!("square indicator under almost: {:?}", under_almost.worst))?;
    let frechet_bounds = lib(filter_limsup_liminf(&squares, &ConvergenceMode::Frechet, &tol))?;
    ensure(!frechet_bounds.coincide(tol.level_tol), || format!("Frechet bounds {frechet_bounds:?}"))?;
    for candidate in [0.0, 1.0, frechet_bounds.limsup, frechet_bounds.liminf] {
        let report = lib(mode_limit(&squares, &ConvergenceMode::Frechet, candidate, &[0.1, 0.05], &tol))?;
        ensure(!report.converges, || format!("square indicator converges to {candidate} under Frechet"))?;
    }
    Ok(format!(
        "alternating deviation {deviation:.2e}, square indicator almost deviation {:.4}, Frechet bounds ({}, {})",
        under_almost.worst.statistic, frechet_bounds.liminf, frechet_bounds.limsup
    ))
}

/// Random piecewise-linear function on `[0, 1]` and its Lipschitz constant.
fn piecewise_linear(rng: &mut ChaCha8Rng) -> (Arc<dyn Fn(f64) -> f64 + Send + Sync>, f64) {
    let pieces = rng.gen_range(2..=10);
    let mut knots: Vec<f64> = (0..pieces - 1).map(|_| rng.gen_range(0.02..0.98)).collect();
    knots.push(0.0);
    knots.push(1.0);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let values: Vec<f64> = knots.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let lip = knots
        .windows(2)
        .zip(values.windows(2))
        .map(|(k, v)| ((v[1] - v[0]) / (k[1] - k[0])).abs())
        .fold(0.0, f64::max);
    let f = move |t: f64| {
        let seg = knots.partition_point(|&k| k <= t).clamp(1, knots.len() - 1);
        let (k0, k1) = (knots[seg - 1], knots[seg]);
        let (v0, v1) = (values[seg - 1], values[seg]);
        v0 + (v1 - v0) * (t - k0) / (k1 - k0)
    };
    (Arc::new(f), lip)
}

fn modulus_inequality() -> Outcome {
    let grid = unit_grid(1, 512)?;
    let h = grid.h_min();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0e6a);
    let mut checks = 0;
    let mut tightest = f64::INFINITY;
    for probe in 0..50 {
        let (f, lip) = piecewise_linear(&mut rng);
        let sample = lib(FunctionSample::from_fn(&grid, move |t| f(t[0])))?;
        let delta = rng.gen_range(2.0 * h..0.25);
        let base = lib(modulus_of_continuity(&sample, delta))?;
        for gamma in [0.5, 1.0, 2.0, 5.0] {
            let stretched = lib(modulus_of_continuity(&sample, gamma * delta))?;
            let bound = (1.0 + gamma) * base + 4.0 * lip * h;
            tightest = tightest.min(bound - stretched);
            ensure(stretched <= bound, || {
                format!("probe {probe}, gamma {gamma}, delta {delta}: {stretched} > {bound}")
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} checks, smallest margin {tightest:.3e}"))
}

fn lipschitz_probes(grid: &Arc<Grid>) -> Result<Vec<LipschitzProbe>, String> {
    Ok(vec![
        LipschitzProbe {
            label: "t".into(),
            f: lib(FunctionSample::from_fn(grid, |t| t[0]))?,
            lipschitz: 1.0,
        },
        LipschitzProbe {
            label: "|t-1/2|".into(),
            f: lib(FunctionSample::from_fn(grid, |t| (t[0] - 0.5).abs()))?,
            lipschitz: 1.0,
        },
        LipschitzProbe {
            label: "sin(3t)".into(),
            f: lib(FunctionSample::from_fn(grid, |t| (3.0 * t[0]).sin()))?,
            lipschitz: 3.0,
        },
    ])
}

fn decomposition() -> Outcome {
    let grid = unit_grid(1, 64)?;
    let system = lib(lib(build_test_system_euclidean(PhiMap::Identity, 1, &grid))?.verified(grid.h_min()))?;
    let c1 = system.c1().ok_or("system not verified")?;
    let rho = lib(OrliczModular::convex(PhiFunction::Linear, &grid))?;
    let family = lib(Mellin::new(lib(MellinParams::new(1, 10))?))?;
    let mut margin = f64::INFINITY;
    for probe in lipschitz_probes(&grid)? {
        let m_sup = 1.0 + probe.f.sup_abs();
        let tau = lib(tau_lipschitz(1.0, c1, probe.lipschitz, system.m() + 1, system.n_bound(), rho.q(), m_sup))?;
        for w in [2, 5, 10] {
            let check = lib(decomposition_check(&family, &system, &rho, &probe, tau, w))?;
            margin = margin.min(check.right - check.left);
            ensure(check.left <= check.right + 1e-8, || format!("{}, w={w}: {check:?}", probe.label))?;
        }
    }
    Ok(format!("9 checks, smallest right - left = {margin:.3e}"))
}

fn tau_formulas() -> Outcome {
    let horizon = 8;
    let grid = unit_grid(1, 16)?;
    let system: TestSystem = lib(lib(build_test_system_euclidean(PhiMap::Identity, 1, &grid))?.verified(0.5))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a0);
    for tuple in 0..5 {
        let gamma: f64 = rng.gen_range(0.1..20.0);
        let q: f64 = rng.gen_range(1.0..3.0);
        let amplitude: f64 = rng.gen_range(0.1..10.0);
        let rho = lib(OrliczModular::new(PhiFunction::Linear, &grid, q))?;
        let settings = PipelineSettings {
            gamma,
            horizon,
            mode: ConvergenceMode::Frechet,
            tolerances: Tolerances::default(),
        };
        let probe = LipschitzProbe {
            label: "a t".into(),
            f: lib(FunctionSample::from_fn(&grid, move |t| amplitude * t[0]))?,
            lipschitz: amplitude,
        };
        let xi: Vec<Net> = (0..=system.m()).map(|_| reciprocal(horizon)).collect::<Result<_, _>>()?;
        let report = lib(rates_pipeline_lipschitz(&Identity, &system, &rho, &xi, &[probe], &settings))?;
        let c1 = report.c1.ok_or("no C1 in report")?;
        let n = report.n_bound.ok_or("no N in report")?;
        ensure(n == 2.0, || format!("N = {n} for the quadratic system on [0, 1]"))?;
        let m = 1.0 + amplitude;
        let hand = (gamma * c1 / (2.0 * amplitude * 3.0 * n * (q * q))).min(gamma / (2.0 * m * (q * q)));
        let got = report.probes[0].tau;
        ensure(got == hand, || format!("tuple {tuple}: Lipschitz tau {got} vs {hand}"))?;

        let f = lib(FunctionSample::from_fn(&grid, move |t| -amplitude * t[0]))?;
        let cont = lib(rates_pipeline_continuity(&Identity, &f, &rho, &xi[0], &xi[0], &settings))?;
        let hand = gamma / (8.0 * amplitude * (q * q));
        ensure(cont.tau == hand, || format!("tuple {tuple}: continuity tau {} vs {hand}", cont.tau))?;
    }
    Ok("5 tuples, both pipelines exact".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("mellin e0 identity", mellin_constants),
        ("mellin moment errors", mellin_moments),
        ("mellin rate classification", mellin_rates),
        ("kantorovich moments and rates", kantorovich),
        ("density engine", density_engine),
        ("convergence-mode axioms", axiom_suite),
        ("almost convergence", almost_convergence),
        ("modulus inequality", modulus_inequality),
        ("error decomposition", decomposition),
        ("tau formulas", tau_formulas),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} ({name}, {secs:.1}s): {detail}", k + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {:>2} ({name}, {secs:.1}s): {reason}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
