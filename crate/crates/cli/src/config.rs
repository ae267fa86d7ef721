//! Experiment configuration: a strict JSON document.

use std::collections::BTreeMap;
use std::path::PathBuf;

use korovkin_lab::convergence::{ConvergenceMode, Net, ShapeFunction, SummabilityMatrix};
use korovkin_lab::engine::PhiMap;
use korovkin_lab::modular::{PhiFunction, Region};
use korovkin_lab::sets::IndexSet;
use korovkin_lab::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MIN_HORIZON: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    MellinRates,
    KantorovichRates,
    Density,
    Limit,
    Limsup,
    CheckSystem,
    RhoStar,
}

/// Named index sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SetName {
    Squares,
    NonSquares,
    Cubes,
    NonCubes,
    Even,
    All,
    Empty,
}

impl SetName {
    pub fn index_set(self) -> IndexSet {
        match self {
            Self::Squares => IndexSet::squares(),
            Self::NonSquares => IndexSet::non_squares(),
            Self::Cubes => IndexSet::cubes(),
            Self::NonCubes => IndexSet::non_cubes(),
            Self::Even => IndexSet::evens(),
            Self::All => IndexSet::all(),
            Self::Empty => IndexSet::empty(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixName {
    Cesaro,
    Degenerate,
    Identity,
}

impl MatrixName {
    pub fn matrix(self) -> SummabilityMatrix {
        match self {
            Self::Cesaro => SummabilityMatrix::cesaro(),
            Self::Degenerate => SummabilityMatrix::degenerate(),
            Self::Identity => SummabilityMatrix::identity(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModeSpec {
    Ordinary,
    Frechet,
    DensityFilter { set: SetName },
    /// Ψ-A-statistical with the triangular shape.
    PsiA { matrix: MatrixName },
    Almost { m_max: usize },
}

impl ModeSpec {
    /// Builds the mode; Ψ-A modes are rejected unless (A1)–(A3) hold at `horizon`.
    pub fn build(&self, horizon: usize, tol: &Tolerances) -> Result<ConvergenceMode, CliError> {
        Ok(match self {
            Self::Ordinary => ConvergenceMode::Ordinary,
            Self::Frechet => ConvergenceMode::Frechet,
            Self::DensityFilter { set } => ConvergenceMode::density_filter(set.index_set()),
            Self::PsiA { matrix } => {
                ConvergenceMode::psi_a_statistical(matrix.matrix(), ShapeFunction::triangular(), horizon, tol)?
            }
            Self::Almost { m_max } => ConvergenceMode::Almost { m_max: *m_max },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub region: Region,
    pub resolution: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum XiSpec {
    /// `ξ_w = w^(-p)`.
    Power { p: f64 },
}

impl XiSpec {
    pub fn net(self, horizon: usize) -> Result<Net, CliError> {
        let Self::Power { p } = self;
        Ok(Net::single(horizon, |w| (w as f64).powf(-p))?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NetSpec {
    Constant { value: f64 },
    /// `1` at even indices, `0` at odd ones.
    Alternating,
    AlternatingSign,
    SquareIndicator,
    /// `w^(-p)`.
    Power { p: f64 },
    /// The listed values repeated cyclically.
    Values { values: Vec<f64> },
    /// Uniform draws from `[low, high)` seeded by the config seed.
    Random { low: f64, high: f64 },
}

impl NetSpec {
    pub fn build(&self, horizon: usize, seed: u64) -> Result<Net, CliError> {
        let net = match self {
            Self::Constant { value } => Net::single(horizon, |_| *value),
            Self::Alternating => Net::single(horizon, |w| if w % 2 == 0 { 1.0 } else { 0.0 }),
            Self::AlternatingSign => Net::single(horizon, |w| if w % 2 == 0 { 1.0 } else { -1.0 }),
            Self::SquareIndicator => {
                Net::single(horizon, |w| if korovkin_lab::sets::is_perfect_square(w) { 1.0 } else { 0.0 })
            }
            Self::Power { p } => Net::single(horizon, |w| (w as f64).powf(-p)),
            Self::Values { values } => {
                if values.is_empty() {
                    return Err(CliError::Config("net values must not be empty".into()));
                }
                Net::single(horizon, |w| values[(w - 1) % values.len()])
            }
            Self::Random { low, high } => {
                if low.partial_cmp(high) != Some(std::cmp::Ordering::Less) {
                    return Err(CliError::Config(format!("random net needs low < high, got [{low}, {high})")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Net::single(horizon, |_| rng.gen_range(*low..*high))
            }
        };
        Ok(net?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    /// `P_s(t) = Σ (φ(s_i) − φ(t_i))²` with the dimension of the grid.
    Euclid { phi_map: PhiMap },
    /// `P_s(t) = 1 − cos(s − t)` on `[a, b]`.
    Trig { a: f64, b: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Mellin,
    Kantorovich,
    GatedKantorovich,
    Identity,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineName {
    Lipschitz,
    Continuity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KindName {
    #[serde(rename = "o")]
    LittleO,
    #[serde(rename = "O")]
    BigO,
    #[serde(rename = "neither")]
    Neither,
}

impl KindName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::LittleO => "o",
            Self::BigO => "O",
            Self::Neither => "neither",
        }
    }
}

/// Experiment-specific parameters; each experiment accepts a fixed subset.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<SetName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net: Option<NetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_schedule: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineName>,
    /// Set on which the Mellin kernel has unit mass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_set: Option<SetName>,
    /// Indices where the gated Kantorovich family vanishes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_set: Option<SetName>,
    /// Quasi-semiconvexity constant of the modular.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Number of seeded random probes added to the fixed ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_probes: Option<usize>,
}

/// Declared expectations; the run passes iff every declared one holds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_big_o: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_little_o: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implication_held: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifications: Option<BTreeMap<String, KindName>>,
    /// Range for limsup estimates: big-O ratio limsups, the limsup of a net,
    /// or the (ρ)-(*) constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limsup_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converges: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axioms_pass: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1_ok: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeSpec>,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<XiSpec>,
    pub seed: u64,
    /// Not echoed into reports, so identical experiments written to
    /// different directories produce identical files.
    #[serde(skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub expect: Expectations,
}

macro_rules! present {
    ($owner:expr; $($field:ident),* $(,)?) => {{
        let mut out: Vec<&'static str> = Vec::new();
        $(if $owner.$field.is_some() { out.push(stringify!($field)); })*
        out
    }};
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut config: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.resolve_defaults();
        config.validate()?;
        Ok(config)
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }

    /// Fills in the per-experiment defaults so reports echo every value used.
    fn resolve_defaults(&mut self) {
        use ExperimentKind::*;
        let kind = self.experiment;
        if matches!(kind, MellinRates | KantorovichRates | RhoStar) {
            self.mode.get_or_insert(ModeSpec::DensityFilter { set: SetName::NonSquares });
            self.phi.get_or_insert(PhiFunction::Linear);
        }
        if matches!(kind, Limit | Limsup) {
            self.mode.get_or_insert(ModeSpec::Frechet);
        }
        if matches!(kind, MellinRates | KantorovichRates) {
            self.gamma.get_or_insert(1.0);
            self.xi.get_or_insert(XiSpec::Power { p: 1.0 });
            self.params.pipeline.get_or_insert(PipelineName::Lipschitz);
            self.params.random_probes.get_or_insert(1);
            self.params.q.get_or_insert(1.0);
        }
        match kind {
            MellinRates => {
                self.params.kernel_set.get_or_insert(SetName::NonSquares);
                self.grid.get_or_insert(GridSpec {
                    region: Region::unit_box(1),
                    resolution: 64,
                });
            }
            KantorovichRates => {
                self.params.gate_set.get_or_insert(SetName::Squares);
                self.grid.get_or_insert(GridSpec {
                    region: Region::Simplex2,
                    resolution: 16,
                });
            }
            Density => {
                self.params.matrix.get_or_insert(MatrixName::Cesaro);
                self.params.set.get_or_insert(SetName::Squares);
            }
            Limit => {
                self.params.eps_schedule.get_or_insert_with(|| vec![0.1, 0.01, 0.001]);
            }
            CheckSystem => {
                let system = *self.params.system.get_or_insert(SystemSpec::Euclid {
                    phi_map: PhiMap::Identity,
                });
                let region = match system {
                    SystemSpec::Euclid { .. } => Region::unit_box(1),
                    SystemSpec::Trig { a, b } => Region::interval(a, b),
                };
                self.grid.get_or_insert(GridSpec { region, resolution: 64 });
            }
            RhoStar => {
                let family = *self.params.family.get_or_insert(FamilyName::Mellin);
                let region = match family {
                    FamilyName::Kantorovich | FamilyName::GatedKantorovich => Region::Simplex2,
                    _ => Region::unit_box(1),
                };
                self.grid.get_or_insert(GridSpec { region, resolution: 16 });
                self.params.tau_list.get_or_insert_with(|| vec![1.0]);
                self.params.random_probes.get_or_insert(1);
                match family {
                    FamilyName::Mellin => {
                        self.params.kernel_set.get_or_insert(SetName::NonSquares);
                    }
                    FamilyName::GatedKantorovich => {
                        self.params.gate_set.get_or_insert(SetName::Squares);
                    }
                    _ => {}
                }
            }
            Limsup => {}
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        use ExperimentKind::*;
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.horizon < MIN_HORIZON {
            return bad(format!("horizon {} is below {MIN_HORIZON}", self.horizon));
        }
        if let Some(grid) = &self.grid {
            if grid.resolution < korovkin_lab::modular::MIN_RESOLUTION {
                return bad(format!("resolution {} is below 4", grid.resolution));
            }
        }
        if let Some(XiSpec::Power { p }) = self.xi {
            if !(p.is_finite() && p > 0.0) {
                return bad(format!("xi power {p} must be positive"));
            }
        }
        if let Some(gamma) = self.gamma {
            if !(gamma.is_finite() && gamma > 0.0) {
                return bad(format!("gamma {gamma} must be positive"));
            }
        }
        if let Some(phi) = self.phi {
            phi.validate()?;
        }
        if self.params.net.is_none() && matches!(self.experiment, Limit | Limsup) {
            return bad("params.net is required".into());
        }
        if self.params.candidate.is_none() && self.experiment == Limit {
            return bad("params.candidate is required".into());
        }

        let kind = self.experiment;
        let allowed_top: &[&str] = match kind {
            MellinRates | KantorovichRates => &["mode", "grid", "phi", "gamma", "xi"],
            RhoStar => &["mode", "grid", "phi"],
            Limit | Limsup => &["mode"],
            CheckSystem => &["grid"],
            Density => &[],
        };
        let top = present!(self; mode, grid, phi, gamma, xi);
        let allowed_params: &[&str] = match kind {
            MellinRates => &["pipeline", "kernel_set", "q", "random_probes", "delta_min"],
            KantorovichRates => &["pipeline", "gate_set", "q", "random_probes", "delta_min"],
            Density => &["matrix", "set"],
            Limit => &["net", "candidate", "eps_schedule"],
            Limsup => &["net"],
            CheckSystem => &["system", "delta_min"],
            RhoStar => &["family", "tau_list", "kernel_set", "gate_set", "random_probes"],
        };
        let p = &self.params;
        let params = present!(p; matrix, set, net, candidate, eps_schedule, system, delta_min, family, tau_list,
            pipeline, kernel_set, gate_set, q, random_probes);
        let allowed_expect: &[&str] = match kind {
            MellinRates | KantorovichRates => &["all_big_o", "all_little_o", "implication_held", "classifications", "limsup_range"],
            Density => &["estimate_range", "axioms_pass"],
            Limit => &["converges"],
            Limsup => &["converges", "limsup_range"],
            CheckSystem => &["p1_ok", "min_c1"],
            RhoStar => &["holds", "limsup_range"],
        };
        let e = &self.expect;
        let expect = present!(e; all_big_o, all_little_o, implication_held, classifications, limsup_range,
            estimate_range, converges, axioms_pass, p1_ok, min_c1, holds);
        let name = serde_json::to_string(&kind).unwrap_or_default();
        for (section, used, allowed) in [("", top, allowed_top), ("params.", params, allowed_params), ("expect.", expect, allowed_expect)] {
            if let Some(field) = used.iter().find(|f| !allowed.contains(f)) {
                return bad(format!("{section}{field} does not apply to experiment {name}"));
            }
        }
        if let Some(q) = p.q {
            if !(q.is_finite() && q >= 1.0) {
                return bad(format!("q = {q} must be at least 1"));
            }
        }
        for (label, range) in [("limsup_range", e.limsup_range), ("estimate_range", e.estimate_range)] {
            if let Some((lo, hi)) = range {
                if !matches!(lo.partial_cmp(&hi), Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)) {
                    return bad(format!("expect.{label} [{lo}, {hi}] is empty"));
                }
            }
        }
        Ok(())
    }
}
