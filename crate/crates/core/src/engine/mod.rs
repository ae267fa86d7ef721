//! Test-function systems, property (ρ)-(*) and the rate pipelines.

mod rates;
mod report;
mod rho_star;
mod system;

pub use rates::{
    decomposition_check, distance_moment, rates_pipeline_continuity, rates_pipeline_lipschitz, tau_continuity,
    tau_lipschitz, DecompositionCheck, Implication, LipschitzProbe, NetRecord, PipelineKind, PipelineSettings,
    ProbeRecord, RateReport, DECOMPOSITION_SLACK, SUPPORT_CUTOFF,
};
pub use report::{csv_header, write_csv_table, write_evidence_csv, RateRow};
pub use rho_star::{check_rho_star, RhoStarEntry, RhoStarReport};
pub use system::{
    build_test_system_euclidean, build_test_system_trig, verify_p_axioms, PAxiomReport, PhiMap, TestSystem, P1_TOL,
};
