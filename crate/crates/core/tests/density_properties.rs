use std::sync::Arc;

use korovkin_lab::convergence::{
    check_summability_axioms, mode_limit, triangular_density, ConvergenceMode, Net, ShapeFunction,
    SummabilityMatrix,
};
use korovkin_lab::{Error, Tolerances};
use proptest::prelude::*;

type Predicate = Arc<dyn Fn(usize, usize) -> bool + Send + Sync>;

fn hash_unit(seed: u64, i: usize, j: usize) -> f64 {
    let mut z = seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (j as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
}

fn estimate(k: &Predicate, matrix: &SummabilityMatrix, rows: usize) -> f64 {
    triangular_density(&|i, j| k(i, j), matrix, &ShapeFunction::triangular(), rows, &Tolerances::default())
        .unwrap()
        .estimate
}

fn random_set(seed: u64, p: f64) -> Predicate {
    Arc::new(move |i, j| hash_unit(seed, i, j) < p)
}

/// Sets of density zero.
#[derive(Clone, Debug)]
enum NullSet {
    Band(usize),
    Rows(usize),
    PowerColumns(f64, f64),
}

impl NullSet {
    fn predicate(&self) -> Predicate {
        match *self {
            Self::Band(w) => Arc::new(move |i, j| i.abs_diff(j) <= w),
            Self::Rows(r) => Arc::new(move |i, _| i <= r),
            Self::PowerColumns(c, p) => {
                let members: Vec<usize> = (1..)
                    .map(|k: usize| (c * (k as f64).powf(p)).floor() as usize)
                    .take_while(|&m| m <= 10_000)
                    .collect();
                Arc::new(move |_, j| members.binary_search(&j).is_ok())
            }
        }
    }
}

fn null_set() -> impl Strategy<Value = NullSet> {
    prop_oneof![
        (0usize..=5).prop_map(NullSet::Band),
        (1usize..=300).prop_map(NullSet::Rows),
        (1.0f64..2.0, 3.0f64..4.0).prop_map(|(c, p)| NullSet::PowerColumns(c, p)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn whole_plane_is_large(rows in 32usize..1500) {
        let all: Predicate = Arc::new(|_, _| true);
        let tol = Tolerances::default();
        prop_assert!(estimate(&all, &SummabilityMatrix::cesaro(), rows) >= tol.a2_tol);
    }

    #[test]
    fn density_is_monotone(seed in any::<u64>(), p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let tol = Tolerances::default();
        let h = random_set(seed, p.max(q));
        let inner = Arc::clone(&h);
        let k: Predicate = Arc::new(move |i, j| inner(i, j) && hash_unit(seed ^ 1, i, j) < 0.5);
        let cesaro = SummabilityMatrix::cesaro();
        prop_assert!(estimate(&k, &cesaro, 800) <= estimate(&h, &cesaro, 800) + 2.0 * tol.density_tol);
    }

    #[test]
    fn null_sets_are_closed_under_union(k in null_set(), h in null_set()) {
        let tol = Tolerances::default();
        let cesaro = SummabilityMatrix::cesaro();
        let (k, h) = (k.predicate(), h.predicate());
        let (ek, eh) = (estimate(&k, &cesaro, 2000), estimate(&h, &cesaro, 2000));
        prop_assume!(ek <= tol.density_tol && eh <= tol.density_tol);
        let union: Predicate = Arc::new(move |i, j| k(i, j) || h(i, j));
        prop_assert!(estimate(&union, &cesaro, 2000) <= 2.0 * tol.density_tol);
    }

    #[test]
    fn degenerate_matrix_accepts_every_candidate(values in prop::collection::vec(-1.0f64..1.0, 64), candidate in -10.0f64..10.0) {
        let tol = Tolerances::default();
        let horizon = 640;
        let x = Net::single(horizon, |w| values[w % values.len()]).unwrap();
        let unchecked = ConvergenceMode::PsiAStatistical {
            matrix: SummabilityMatrix::degenerate(),
            shape: ShapeFunction::triangular(),
        };
        prop_assert!(mode_limit(&x, &unchecked, candidate, &[1.0, 1e-3], &tol).unwrap().converges);
        let checked = ConvergenceMode::psi_a_statistical(
            SummabilityMatrix::degenerate(),
            ShapeFunction::triangular(),
            horizon,
            &tol,
        );
        let rejected = matches!(checked, Err(Error::AxiomViolation { condition: "A2", .. }));
        prop_assert!(rejected);
    }
}

#[test]
fn filter_is_free() {
    let tol = Tolerances::default();
    let rows = 6000;
    let matrices = [
        SummabilityMatrix::cesaro(),
        SummabilityMatrix::identity(),
        SummabilityMatrix::counting("half-cesaro", |i| 2 * i),
    ];
    for matrix in &matrices {
        let report = check_summability_axioms(matrix, &ShapeFunction::triangular(), rows, &tol).unwrap();
        assert!(report.passes(), "{}: {report:?}", matrix.name());
        for (p, q) in [(1, 1), (1, 50), (50, 1), (17, 33), (50, 50)] {
            let complement: Predicate = Arc::new(move |i, j| i < p || j < q);
            let d = estimate(&complement, matrix, rows);
            assert!(d <= tol.density_tol, "{} at ({p}, {q}): {d}", matrix.name());
        }
    }
}

