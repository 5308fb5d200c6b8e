mod support;

use normat_core::costmodel::{AutoMatrix, Decision, DecisionThresholds};
use normat_core::ml::{self, Model, TrainConfig};
use normat_core::normmat::synth::{random_normalized, RandomShape};
use normat_core::rewrite;
use normat_core::{JoinKind, OpCounter};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::traces::{run_both, trace_divergence, ALGORITHMS, TRACE_TOLERANCE};

const KINDS: [JoinKind; 4] = [JoinKind::PkFk, JoinKind::Star, JoinKind::ManyToMany, JoinKind::MultiManyToMany];

#[test]
fn factorized_and_materialized_traces_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let shape = RandomShape { sparse_probability: 0.0, ..RandomShape::default() };
    for algorithm in ALGORITHMS {
        for kind in KINDS {
            for case in 0..3 {
                let nm = random_normalized(&mut rng, kind, shape);
                let (a, b) = run_both(algorithm, &nm, 20, &mut rng);
                let drift = trace_divergence(&a, &b);
                assert!(drift <= TRACE_TOLERANCE, "{algorithm} {kind:?} case {case}: drift {drift:e}");
                assert_eq!(a.objective.len(), 20);
            }
        }
    }
}

#[test]
fn kmeans_assignments_are_one_hot_and_gnmf_descends() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for kind in KINDS {
        let nm = random_normalized(&mut rng, kind, RandomShape::default());
        let cfg = TrainConfig { iterations: 10, k: 3.min(nm.nrows()), record_states: true, ..Default::default() };
        let out = ml::kmeans(&nm, &cfg).unwrap();
        for state in &out.states {
            let Model::Clusters { assignment, .. } = state else { panic!() };
            assert_eq!(assignment.len(), nm.nrows());
            assert!(assignment.iter().all(|&j| j < cfg.k));
        }

        let nonneg = rewrite::scalar_fn(&nm, f64::abs, &mut OpCounter::new()).unwrap();
        let cfg = TrainConfig { iterations: 50, rank: 2, ..Default::default() };
        let out = ml::gnmf(&nonneg, &cfg).unwrap();
        for pair in out.objective.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9 * pair[0].abs().max(1.0), "{kind:?}: {pair:?}");
        }
        let Model::Factors { w, h } = &out.model else { panic!() };
        assert!(w.data().iter().chain(h.data()).all(|&v| v >= 0.0));
    }
}

#[test]
fn auto_matrix_runs_the_same_algorithm_body() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let nm = random_normalized(&mut rng, JoinKind::PkFk, RandomShape::default());
    let cfg = TrainConfig { iterations: 5, k: 2, record_states: true, ..Default::default() };
    let factorized = AutoMatrix::with_decision(nm.clone(), Decision::Factorized);
    let materialized = AutoMatrix::with_decision(nm.clone(), Decision::Materialized);
    let a = ml::kmeans(&factorized, &cfg).unwrap();
    let b = ml::kmeans(&materialized, &cfg).unwrap();
    assert!(trace_divergence(&a, &b) <= TRACE_TOLERANCE);
    let auto = AutoMatrix::new(nm, DecisionThresholds::default());
    assert!(ml::kmeans(&auto, &cfg).is_ok());
}
