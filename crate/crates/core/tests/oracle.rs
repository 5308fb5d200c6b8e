mod support;

use normat_core::normmat::synth::{random_normalized, RandomShape};
use normat_core::JoinKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::oracle::{check_dmm, check_operators, OracleReport};

const KINDS: [JoinKind; 4] = [JoinKind::PkFk, JoinKind::Star, JoinKind::ManyToMany, JoinKind::MultiManyToMany];

fn sweep(kind: JoinKind, seed: u64, cases: usize) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport::default();
    for case in 0..cases {
        let nm = random_normalized(&mut rng, kind, RandomShape::default());
        let nm = if case % 2 == 1 { nm.transpose() } else { nm };
        report.merge(check_operators(&nm, &mut rng));
    }
    report
}

#[test]
fn every_operator_matches_the_dense_oracle() {
    for (i, kind) in KINDS.into_iter().enumerate() {
        let report = sweep(kind, 100 + i as u64, 60);
        assert!(report.mismatches.is_empty(), "{kind:?}: {:?}", &report.mismatches[..report.mismatches.len().min(5)]);
        assert!(report.checks >= 60 * 20);
        eprintln!(
            "{kind:?}: {} checks, worst relative error {:.2e} (ginv {:.2e})",
            report.checks, report.worst, report.worst_ginv
        );
    }
}

#[test]
fn dmm_matches_the_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut report = OracleReport::default();
    for _ in 0..100 {
        report.merge(check_dmm(&mut rng, 40, 5));
    }
    assert!(report.mismatches.is_empty(), "{:?}", report.mismatches);
}
