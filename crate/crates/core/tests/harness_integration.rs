//! Cross-module harness behavior that unit tests do not cover.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use jane_core::genmodel::{generate_synthetic, make_splits, SynthConfig};
use jane_core::harness::{cell_seed, run_eig_sensitivity, HarnessError, Method};
use jane_core::trainer::{train, TrainConfig};

fn split_dataset(seed: u64) -> (jane_core::Dataset, jane_core::Graph) {
    let cfg = SynthConfig {
        n: 60,
        alpha: 0.0,
        seed,
        ..SynthConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ds, g) = generate_synthetic(&cfg, &mut rng).unwrap();
    let mut split_rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
    make_splits(&mut ds, 0.2, 0.2, &mut split_rng).unwrap();
    (ds, g)
}

#[test]
fn oversized_k_error_surfaces_from_sensitivity_sweep() {
    let (ds, g) = split_dataset(31);
    let err = run_eig_sensitivity(&ds, &g, &[g.n()], &TrainConfig::default(), 1).unwrap_err();
    match err {
        HarnessError::CellFailed { msg, .. } => {
            assert!(msg.contains("too large"), "unexpected message: {msg}")
        }
        other => panic!("expected CellFailed, got {other}"),
    }
}

#[test]
fn single_k_sensitivity_equals_direct_training_run() {
    let (ds, g) = split_dataset(32);
    let base = TrainConfig {
        epochs: 30,
        ..TrainConfig::default()
    };
    let table = run_eig_sensitivity(&ds, &g, &[2], &base, 1).unwrap();
    assert_eq!(table.rows.len(), 1);

    let seed = cell_seed(base.seed, 2.0, 0.0, Method::Jane, 0);
    let direct = train(&ds, &g, &TrainConfig { k: 2, seed, ..base }).unwrap();
    assert_eq!(table.rows[0].accuracy, direct.test_acc.unwrap());
}
