//! Guards for the bundled calibration dataset `data/synthetic_factorial.csv`.
//!
//! The file is a frozen output of [`synthetic_factorial`] with the
//! constants below. The guard test regenerates it in memory and compares
//! bytes, so any drift in the generator (or an accidental edit of the
//! file) fails loudly. To rebuild the file after an intentional generator
//! change, run the ignored `regenerate_bundled_dataset` test and commit
//! the result.

use std::path::PathBuf;

use ssci_core::regress::ingest_csv;
use ssci_core::studies::{synthetic_factorial, SyntheticEffects};

/// Rows in the bundled dataset.
const BUNDLED_ROWS: usize = 950;
/// Generator seed behind the bundled dataset, chosen so that every
/// sign-restricted coefficient estimate of the full sample is positive
/// (the bootstrap study then needs no re-centering).
const BUNDLED_SEED: u64 = 19;

fn bundled_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic_factorial.csv")
}

fn regenerate() -> ssci_core::regress::Dataset {
    synthetic_factorial(BUNDLED_ROWS, BUNDLED_SEED, &SyntheticEffects::default()).unwrap()
}

#[test]
fn bundled_dataset_matches_its_generator() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = dir.path().join("fresh.csv");
    regenerate().write_csv(&fresh).unwrap();

    let committed = std::fs::read(bundled_path()).expect("bundled dataset file is missing");
    let generated = std::fs::read(&fresh).unwrap();
    assert_eq!(
        committed, generated,
        "data/synthetic_factorial.csv no longer matches its generator"
    );
}

#[test]
fn bundled_dataset_ingests_cleanly() {
    let data = ingest_csv(&bundled_path(), &["y", "t1", "t2"]).unwrap();
    assert_eq!(data.n_rows(), BUNDLED_ROWS);
    assert_eq!(data.n_dropped(), 0);
    for col in ["t1", "t2"] {
        assert!(data
            .column(col)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0 || v == 1.0));
    }
}

/// Rewrites the bundled file from the generator. Kept ignored: it exists
/// to refresh the artifact deliberately, not to run in CI.
#[test]
#[ignore = "rewrites data/synthetic_factorial.csv"]
fn regenerate_bundled_dataset() {
    regenerate().write_csv(&bundled_path()).unwrap();
}
