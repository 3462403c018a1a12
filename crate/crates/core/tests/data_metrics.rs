use std::collections::HashSet;
use std::io::Write;

use dc_split::data::{
    column_stats, load_csv, split_indices, standardize, train_test_split, undersample_majority, Dataset, SplitSpec,
};
use dc_split::linalg::{gaussian_matrix, DenseMatrix, RngSeed};
use dc_split::metrics::{accuracy, mae, mse, precision, precision_with_flag, rmse, ClassificationReport};
use dc_split::Error;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn write_csv(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn toy_csv_maps_labels() {
    let f = write_csv("a,b,class\n1.5,2,1\n-3, 4 ,0\n0,0,1\n");
    let d = load_csv(f.path(), "class", "1").unwrap();
    assert_eq!(d.len(), 3);
    assert_eq!(d.y, vec![1.0, -1.0, 1.0]);
    assert_eq!(d.feature_names, vec!["a", "b"]);
    assert_eq!(d.x.row(1), &[-3.0, 4.0]);
    assert_eq!(d.provenance.len(), 1);

    // label column in the middle, textual and numeric label forms
    let f = write_csv("v,Class,w\n1,\"1\",2\n3,\"0\",4\n5,1.0,6\n");
    let d = load_csv(f.path(), "Class", "1").unwrap();
    assert_eq!(d.y, vec![1.0, -1.0, 1.0]);
    assert_eq!(d.x.row(2), &[5.0, 6.0]);
}

#[test]
fn csv_errors_are_specific() {
    let f = write_csv("a,b,class\n1,2,1\n3,oops,0\n");
    match load_csv(f.path(), "class", "1") {
        Err(Error::Parse { row, column, .. }) => {
            assert_eq!(row, 3);
            assert_eq!(column, "b");
        }
        other => panic!("expected parse error, got {other:?}"),
    }
    let f = write_csv("a,b\n1,2\n");
    assert!(matches!(load_csv(f.path(), "class", "1"), Err(Error::MissingColumn { .. })));
    let f = write_csv("a,class\n");
    assert!(matches!(load_csv(f.path(), "class", "1"), Err(Error::EmptyInput(_))));
    let missing = std::path::Path::new("/nonexistent/data.csv");
    let err = load_csv(missing, "class", "1").unwrap_err();
    assert!(err.is_data_error());
    let f = write_csv("a,class\n1,1\n2\n");
    assert!(load_csv(f.path(), "class", "1").unwrap_err().is_data_error());
    let f = write_csv("a,class\nNaN,1\n");
    assert!(matches!(load_csv(f.path(), "class", "1"), Err(Error::Parse { .. })));
}

fn random_dataset(n: usize, d: usize, seed: u64) -> Dataset {
    let mut x = gaussian_matrix(n, d, RngSeed(seed), false);
    x.scale(4.0);
    let mut rng = RngSeed(seed + 1).rng();
    let y = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    Dataset::new(x, y).unwrap()
}

#[test]
fn standardized_training_columns_are_centered() {
    for seed in 0..10 {
        let train = random_dataset(50, 4, seed);
        let test = random_dataset(20, 4, seed + 100);
        let (t, s) = standardize(&train, &test).unwrap();
        let (mean, std) = column_stats(&t.x);
        for j in 0..4 {
            assert!(mean[j].abs() < 1e-12);
            assert!((std[j] - 1.0).abs() < 1e-12);
        }
        // the test set uses the training statistics
        let (m0, s0) = column_stats(&train.x);
        let expect = (test.x.get(3, 2) - m0[2]) / s0[2];
        assert!((s.x.get(3, 2) - expect).abs() < 1e-12);
        // standardizing again changes nothing
        let (again, _) = standardize(&t, &t).unwrap();
        assert!(again.x.max_abs_diff(&t.x) < 1e-12);
        assert_eq!(t.y, train.y);
    }
}

#[test]
fn standardize_rejects_mismatched_features() {
    let a = random_dataset(10, 3, 1);
    let b = random_dataset(10, 2, 2);
    assert!(standardize(&a, &b).is_err());
}

fn imbalanced(pos: usize, neg: usize, seed: u64) -> Dataset {
    let n = pos + neg;
    let mut y: Vec<f64> = (0..n).map(|i| if i < pos { 1.0 } else { -1.0 }).collect();
    y.shuffle(&mut RngSeed(seed).rng());
    let x = DenseMatrix::from_fn(n, 1, |i, _| i as f64);
    Dataset::new(x, y).unwrap()
}

#[test]
fn undersampling_balances_large_imbalance() {
    let data = imbalanced(492, 284_315, 3);
    let bal = undersample_majority(&data, RngSeed(4)).unwrap();
    assert_eq!(bal.class_counts(), (492, 492));
    // rows keep their original order and come from the source without repeats
    let ids: Vec<f64> = (0..bal.len()).map(|i| bal.x.get(i, 0)).collect();
    assert!(ids.windows(2).all(|w| w[0] < w[1]));
    for (i, id) in ids.iter().enumerate() {
        assert_eq!(data.y[*id as usize], bal.y[i]);
    }
    let again = undersample_majority(&data, RngSeed(4)).unwrap();
    assert_eq!(again.x, bal.x);
    let other = undersample_majority(&data, RngSeed(5)).unwrap();
    assert_ne!(other.x, bal.x);
}

#[test]
fn undersampling_keeps_positive_minority_rows() {
    let data = imbalanced(7, 30, 9);
    let bal = undersample_majority(&data, RngSeed(1)).unwrap();
    let kept: HashSet<usize> = (0..bal.len()).map(|i| bal.x.get(i, 0) as usize).collect();
    for i in 0..data.len() {
        if data.y[i] > 0.0 {
            assert!(kept.contains(&i));
        }
    }
    // balanced input is left with the same rows
    let even = imbalanced(5, 5, 2);
    assert_eq!(undersample_majority(&even, RngSeed(0)).unwrap().x, even.x);
}

#[test]
fn split_sizes_and_partition() {
    for n in 2..=1000 {
        for fraction in [0.3, 0.5] {
            let spec = SplitSpec::new(fraction, RngSeed(n as u64));
            let (train, test) = split_indices(n, &spec).unwrap();
            let k = (n as f64 * fraction + 0.5).floor() as usize;
            // exact halves of the product round up
            let k = if ((n as f64 * fraction) - (n as f64 * fraction).floor() - 0.5).abs() < 1e-9 {
                (n as f64 * fraction).floor() as usize + 1
            } else {
                k
            };
            assert_eq!(test.len(), k.min(n), "n = {n}, fraction = {fraction}");
            assert_eq!(train.len() + test.len(), n);
            let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }
}

#[test]
fn split_is_seeded_and_optional_shuffle() {
    let spec = SplitSpec::new(0.3, RngSeed(42));
    assert_eq!(split_indices(100, &spec).unwrap(), split_indices(100, &spec).unwrap());
    assert_ne!(
        split_indices(100, &spec).unwrap(),
        split_indices(100, &SplitSpec::new(0.3, RngSeed(43))).unwrap()
    );
    let plain = SplitSpec {
        shuffle: false,
        ..spec
    };
    let (train, test) = split_indices(10, &plain).unwrap();
    assert_eq!(train, (0..7).collect::<Vec<_>>());
    assert_eq!(test, vec![7, 8, 9]);
    assert!(split_indices(10, &SplitSpec::new(1.0, RngSeed(0))).is_err());
    assert!(split_indices(1, &spec).is_err());

    let data = random_dataset(40, 2, 3);
    let (tr, te) = train_test_split(&data, &spec).unwrap();
    assert_eq!((tr.len(), te.len()), (28, 12));
    assert_eq!(tr.provenance.len(), 1);
}

#[test]
fn metric_identities_hold_for_signed_labels() {
    let mut rng = RngSeed(8).rng();
    for _ in 0..200 {
        let n = rng.random_range(1..60);
        let t: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let p: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let acc = accuracy(&t, &p).unwrap();
        assert!((mae(&t, &p).unwrap() - 2.0 * (1.0 - acc)).abs() < 1e-12);
        assert!((mse(&t, &p).unwrap() - 2.0 * mae(&t, &p).unwrap()).abs() < 1e-12);
        assert!((rmse(&t, &p).unwrap().powi(2) - mse(&t, &p).unwrap()).abs() < 1e-12);
        let report = ClassificationReport::new(&t, &p, 0.0, 0).unwrap();
        assert!(report.identity_defect() < 1e-12);
        assert!((0.0..=1.0).contains(&report.precision));
    }
}

#[test]
fn metrics_reject_bad_lengths() {
    assert!(matches!(accuracy(&[1.0], &[1.0, -1.0]), Err(Error::DimensionMismatch { .. })));
    assert!(precision(&[], &[]).is_err());
    assert!(ClassificationReport::new(&[], &[], 0.0, 0).is_err());
}

#[test]
fn degenerate_precision_is_flagged() {
    let (p, flag) = precision_with_flag(&[1.0, 1.0, -1.0], &[-1.0; 3]).unwrap();
    assert_eq!((p, flag), (1.0, true));
    let r = ClassificationReport::new(&[1.0, -1.0], &[-1.0, -1.0], 0.5, 3).unwrap();
    assert!(r.precision_degenerate);
    assert_eq!(r.accuracy, 0.5);
    assert_eq!(r.iterations, 3);
}

proptest! {
    #[test]
    fn metrics_ignore_joint_permutation(
        pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..50),
        seed in any::<u64>(),
    ) {
        let sign = |b: bool| if b { 1.0 } else { -1.0 };
        let t: Vec<f64> = pairs.iter().map(|p| sign(p.0)).collect();
        let p: Vec<f64> = pairs.iter().map(|p| sign(p.1)).collect();
        let mut order: Vec<usize> = (0..t.len()).collect();
        order.shuffle(&mut RngSeed(seed).rng());
        let tp: Vec<f64> = order.iter().map(|&i| t[i]).collect();
        let pp: Vec<f64> = order.iter().map(|&i| p[i]).collect();
        prop_assert!((accuracy(&t, &p).unwrap() - accuracy(&tp, &pp).unwrap()).abs() < 1e-12);
        prop_assert!((precision(&t, &p).unwrap() - precision(&tp, &pp).unwrap()).abs() < 1e-12);
        prop_assert!((mse(&t, &p).unwrap() - mse(&tp, &pp).unwrap()).abs() < 1e-12);
    }
}
