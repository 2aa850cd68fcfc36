// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! Checks against the real dataset files under `$ANNEALNET_DATA`
//! (default `/root/data`). Each test reports and returns early when its
//! files are absent.

use std::path::PathBuf;

use annealnet::data;

fn root() -> PathBuf {
    std::env::var_os("ANNEALNET_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("/root/data"))
}

fn present(p: &std::path::Path) -> bool {
    if p.exists() {
        true
    } else {
        eprintln!("{} not found, skipping", p.display());
        false
    }
}

#[test]
fn mnist_sizes_and_normalization() {
    let dir = root().join("mnist");
    if !present(&dir) {
        return;
    }
    let (train, test) = data::load_mnist(&dir).unwrap();
    assert_eq!((train.len(), test.len()), (60_000, 10_000));
    assert_eq!(train.num_features(), 784);
    assert_eq!(train.num_classes(), 10);
    assert_eq!(train.content_hash(), data::load_mnist(&dir).unwrap().0.content_hash());

    // Most pixels are 0, so no monotone map with min -1 and max 1 has mean 0.
    // The range stays exact and the lower piece collapses onto the minimum:
    // 0 -> -1 and x -> x/255 otherwise.
    let raw_max = train.features().iter().cloned().fold(0f32, f32::max);
    assert_eq!(raw_max, 255.0);
    let expected: f64 = train
        .features()
        .iter()
        .map(|&x| if x == 0.0 { -1.0 } else { f64::from(x) / 255.0 })
        .sum::<f64>()
        / train.features().len() as f64;
    let (ntr, nte, norm) = data::normalize(&train, &test).unwrap();
    let (lo, hi, mean) = ntr.stats();
    assert_eq!((lo, hi), (-1.0, 1.0));
    assert!((norm.pivot + 1.0).abs() < 1e-9, "pivot {}", norm.pivot);
    assert!((mean - expected).abs() < 1e-6, "mean {mean} vs {expected}");
    assert!(nte.stats().1 <= 1.0);

    let sub = data::subset(&train, &[0, 1], Some(1000), 3).unwrap();
    assert_eq!(sub.len(), 2000);
    assert_eq!(sub.class_counts(), vec![1000, 1000]);
    assert_eq!(sub, data::subset(&train, &[0, 1], Some(1000), 3).unwrap());
}

#[test]
fn cifar_sizes() {
    let dir = root().join("cifar-10-batches-bin");
    if !present(&dir) {
        return;
    }
    let (train, test) = data::load_cifar10(&dir).unwrap();
    assert_eq!((train.len(), test.len()), (50_000, 10_000));
    assert_eq!(train.num_features(), 3072);
    assert_eq!(train.image_shape(), Some((3, 32, 32)));
    assert!(train.labels().iter().all(|&y| y < 10));
    assert_eq!(train.class_counts(), vec![5000; 10]);
}

#[test]
fn table_sets_match_published_sizes() {
    for (name, n_train, n_test, features, k) in [("isolet", 6238, 1559, 617, 26), ("ucihar", 6213, 1554, 561, 12)] {
        let schema = root().join(name).join("schema.toml");
        if !present(&schema) {
            continue;
        }
        let (train, test) = data::load_csv_dataset(&schema).unwrap();
        assert_eq!((train.len(), test.len()), (n_train, n_test), "{name}");
        assert_eq!(train.num_features(), features, "{name}");
        assert_eq!(train.num_classes(), k, "{name}");
    }
}
