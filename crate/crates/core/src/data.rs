// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! Dataset readers (MNIST IDX, CIFAR-10 binary, numeric text tables),
//! normalization, subsetting, and a cached canonical binary format.
//!
//! Features are held as `f32` rows; networks convert to their own scalar.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

/// Labeled feature matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    name: String,
    split: Split,
    num_features: usize,
    num_classes: usize,
    /// `(channels, height, width)` when rows are images in channel-major order.
    image_shape: Option<(usize, usize, usize)>,
    features: Vec<f32>,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        split: Split,
        num_features: usize,
        num_classes: usize,
        features: Vec<f32>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        if num_features == 0 || features.len() != labels.len() * num_features {
            return Err(Error::LengthMismatch {
                what: "dataset features",
                expected: labels.len() * num_features,
                got: features.len(),
            });
        }
        if let Some(&label) = labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::UnknownLabel {
                label,
                k: num_classes,
            });
        }
        Ok(Self {
            name: name.into(),
            split,
            num_features,
            num_classes,
            image_shape: None,
            features,
            labels,
        })
    }

    pub fn with_image_shape(mut self, c: usize, h: usize, w: usize) -> Result<Self> {
        if c * h * w != self.num_features {
            return Err(Error::Shape(format!(
                "image shape {c}x{h}x{w} does not match {} features",
                self.num_features
            )));
        }
        self.image_shape = Some((c, h, w));
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn image_shape(&self) -> Option<(usize, usize, usize)> {
        self.image_shape
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.features[i * self.num_features..(i + 1) * self.num_features]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f32> {
        self.features.chunks_exact(self.num_features)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.num_classes];
        for &y in &self.labels {
            c[y] += 1;
        }
        c
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.num_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            name: self.name.clone(),
            split: self.split,
            num_features: self.num_features,
            num_classes: self.num_classes,
            image_shape: self.image_shape,
            features,
            labels,
        }
    }

    fn with_split(mut self, split: Split) -> Self {
        self.split = split;
        self
    }

    /// SHA-256 over class count, feature count, labels and feature bits.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.num_classes as u64).to_le_bytes());
        h.update((self.num_features as u64).to_le_bytes());
        for &y in &self.labels {
            h.update((y as u32).to_le_bytes());
        }
        for &x in &self.features {
            h.update(x.to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    /// `(min, max, mean)` over every feature value.
    pub fn stats(&self) -> (f64, f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0f64;
        for &x in &self.features {
            let x = f64::from(x);
            lo = lo.min(x);
            hi = hi.max(x);
            sum += x;
        }
        (lo, hi, sum / self.features.len().max(1) as f64)
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn format_err(path: &Path, offset: u64, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        offset,
        msg: msg.into(),
    }
}

/// Parsed IDX file of unsigned bytes.
#[derive(Clone, Debug, PartialEq)]
pub struct IdxArray {
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

/// Reads a big-endian IDX file of `u8` with the expected magic number
/// (2051 for images, 2049 for labels).
pub fn read_idx(path: &Path, expected_magic: u32) -> Result<IdxArray> {
    let bytes = read_file(path)?;
    if bytes.len() < 4 {
        return Err(format_err(path, bytes.len() as u64, "truncated header"));
    }
    let magic = u32::from_be_bytes(bytes[0..4].try_into().expect("4 bytes"));
    if magic != expected_magic {
        return Err(format_err(
            path,
            0,
            format!("magic {magic}, expected {expected_magic}"),
        ));
    }
    let ndims = (magic & 0xff) as usize;
    let header = 4 + 4 * ndims;
    if bytes.len() < header {
        return Err(format_err(path, bytes.len() as u64, "truncated dimension list"));
    }
    let dims: Vec<usize> = (0..ndims)
        .map(|d| u32::from_be_bytes(bytes[4 + 4 * d..8 + 4 * d].try_into().expect("4 bytes")) as usize)
        .collect();
    let count: usize = dims.iter().product();
    if bytes.len() < header + count {
        return Err(format_err(
            path,
            bytes.len() as u64,
            format!("truncated payload: need {} bytes", header + count),
        ));
    }
    Ok(IdxArray {
        dims,
        data: bytes[header..header + count].to_vec(),
    })
}

fn mnist_split(dir: &Path, prefix: &str, split: Split) -> Result<Dataset> {
    let img_path = dir.join(format!("{prefix}-images-idx3-ubyte"));
    let lbl_path = dir.join(format!("{prefix}-labels-idx1-ubyte"));
    let images = read_idx(&img_path, 2051)?;
    let labels = read_idx(&lbl_path, 2049)?;
    if images.dims[0] != labels.dims[0] {
        return Err(format_err(
            &lbl_path,
            4,
            format!("{} labels for {} images", labels.dims[0], images.dims[0]),
        ));
    }
    let (rows, cols) = (images.dims[1], images.dims[2]);
    let features = images.data.iter().map(|&b| f32::from(b)).collect();
    let labels = labels.data.iter().map(|&b| b as usize).collect();
    Dataset::new("mnist", split, rows * cols, 10, features, labels)?.with_image_shape(1, rows, cols)
}

/// `(train, test)` from the four uncompressed IDX files in `dir`.
pub fn load_mnist(dir: &Path) -> Result<(Dataset, Dataset)> {
    Ok((
        mnist_split(dir, "train", Split::Train)?,
        mnist_split(dir, "t10k", Split::Test)?,
    ))
}

const CIFAR_RECORD: usize = 3073;
const CIFAR_PER_BATCH: usize = 10_000;

fn cifar_batches(paths: &[PathBuf], split: Split) -> Result<Dataset> {
    let mut features = Vec::with_capacity(paths.len() * CIFAR_PER_BATCH * 3072);
    let mut labels = Vec::with_capacity(paths.len() * CIFAR_PER_BATCH);
    for path in paths {
        let bytes = read_file(path)?;
        if bytes.len() % CIFAR_RECORD != 0 || bytes.len() / CIFAR_RECORD != CIFAR_PER_BATCH {
            return Err(format_err(
                path,
                bytes.len() as u64,
                format!(
                    "expected {CIFAR_PER_BATCH} records of {CIFAR_RECORD} bytes, file has {} bytes",
                    bytes.len()
                ),
            ));
        }
        for (r, rec) in bytes.chunks_exact(CIFAR_RECORD).enumerate() {
            if rec[0] >= 10 {
                return Err(format_err(
                    path,
                    (r * CIFAR_RECORD) as u64,
                    format!("label {} out of range", rec[0]),
                ));
            }
            labels.push(rec[0] as usize);
            features.extend(rec[1..].iter().map(|&b| f32::from(b)));
        }
    }
    Dataset::new("cifar10", split, 3072, 10, features, labels)?.with_image_shape(3, 32, 32)
}

/// `(train, test)` from `data_batch_{1..5}.bin` and `test_batch.bin`.
/// Pixels stay in file order: 1024 red, 1024 green, 1024 blue, each row-major.
pub fn load_cifar10(dir: &Path) -> Result<(Dataset, Dataset)> {
    let train: Vec<PathBuf> = (1..=5).map(|i| dir.join(format!("data_batch_{i}.bin"))).collect();
    Ok((
        cifar_batches(&train, Split::Train)?,
        cifar_batches(&[dir.join("test_batch.bin")], Split::Test)?,
    ))
}

/// Describes a numeric text dataset. Paths are relative to the schema file.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSchema {
    pub name: String,
    pub train: Vec<PathBuf>,
    #[serde(default)]
    pub test: Vec<PathBuf>,
    /// Column holding the label; negative counts from the end. Ignored when
    /// separate label files are given.
    #[serde(default = "default_label_column")]
    pub label_column: i64,
    #[serde(default)]
    pub train_labels: Vec<PathBuf>,
    #[serde(default)]
    pub test_labels: Vec<PathBuf>,
    pub num_classes: usize,
    /// Fraction of the train rows held out as test when no test files are given.
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default)]
    pub split_seed: u64,
}

fn default_label_column() -> i64 {
    -1
}

fn default_test_fraction() -> f64 {
    0.2
}

impl TableSchema {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Rows of numbers separated by commas and/or whitespace. A first line that
/// does not parse as numbers is treated as a header and skipped.
pub fn read_numeric_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let cells: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|c| !c.is_empty())
            .collect();
        if cells.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = cells
            .iter()
            .map(|c| c.trim_matches('\'').trim_matches('"').parse::<f64>())
            .collect();
        let row = match parsed {
            Ok(r) => r,
            Err(_) if rows.is_empty() && width.is_none() && i == 0 => continue,
            Err(e) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: format!("non-numeric cell: {e}"),
                })
            }
        };
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: format!("expected {w} cells, got {}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    Ok(rows)
}

fn read_table_part(
    base: &Path,
    files: &[PathBuf],
    label_files: &[PathBuf],
    label_column: i64,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut feats = Vec::new();
    let mut labels = Vec::new();
    for f in files {
        feats.extend(read_numeric_table(&base.join(f))?);
    }
    if !label_files.is_empty() {
        for f in label_files {
            let p = base.join(f);
            for (i, row) in read_numeric_table(&p)?.into_iter().enumerate() {
                if row.len() != 1 {
                    return Err(Error::Parse {
                        path: p.clone(),
                        line: i + 1,
                        msg: "label files need one value per line".into(),
                    });
                }
                labels.push(row[0]);
            }
        }
        if labels.len() != feats.len() {
            return Err(Error::LengthMismatch {
                what: "label file rows",
                expected: feats.len(),
                got: labels.len(),
            });
        }
        return Ok((feats, labels));
    }
    for row in &mut feats {
        let w = row.len() as i64;
        let col = if label_column < 0 { w + label_column } else { label_column };
        if !(0..w).contains(&col) {
            return Err(Error::Config(format!("label column {label_column} outside {w} columns")));
        }
        labels.push(row.remove(col as usize));
    }
    Ok((feats, labels))
}

/// Loads a text table described by a schema file. Labels are remapped to
/// `0..K` in ascending order of their numeric value.
pub fn load_csv_dataset(schema_path: &Path) -> Result<(Dataset, Dataset)> {
    let schema = TableSchema::from_file(schema_path)?;
    let base = schema_path.parent().unwrap_or(Path::new("."));
    let (train_x, train_y) =
        read_table_part(base, &schema.train, &schema.train_labels, schema.label_column)?;
    let (test_x, test_y) = if schema.test.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        read_table_part(base, &schema.test, &schema.test_labels, schema.label_column)?
    };

    let mut distinct: Vec<f64> = train_y.iter().chain(&test_y).copied().collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() != schema.num_classes {
        return Err(Error::Config(format!(
            "{}: found {} distinct labels, schema says {}",
            schema.name,
            distinct.len(),
            schema.num_classes
        )));
    }
    let remap = |y: &f64| distinct.binary_search_by(|d| d.total_cmp(y)).expect("label present");

    let width = train_x.first().map(Vec::len).unwrap_or(0);
    let build = |x: Vec<Vec<f64>>, y: &[f64], split| -> Result<Dataset> {
        if let Some(bad) = x.iter().find(|r| r.len() != width) {
            return Err(Error::Shape(format!("{} features, expected {width}", bad.len())));
        }
        let features = x.into_iter().flatten().map(|v| v as f32).collect();
        let labels = y.iter().map(remap).collect();
        Dataset::new(schema.name.clone(), split, width, schema.num_classes, features, labels)
    };
    let train = build(train_x, &train_y, Split::Train)?;
    if schema.test.is_empty() {
        return split_train_test(&train, schema.test_fraction, schema.split_seed);
    }
    let test = build(test_x, &test_y, Split::Test)?;
    Ok((train, test))
}

/// Seeded random partition; the test part gets `ceil(fraction · N)` rows.
pub fn split_train_test(ds: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Config(format!("test fraction {fraction} outside [0, 1)")));
    }
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = (fraction * ds.len() as f64).ceil() as usize;
    let (test_idx, train_idx) = idx.split_at(n_test);
    let mut train_idx = train_idx.to_vec();
    let mut test_idx = test_idx.to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((
        ds.select(&train_idx).with_split(Split::Train),
        ds.select(&test_idx).with_split(Split::Test),
    ))
}

/// Monotone piecewise-linear map fitted on a training split so that the
/// result has global min −1, max 1 and mean 0.
///
/// Values are first range-mapped to `[−1, 1]`; the range-mapped value
/// `p` whose image is the mean is then pinned to 0 by scaling `[−1, p]` onto
/// `[−1, 0]` and `[p, 1]` onto `[0, 1]`. `p` is found by bisection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalizer {
    pub min: f64,
    pub max: f64,
    pub pivot: f64,
}

impl Normalizer {
    pub fn fit(train: &Dataset) -> Result<Self> {
        let (min, max, _) = train.stats();
        if !(max > min) {
            return Err(Error::Degenerate(format!(
                "{}: constant features ({min}), cannot normalize",
                train.name()
            )));
        }
        let mut me = Self { min, max, pivot: 0.0 };
        let n = train.features().len() as f64;
        // pixel data has few distinct values, so bisect over a histogram
        let mut hist: std::collections::HashMap<u32, u64> = std::collections::HashMap::new();
        for &x in train.features() {
            *hist.entry(x.to_bits()).or_default() += 1;
        }
        let mut hist: Vec<(f64, f64)> = hist
            .into_iter()
            .map(|(b, c)| (f64::from(f32::from_bits(b)), c as f64))
            .collect();
        hist.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mean_at = |p: f64| {
            let m = Self { min, max, pivot: p };
            hist.iter().map(|&(x, c)| c * m.map(x)).sum::<f64>() / n
        };
        // mean is decreasing in the pivot
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let m = mean_at(mid);
            if m.abs() < 1e-12 {
                lo = mid;
                hi = mid;
                break;
            }
            if m > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        me.pivot = 0.5 * (lo + hi);
        let residual = mean_at(me.pivot);
        if residual.abs() > 1e-6 {
            // more than half the values sit at one extreme; keep the range exact
            log::warn!("{}: normalized mean {residual:.4} cannot reach 0", train.name());
        }
        Ok(me)
    }

    #[inline]
    pub fn map(&self, x: f64) -> f64 {
        if x <= self.min {
            return -1.0;
        }
        if x >= self.max {
            return 1.0;
        }
        let r = 2.0 * (x - self.min) / (self.max - self.min) - 1.0;
        let p = self.pivot;
        if r < p {
            -1.0 + (r + 1.0) / (p + 1.0)
        } else {
            (r - p) / (1.0 - p)
        }
    }

    pub fn apply(&self, ds: &Dataset) -> Dataset {
        let mut out = ds.clone();
        for x in &mut out.features {
            *x = self.map(f64::from(*x)) as f32;
        }
        out
    }
}

/// Fits a [`Normalizer`] on `train` and applies it to both splits.
pub fn normalize(train: &Dataset, test: &Dataset) -> Result<(Dataset, Dataset, Normalizer)> {
    let norm = Normalizer::fit(train)?;
    Ok((norm.apply(train), norm.apply(test), norm))
}

/// Seeded subsample keeping only `classes` (relabeled `0..classes.len()` in
/// the given order) with at most `max_per_class` rows each. Rows keep their
/// original relative order.
pub fn subset(ds: &Dataset, classes: &[usize], max_per_class: Option<usize>, seed: u64) -> Result<Dataset> {
    if classes.is_empty() {
        return Err(Error::TooFewClasses(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    for (new_label, &c) in classes.iter().enumerate() {
        let mut idx: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == c).collect();
        if idx.is_empty() {
            return Err(Error::ClassAbsent(c));
        }
        idx.shuffle(&mut rng);
        if let Some(cap) = max_per_class {
            idx.truncate(cap);
        }
        chosen.extend(idx.into_iter().map(|i| (i, new_label)));
    }
    chosen.sort_unstable();
    let mut out = ds.select(&chosen.iter().map(|&(i, _)| i).collect::<Vec<_>>());
    out.labels = chosen.iter().map(|&(_, y)| y).collect();
    out.num_classes = classes.len();
    Ok(out)
}

/// Isotropic Gaussian clusters whose centers sit `separation` apart along
/// distinct axes.
pub fn gaussian_blobs(
    num_classes: usize,
    per_class: usize,
    dim: usize,
    separation: f64,
    seed: u64,
    split: Split,
) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = rand_distr_normal();
    let mut features = Vec::with_capacity(num_classes * per_class * dim);
    let mut labels = Vec::with_capacity(num_classes * per_class);
    for i in 0..num_classes * per_class {
        let c = i % num_classes;
        for d in 0..dim {
            let center = if d == c % dim { separation } else { 0.0 };
            features.push((center + normal(&mut rng)) as f32);
        }
        labels.push(c);
    }
    Dataset::new("blobs", split, dim, num_classes, features, labels)
}

/// Standard normal sample by Box–Muller.
fn rand_distr_normal() -> impl Fn(&mut ChaCha8Rng) -> f64 {
    |rng: &mut ChaCha8Rng| {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

const CANONICAL_MAGIC: &str = "ANNEALDS1";

/// Writes the cached canonical form: one ASCII header line, then `N × (F+1)`
/// little-endian `f32` values per row (label first, then features).
pub fn write_canonical(ds: &Dataset, path: &Path) -> Result<()> {
    let shape = match ds.image_shape {
        Some((c, h, w)) => format!("{c}x{h}x{w}"),
        None => "none".to_string(),
    };
    let mut out = Vec::with_capacity(64 + ds.len() * (ds.num_features + 1) * 4);
    writeln!(
        out,
        "{CANONICAL_MAGIC} name={} split={} rows={} cols={} classes={} shape={shape}",
        ds.name,
        ds.split.as_str(),
        ds.len(),
        ds.num_features,
        ds.num_classes
    )
    .expect("write to vec");
    for (row, &y) in ds.rows().zip(&ds.labels) {
        out.extend_from_slice(&(y as f32).to_le_bytes());
        for &x in row {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_canonical(path: &Path) -> Result<Dataset> {
    let mut file = BufReader::new(fs::File::open(path).map_err(|e| Error::io(path, e))?);
    let mut header = String::new();
    file.read_line(&mut header).map_err(|e| Error::io(path, e))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some(CANONICAL_MAGIC) {
        return Err(format_err(path, 0, "missing ANNEALDS1 magic"));
    }
    let kv: std::collections::HashMap<&str, &str> = fields.filter_map(|f| f.split_once('=')).collect();
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| format_err(path, 0, format!("header lacks `{k}`")));
    let num = |k: &str| -> Result<usize> {
        get(k)?.parse().map_err(|_| format_err(path, 0, format!("bad `{k}`")))
    };
    let (rows, cols, classes) = (num("rows")?, num("cols")?, num("classes")?);
    let split = match get("split")? {
        "train" => Split::Train,
        "test" => Split::Test,
        s => return Err(format_err(path, 0, format!("bad split `{s}`"))),
    };
    let mut body = Vec::new();
    file.read_to_end(&mut body).map_err(|e| Error::io(path, e))?;
    let need = rows * (cols + 1) * 4;
    if body.len() != need {
        return Err(format_err(
            path,
            (header.len() + body.len()) as u64,
            format!("payload has {} bytes, expected {need}", body.len()),
        ));
    }
    let vals: Vec<f32> = body
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().expect("4 bytes")))
        .collect();
    let mut features = Vec::with_capacity(rows * cols);
    let mut labels = Vec::with_capacity(rows);
    for r in vals.chunks_exact(cols + 1) {
        labels.push(r[0] as usize);
        features.extend_from_slice(&r[1..]);
    }
    let ds = Dataset::new(get("name")?, split, cols, classes, features, labels)?;
    match get("shape")? {
        "none" => Ok(ds),
        s => {
            let dims: Vec<usize> = s.split('x').filter_map(|d| d.parse().ok()).collect();
            if dims.len() != 3 {
                return Err(format_err(path, 0, format!("bad shape `{s}`")));
            }
            ds.with_image_shape(dims[0], dims[1], dims[2])
        }
    }
}
