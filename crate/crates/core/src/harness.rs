// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration, the train/evaluate loop, benchmark suites and
//! report files.
//!
//! A training step runs the network on a mini-batch, turns each output row
//! into a control schedule, evolves `|0…0⟩` under it, builds per-class
//! density matrices from the batch, and pulls the clustering-loss gradient
//! back through the evolution into the network.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{self, Dataset, Split};
use crate::error::{Error, Result};
use crate::evolution::{backprop_schedule, evolve, overlap_error, EvolutionMethod, EvolutionTape};
use crate::learning::{argmax_rows, softmax_cross_entropy, Architecture, Network, Optimizer, OptimizerKind, Tensor};
use crate::objective::{
    baseline_classify, clustering_loss_grad, hs_distance, state_cotangent, BaselineMetric, ClassStats, ClassifierMetric,
    NearestCluster,
};
use crate::qcore::{build_hamiltonian, dense_expm, term_count, StateVector, MAX_QUBITS};
use crate::schedule::ControlSchedule;
use crate::evolution::trotter_slice;

/// Where samples come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    /// Directory of uncompressed IDX files.
    #[default]
    Mnist,
    /// Directory of CIFAR-10 binary batches.
    Cifar10,
    /// Schema file describing numeric text tables.
    Table,
    /// Seeded Gaussian clusters; needs no files.
    Blobs,
}

/// Network family and whether its output programs the annealer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "nn")]
    Nn,
    #[default]
    #[serde(rename = "nn+annealer")]
    NnAnnealer,
    #[serde(rename = "cnn")]
    Cnn,
    #[serde(rename = "cnn+annealer")]
    CnnAnnealer,
}

impl Model {
    pub fn architecture(&self) -> Architecture {
        match self {
            Model::Nn | Model::NnAnnealer => Architecture::Mlp,
            Model::Cnn | Model::CnnAnnealer => Architecture::Cnn,
        }
    }

    pub fn uses_annealer(&self) -> bool {
        matches!(self, Model::NnAnnealer | Model::CnnAnnealer)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerName {
    #[default]
    Adam,
    Sgd,
}

/// One experiment, read from a flat TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetKind,
    pub data_path: PathBuf,
    pub model: Model,
    pub qubits: usize,
    pub steps: usize,
    pub trotter_number: usize,
    pub trotter_order: usize,
    pub total_time: f64,
    pub optimizer: OptimizerName,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Evaluate every this many epochs (the last epoch is always evaluated).
    pub eval_every: usize,
    pub seed: u64,
    /// When false the randomly initialized model is evaluated once.
    pub train: bool,
    /// Serial sample loops; results are bit-reproducible either way.
    pub deterministic: bool,
    /// Keep only these classes (relabeled in this order); empty keeps all.
    pub classes: Vec<usize>,
    pub train_per_class: Option<usize>,
    pub test_per_class: Option<usize>,
    pub subset_seed: u64,
    pub normalize: bool,
    pub metric: ClassifierMetric,
    /// Weight of the optional within-class spread penalty.
    pub compactness: f64,
    pub baseline_metric: BaselineMetric,
    pub blob_classes: usize,
    pub blob_features: usize,
    pub blob_per_class: usize,
    pub blob_separation: f64,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetKind::Mnist,
            data_path: PathBuf::from("data/mnist"),
            model: Model::NnAnnealer,
            qubits: 10,
            steps: 10,
            trotter_number: 50,
            trotter_order: 2,
            total_time: crate::schedule::DEFAULT_TOTAL_TIME,
            optimizer: OptimizerName::Adam,
            learning_rate: 1e-3,
            momentum: 0.0,
            epochs: 20,
            batch_size: 64,
            eval_every: 1,
            seed: 0,
            train: true,
            deterministic: false,
            classes: Vec::new(),
            train_per_class: None,
            test_per_class: None,
            subset_seed: 0,
            normalize: true,
            metric: ClassifierMetric::HilbertSchmidt,
            compactness: 0.0,
            baseline_metric: BaselineMetric::Euclidean,
            blob_classes: 3,
            blob_features: 8,
            blob_per_class: 100,
            blob_separation: 3.0,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn method(&self) -> Result<EvolutionMethod> {
        EvolutionMethod::trotter(self.trotter_order, self.trotter_number)
    }

    pub fn optimizer_kind(&self) -> OptimizerKind {
        match self.optimizer {
            OptimizerName::Adam => OptimizerKind::Adam {
                lr: self.learning_rate,
                beta1: 0.9,
                beta2: 0.999,
                eps: 1e-8,
            },
            OptimizerName::Sgd => OptimizerKind::Sgd {
                lr: self.learning_rate,
                momentum: self.momentum,
            },
        }
    }

    /// Length of a flattened schedule, `steps · term_count(qubits)`.
    pub fn schedule_len(&self) -> usize {
        self.steps * term_count(self.qubits)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.model.uses_annealer() {
            if !(1..=MAX_QUBITS).contains(&self.qubits) {
                return Err(Error::InvalidQubitCount(self.qubits));
            }
            if self.steps == 0 {
                return bad("steps must be >= 1".into());
            }
            self.method()?;
            if !(self.total_time > 0.0 && self.total_time.is_finite()) {
                return bad(format!("total_time {} must be positive", self.total_time));
            }
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1".into());
        }
        if self.eval_every == 0 {
            return bad("eval_every must be >= 1".into());
        }
        self.optimizer_kind().validate()?;
        if !self.compactness.is_finite() || self.compactness < 0.0 {
            return bad(format!("compactness {} must be >= 0", self.compactness));
        }
        Ok(())
    }
}

/// Loads both splits, applies the class/size subset, then fits the
/// normalization on the (subset) train split.
pub fn load_dataset(cfg: &ExperimentConfig) -> Result<(Dataset, Dataset)> {
    let (train, test) = match cfg.dataset {
        DatasetKind::Mnist => data::load_mnist(&cfg.data_path)?,
        DatasetKind::Cifar10 => data::load_cifar10(&cfg.data_path)?,
        DatasetKind::Table => data::load_csv_dataset(&cfg.data_path)?,
        DatasetKind::Blobs => {
            let make = |seed, split| {
                data::gaussian_blobs(
                    cfg.blob_classes,
                    cfg.blob_per_class,
                    cfg.blob_features,
                    cfg.blob_separation,
                    seed,
                    split,
                )
            };
            (make(cfg.subset_seed, Split::Train)?, make(cfg.subset_seed ^ 0x5eed, Split::Test)?)
        }
    };
    let (train, test) = if cfg.classes.is_empty() && cfg.train_per_class.is_none() && cfg.test_per_class.is_none() {
        (train, test)
    } else {
        let classes: Vec<usize> = if cfg.classes.is_empty() {
            (0..train.num_classes()).collect()
        } else {
            cfg.classes.clone()
        };
        (
            data::subset(&train, &classes, cfg.train_per_class, cfg.subset_seed)?,
            data::subset(&test, &classes, cfg.test_per_class, cfg.subset_seed.wrapping_add(1))?,
        )
    };
    if cfg.normalize {
        let (train, test, _) = data::normalize(&train, &test)?;
        Ok((train, test))
    } else {
        Ok((train, test))
    }
}

/// Metrics of one evaluation pass.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// Loss over the whole train split at evaluation time.
    pub train_loss: f64,
    /// Mean of the mini-batch losses seen during the epoch (none for epoch 0).
    pub batch_loss: Option<f64>,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub config: ExperimentConfig,
    /// Epoch 0 is the untrained model.
    pub epochs: Vec<EpochMetrics>,
    /// Wall-clock seconds per epoch, index-aligned with training epochs `1..`.
    pub epoch_seconds: Vec<f64>,
    pub parameter_count: usize,
    pub train_hash: String,
    pub test_hash: String,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_hash: String,
    /// `confusion[true][predicted]` on the test split at the last evaluation.
    pub confusion: Vec<Vec<usize>>,
    /// Hilbert–Schmidt distances between the training-split class density
    /// matrices at the last evaluation. Empty for classical models.
    pub class_distances: Vec<Vec<f64>>,
}

impl RunReport {
    pub fn final_metrics(&self) -> &EpochMetrics {
        self.epochs.last().expect("at least the untrained evaluation")
    }

    /// Per-epoch metrics; contains no timings, so reruns are byte-identical.
    pub fn metrics_csv(&self) -> String {
        let mut s = String::from("epoch,train_loss,batch_loss,train_accuracy,test_accuracy\n");
        for e in &self.epochs {
            let bl = e.batch_loss.map(|v| format!("{v:e}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{:e},{},{},{}",
                e.epoch, e.train_loss, bl, e.train_accuracy, e.test_accuracy
            );
        }
        s
    }

    pub fn confusion_csv(&self) -> String {
        let mut s = String::new();
        for row in &self.confusion {
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn distances_csv(&self) -> String {
        let mut s = String::new();
        for row in &self.class_distances {
            let cells: Vec<String> = row.iter().map(|d| format!("{d:e}")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn timings_csv(&self) -> String {
        let mut s = String::from("epoch,seconds\n");
        for (i, t) in self.epoch_seconds.iter().enumerate() {
            let _ = writeln!(s, "{},{t}", i + 1);
        }
        s
    }

    /// Config echo plus content hashes, as TOML.
    pub fn meta(&self) -> String {
        #[derive(Serialize)]
        struct Run<'a> {
            parameter_count: usize,
            train_hash: &'a str,
            test_hash: &'a str,
            checkpoint_hash: &'a str,
        }
        #[derive(Serialize)]
        struct Meta<'a> {
            config: &'a ExperimentConfig,
            run: Run<'a>,
        }
        toml::to_string(&Meta {
            config: &self.config,
            run: Run {
                parameter_count: self.parameter_count,
                train_hash: &self.train_hash,
                test_hash: &self.test_hash,
                checkpoint_hash: &self.checkpoint_hash,
            },
        })
        .expect("meta serializes")
    }

    /// Writes `report.csv`, `report.meta`, `confusion.csv`, `timings.csv`
    /// and, for annealer models, `distances.csv`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in [
            ("report.csv", self.metrics_csv()),
            ("report.meta", self.meta()),
            ("confusion.csv", self.confusion_csv()),
            ("timings.csv", self.timings_csv()),
        ] {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        }
        if !self.class_distances.is_empty() {
            let p = dir.join("distances.csv");
            fs::write(&p, self.distances_csv()).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Network plus the pieces needed to run it on a dataset.
struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    net: Network<f64>,
    method: Option<EvolutionMethod>,
    num_classes: usize,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig, train: &Dataset, net: Option<Network<f64>>) -> Result<Self> {
        let k = train.num_classes();
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        let outputs = if cfg.model.uses_annealer() { cfg.schedule_len() } else { k };
        let net = match net {
            Some(n) => {
                if n.output_len() != outputs || n.input_len() != train.num_features() {
                    return Err(Error::Shape(format!(
                        "checkpoint maps {} -> {}, run needs {} -> {outputs}",
                        n.input_len(),
                        n.output_len(),
                        train.num_features()
                    )));
                }
                n
            }
            None => Network::build(
                cfg.model.architecture(),
                train.num_features(),
                train.image_shape(),
                outputs,
                cfg.model.uses_annealer(),
                cfg.seed,
            )?,
        };
        let method = if cfg.model.uses_annealer() { Some(cfg.method()?) } else { None };
        Ok(Self {
            cfg,
            net,
            method,
            num_classes: k,
        })
    }

    fn batch(&self, ds: &Dataset, idx: &[usize]) -> Result<Tensor<f64>> {
        Tensor::from_rows(idx.iter().map(|&i| ds.row(i)), self.net.input_shape())
    }

    fn schedule(&self, row: &[f64]) -> Result<ControlSchedule<f64>> {
        ControlSchedule::from_flat(row.to_vec(), self.cfg.qubits, self.cfg.steps, self.cfg.total_time)
    }

    /// Evolves every output row; order of results matches `outputs`.
    fn evolve_rows(&self, outputs: &Tensor<f64>) -> Result<Vec<(StateVector<f64>, EvolutionTape<f64>)>> {
        let method = self.method.expect("annealer model");
        let run = |s: usize| self.schedule(outputs.sample(s)).and_then(|sch| evolve(&sch, method));
        if self.cfg.deterministic {
            (0..outputs.batch()).map(run).collect()
        } else {
            (0..outputs.batch()).into_par_iter().map(run).collect()
        }
    }

    /// Network outputs for a whole split, in chunks.
    fn outputs(&self, ds: &Dataset) -> Result<Vec<Tensor<f64>>> {
        let idx: Vec<usize> = (0..ds.len()).collect();
        idx.chunks(256).map(|c| self.net.predict(&self.batch(ds, c)?)).collect()
    }

    fn final_states(&self, ds: &Dataset) -> Result<Vec<StateVector<f64>>> {
        let mut states = Vec::with_capacity(ds.len());
        for out in self.outputs(ds)? {
            states.extend(self.evolve_rows(&out)?.into_iter().map(|(s, _)| s));
        }
        Ok(states)
    }

    fn evaluate(&self, train: &Dataset, test: &Dataset, epoch: usize) -> Result<Evaluation> {
        let k = self.num_classes;
        let mut confusion = vec![vec![0usize; k]; k];
        let mut distances = Vec::new();
        let (train_loss, train_pred, test_pred) = if self.method.is_some() {
            let train_states = self.final_states(train)?;
            let dim = 1usize << self.cfg.qubits;
            let mut stats = ClassStats::new(k, dim);
            for (psi, &y) in train_states.iter().zip(train.labels()) {
                stats.accumulate(psi, y)?;
            }
            let rhos = stats.finalize()?;
            for a in &rhos {
                distances.push(rhos.iter().map(|b| hs_distance(a, b)).collect::<Result<Vec<_>>>()?);
            }
            let loss = clustering_loss_grad(&rhos, self.cfg.compactness)?.loss;
            let clf = NearestCluster::new(rhos, self.cfg.metric);
            let train_pred: Vec<usize> = train_states.iter().map(|s| clf.classify(s)).collect();
            let test_pred: Vec<usize> = self.final_states(test)?.iter().map(|s| clf.classify(s)).collect();
            (loss, train_pred, test_pred)
        } else {
            let mut loss = 0.0;
            let mut train_pred = Vec::with_capacity(train.len());
            let labels = train.labels();
            let mut offset = 0;
            for out in self.outputs(train)? {
                let b = out.batch();
                let (l, _) = softmax_cross_entropy(&out, &labels[offset..offset + b])?;
                loss += l * b as f64;
                train_pred.extend(argmax_rows(&out));
                offset += b;
            }
            let mut test_pred = Vec::with_capacity(test.len());
            for out in self.outputs(test)? {
                test_pred.extend(argmax_rows(&out));
            }
            (loss / train.len().max(1) as f64, train_pred, test_pred)
        };
        for (&y, &p) in test.labels().iter().zip(&test_pred) {
            confusion[y][p] += 1;
        }
        let acc = |pred: &[usize], ds: &Dataset| {
            let hits = pred.iter().zip(ds.labels()).filter(|(p, y)| p == y).count();
            hits as f64 / ds.len().max(1) as f64
        };
        Ok(Evaluation {
            metrics: EpochMetrics {
                epoch,
                train_loss,
                batch_loss: None,
                train_accuracy: acc(&train_pred, train),
                test_accuracy: acc(&test_pred, test),
            },
            confusion,
            distances,
        })
    }

    /// One gradient step; returns the batch loss, or `None` when the batch
    /// holds fewer than two classes.
    fn train_step(&mut self, ds: &Dataset, idx: &[usize], opt: &mut Optimizer<f64>) -> Result<Option<f64>> {
        let x = self.batch(ds, idx)?;
        let out = self.net.forward(&x)?;
        let labels: Vec<usize> = idx.iter().map(|&i| ds.labels()[i]).collect();
        let (loss, grad) = if self.method.is_some() {
            // loss over the classes present in this batch only
            let mut compact = vec![usize::MAX; self.num_classes];
            let mut present = 0;
            for &y in &labels {
                if compact[y] == usize::MAX {
                    compact[y] = present;
                    present += 1;
                }
            }
            if present < 2 {
                return Ok(None);
            }
            let evolved = self.evolve_rows(&out)?;
            let mut stats = ClassStats::new(present, 1usize << self.cfg.qubits);
            for ((psi, _), &y) in evolved.iter().zip(&labels) {
                stats.accumulate(psi, compact[y])?;
            }
            let rhos = stats.finalize()?;
            let lg = clustering_loss_grad(&rhos, self.cfg.compactness)?;
            if !lg.loss.is_finite() {
                return Err(self.dump(idx, &labels, &out, lg.loss));
            }
            let counts = stats.counts();
            let back = |s: usize| -> Result<Vec<f64>> {
                let (psi, tape) = &evolved[s];
                let c = compact[labels[s]];
                let g = state_cotangent(&lg.d_rho[c], psi, counts[c]);
                Ok(backprop_schedule(tape, &g)?.flatten())
            };
            let rows: Vec<Vec<f64>> = if self.cfg.deterministic {
                (0..idx.len()).map(back).collect::<Result<_>>()?
            } else {
                (0..idx.len()).into_par_iter().map(back).collect::<Result<_>>()?
            };
            let grad = Tensor::new(out.shape().to_vec(), rows.concat())?;
            (lg.loss, grad)
        } else {
            let (loss, grad) = softmax_cross_entropy(&out, &labels)?;
            if !loss.is_finite() {
                return Err(self.dump(idx, &labels, &out, loss));
            }
            (loss, grad)
        };
        self.net.zero_grad();
        self.net.backward(&grad)?;
        opt.step_network(&mut self.net)?;
        Ok(Some(loss))
    }

    /// Writes the offending batch to disk and builds the error pointing at it.
    fn dump(&self, idx: &[usize], labels: &[usize], out: &Tensor<f64>, loss: f64) -> Error {
        let dir = self.cfg.out_dir.clone().unwrap_or_else(std::env::temp_dir);
        let path = dir.join("nonfinite-batch.txt");
        let mut s = format!("loss = {loss}\n");
        for (s_i, (&i, &y)) in idx.iter().zip(labels).enumerate() {
            let row: Vec<String> = out.sample(s_i).iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(s, "sample {i} label {y}: {}", row.join(","));
        }
        let _ = fs::create_dir_all(&dir).and_then(|_| fs::write(&path, s));
        Error::NonFiniteLoss {
            epoch: 0,
            batch: 0,
            dump: path,
        }
    }
}

/// Loads the data named by `cfg` and runs [`run_experiment_on`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let (train, test) = load_dataset(cfg)?;
    run_experiment_on(cfg, &train, &test)
}

/// Evaluates the untrained model, then (if `cfg.train`) trains for
/// `cfg.epochs` epochs, evaluating on the test split as configured.
/// Writes outputs and the checkpoint when `cfg.out_dir` is set.
pub fn run_experiment_on(cfg: &ExperimentConfig, train: &Dataset, test: &Dataset) -> Result<RunReport> {
    execute(cfg, train, test, None)
}

/// Evaluates a saved network on the data named by `cfg`.
pub fn run_eval(cfg: &ExperimentConfig, checkpoint: &Path) -> Result<RunReport> {
    cfg.validate()?;
    let net = Network::load(checkpoint)?;
    let (train, test) = load_dataset(cfg)?;
    let mut cfg = cfg.clone();
    cfg.train = false;
    execute(&cfg, &train, &test, Some(net))
}

struct Evaluation {
    metrics: EpochMetrics,
    confusion: Vec<Vec<usize>>,
    distances: Vec<Vec<f64>>,
}

fn execute(cfg: &ExperimentConfig, train: &Dataset, test: &Dataset, net: Option<Network<f64>>) -> Result<RunReport> {
    cfg.validate()?;
    if train.num_features() != test.num_features() || train.num_classes() != test.num_classes() {
        return Err(Error::Shape("train and test splits disagree in shape".into()));
    }
    let mut runner = Runner::new(cfg, train, net)?;
    let mut last = runner.evaluate(train, test, 0)?;
    let mut epochs = vec![last.metrics.clone()];
    let mut epoch_seconds = Vec::new();
    if cfg.train {
        let mut opt = Optimizer::new(cfg.optimizer_kind())?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut order: Vec<usize> = (0..train.len()).collect();
        for epoch in 1..=cfg.epochs {
            let t0 = Instant::now();
            order.shuffle(&mut rng);
            let mut losses = Vec::new();
            for (b, chunk) in order.chunks(cfg.batch_size).enumerate() {
                match runner.train_step(train, chunk, &mut opt) {
                    Ok(Some(l)) => losses.push(l),
                    Ok(None) => {}
                    Err(Error::NonFiniteLoss { dump, .. }) => {
                        return Err(Error::NonFiniteLoss { epoch, batch: b, dump })
                    }
                    Err(e) => return Err(e),
                }
            }
            if epoch % cfg.eval_every == 0 || epoch == cfg.epochs {
                last = runner.evaluate(train, test, epoch)?;
                if !losses.is_empty() {
                    last.metrics.batch_loss = Some(losses.iter().sum::<f64>() / losses.len() as f64);
                }
                epochs.push(last.metrics.clone());
            }
            epoch_seconds.push(t0.elapsed().as_secs_f64());
            log::info!("epoch {epoch}: {:?}", epochs.last());
        }
    }
    let bytes = runner.net.checkpoint_bytes();
    let mut report = RunReport {
        config: cfg.clone(),
        epochs,
        epoch_seconds,
        parameter_count: runner.net.parameter_count(),
        train_hash: train.content_hash(),
        test_hash: test.content_hash(),
        checkpoint: None,
        checkpoint_hash: sha256_hex(&bytes),
        confusion: last.confusion,
        class_distances: last.distances,
    };
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let p = dir.join("model.ckpt");
        fs::write(&p, &bytes).map_err(|e| Error::io(&p, e))?;
        report.checkpoint = Some(p);
        report.write_outputs(dir)?;
    }
    Ok(report)
}

/// Accuracy of the averaged-input classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineReport {
    pub dataset: String,
    pub metric: BaselineMetric,
    pub accuracy: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub train_hash: String,
    pub test_hash: String,
}

impl BaselineReport {
    pub fn csv(&self) -> String {
        format!(
            "dataset,metric,train_size,test_size,accuracy\n{},{:?},{},{},{}\n",
            self.dataset, self.metric, self.train_size, self.test_size, self.accuracy
        )
    }
}

pub fn run_baseline(cfg: &ExperimentConfig) -> Result<BaselineReport> {
    let (train, test) = load_dataset(cfg)?;
    let report = baseline_on(&train, &test, cfg.baseline_metric)?;
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let p = dir.join("baseline.csv");
        fs::write(&p, report.csv()).map_err(|e| Error::io(&p, e))?;
    }
    Ok(report)
}

pub fn baseline_on(train: &Dataset, test: &Dataset, metric: BaselineMetric) -> Result<BaselineReport> {
    Ok(BaselineReport {
        dataset: train.name().to_string(),
        metric,
        accuracy: baseline_classify(train, test, metric)?,
        train_size: train.len(),
        test_size: test.len(),
        train_hash: train.content_hash(),
        test_hash: test.content_hash(),
    })
}

/// Number of time slices used by the integrator benchmarks.
pub const BENCH_STEPS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrotterErrorRow {
    pub n: usize,
    pub trotter_number: usize,
    pub order: usize,
    pub overlap_error: f64,
}

/// Uniform `[0, 1)` couplings, the range a sigmoid head produces.
pub fn random_schedule(n: usize, steps: usize, rng: &mut impl Rng) -> ControlSchedule<f64> {
    let flat = (0..steps * term_count(n)).map(|_| rng.gen::<f64>()).collect();
    ControlSchedule::from_flat(flat, n, steps, crate::schedule::DEFAULT_TOTAL_TIME).expect("finite values")
}

/// Overlap error of Trotter evolution against the dense exact evolution,
/// one seeded random schedule per `n`, every Trotter number in `tns`.
pub fn run_trotter_error_bench(ns: &[usize], tns: &[usize], order: usize, seed: u64) -> Result<Vec<TrotterErrorRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
        let sched = random_schedule(n, BENCH_STEPS, &mut rng);
        let (exact, _) = evolve(&sched, EvolutionMethod::Exact)?;
        for &tn in tns {
            let (approx, _) = evolve(&sched, EvolutionMethod::trotter(order, tn)?)?;
            rows.push(TrotterErrorRow {
                n,
                trotter_number: tn,
                order,
                overlap_error: overlap_error(&approx, &exact)?,
            });
        }
    }
    Ok(rows)
}

pub fn trotter_error_csv(rows: &[TrotterErrorRow]) -> String {
    let mut s = String::from("n,trotter_number,order,overlap_error\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{:e}", r.n, r.trotter_number, r.order, r.overlap_error);
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingRow {
    pub n: usize,
    pub method: String,
    /// Median wall-clock seconds for one slice update.
    pub seconds: f64,
}

/// Median time of a single slice update `|ψ_k⟩ → |ψ_{k+1}⟩`. Exact timing
/// includes building the dense Hamiltonian and its exponential.
pub fn run_timing_bench(ns: &[usize], methods: &[EvolutionMethod], repetitions: usize) -> Result<Vec<TimingRow>> {
    let reps = repetitions.max(1);
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for &n in ns {
        let sched = random_schedule(n, 1, &mut rng);
        let coeffs = sched.slice(0).to_vec();
        let dt = sched.delta_t();
        let psi = StateVector::<f64>::zero_state(n)?;
        for &method in methods {
            method.validate()?;
            let mut times = Vec::with_capacity(reps);
            for _ in 0..reps {
                let t0 = Instant::now();
                let out = match method {
                    EvolutionMethod::Exact => dense_expm(&build_hamiltonian(&coeffs, n)?, dt).apply(&psi)?,
                    EvolutionMethod::Trotter {
                        order,
                        trotter_number,
                    } => trotter_slice(&psi, &coeffs, dt, order, trotter_number)?,
                };
                times.push(t0.elapsed().as_secs_f64());
                std::hint::black_box(out);
            }
            times.sort_by(f64::total_cmp);
            rows.push(TimingRow {
                n,
                method: method.to_string(),
                seconds: times[times.len() / 2],
            });
        }
    }
    Ok(rows)
}

pub fn timing_csv(rows: &[TimingRow]) -> String {
    let mut s = String::from("n,method,seconds\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{:e}", r.n, r.method, r.seconds);
    }
    s
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
