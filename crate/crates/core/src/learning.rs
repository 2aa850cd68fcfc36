// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! Small from-scratch networks: dense and 5×5 convolutional layers with
//! reverse-mode gradients, SGD/Adam, and flat binary checkpoints.
//!
//! Activations are laid out sample-major; image tensors are `[c, h, w]`
//! row-major within a sample.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense array with an optional gradient buffer of the same shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T: Scalar> {
    shape: Vec<usize>,
    data: Vec<T>,
    requires_grad: bool,
    grad: Option<Vec<T>>,
}

impl<T: Scalar> Tensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                what: "tensor data",
                expected,
                got: data.len(),
            });
        }
        Ok(Self {
            shape,
            data,
            requires_grad: false,
            grad: None,
        })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self {
            shape,
            data: vec![T::zero(); len],
            requires_grad: false,
            grad: None,
        }
    }

    /// Trainable tensor with a zeroed gradient buffer.
    pub fn parameter(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let mut t = Self::new(shape, data)?;
        t.requires_grad = true;
        t.grad = Some(vec![T::zero(); t.data.len()]);
        Ok(t)
    }

    /// `[rows, sample_shape...]` batch from `f32` feature rows.
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a [f32]>, sample_shape: &[usize]) -> Result<Self> {
        let per: usize = sample_shape.iter().product();
        let mut data = Vec::new();
        let mut count = 0;
        for r in rows {
            if r.len() != per {
                return Err(Error::LengthMismatch {
                    what: "batch row",
                    expected: per,
                    got: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| T::of(f64::from(x))));
            count += 1;
        }
        let mut shape = vec![count];
        shape.extend_from_slice(sample_shape);
        Self::new(shape, data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn requires_grad(&self) -> bool {
        self.requires_grad
    }

    pub fn grad(&self) -> Option<&[T]> {
        self.grad.as_deref()
    }

    pub fn grad_mut(&mut self) -> Option<&mut [T]> {
        self.grad.as_deref_mut()
    }

    pub fn zero_grad(&mut self) {
        if let Some(g) = &mut self.grad {
            g.iter_mut().for_each(|x| *x = T::zero());
        }
    }

    /// Leading dimension.
    pub fn batch(&self) -> usize {
        self.shape.first().copied().unwrap_or(0)
    }

    /// Row `i` of the leading dimension.
    pub fn sample(&self, i: usize) -> &[T] {
        let per = self.data.len() / self.batch().max(1);
        &self.data[i * per..(i + 1) * per]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Dense { input: usize, output: usize },
    Conv2D { in_ch: usize, out_ch: usize, kernel: usize },
    MaxPool2D { size: usize },
    Tanh,
    Sigmoid,
    Flatten,
}

pub const CONV_KERNEL: usize = 5;

impl Layer {
    pub fn dense(input: usize, output: usize) -> Self {
        Layer::Dense { input, output }
    }

    pub fn conv(in_ch: usize, out_ch: usize) -> Self {
        Layer::Conv2D {
            in_ch,
            out_ch,
            kernel: CONV_KERNEL,
        }
    }

    pub fn pool() -> Self {
        Layer::MaxPool2D { size: 2 }
    }

    /// `in·out + out` for dense, `(in_ch·k² + 1)·out_ch` for convolution.
    pub fn parameter_count(&self) -> usize {
        match *self {
            Layer::Dense { input, output } => input * output + output,
            Layer::Conv2D { in_ch, out_ch, kernel } => (in_ch * kernel * kernel + 1) * out_ch,
            _ => 0,
        }
    }

    fn weight_shapes(&self) -> Option<(Vec<usize>, Vec<usize>, usize)> {
        match *self {
            Layer::Dense { input, output } => Some((vec![output, input], vec![output], input)),
            Layer::Conv2D { in_ch, out_ch, kernel } => Some((
                vec![out_ch, in_ch, kernel, kernel],
                vec![out_ch],
                in_ch * kernel * kernel,
            )),
            _ => None,
        }
    }

    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        let bad = || Error::Shape(format!("{self} cannot take input {input:?}"));
        match *self {
            Layer::Dense { input: i, output } => {
                if input != [i] {
                    return Err(bad());
                }
                Ok(vec![output])
            }
            Layer::Conv2D { in_ch, out_ch, kernel } => match *input {
                [c, h, w] if c == in_ch && h >= kernel && w >= kernel => {
                    Ok(vec![out_ch, h - kernel + 1, w - kernel + 1])
                }
                _ => Err(bad()),
            },
            Layer::MaxPool2D { size } => match *input {
                [c, h, w] if h >= size && w >= size => Ok(vec![c, h / size, w / size]),
                _ => Err(bad()),
            },
            Layer::Tanh | Layer::Sigmoid => Ok(input.to_vec()),
            Layer::Flatten => Ok(vec![input.iter().product()]),
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Layer::Dense { input, output } => write!(f, "dense({input},{output})"),
            Layer::Conv2D { in_ch, out_ch, kernel } => write!(f, "conv({in_ch},{out_ch},{kernel})"),
            Layer::MaxPool2D { size } => write!(f, "maxpool({size})"),
            Layer::Tanh => f.write_str("tanh"),
            Layer::Sigmoid => f.write_str("sigmoid"),
            Layer::Flatten => f.write_str("flatten"),
        }
    }
}

impl FromStr for Layer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown layer `{s}`"));
        let (name, args) = match s.split_once('(') {
            Some((n, rest)) => (n, rest.strip_suffix(')').ok_or_else(bad)?),
            None => (s, ""),
        };
        let nums: Vec<usize> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        match (name, nums.as_slice()) {
            ("dense", &[input, output]) => Ok(Layer::Dense { input, output }),
            ("conv", &[in_ch, out_ch, kernel]) => Ok(Layer::Conv2D { in_ch, out_ch, kernel }),
            ("maxpool", &[size]) => Ok(Layer::MaxPool2D { size }),
            ("tanh", []) => Ok(Layer::Tanh),
            ("sigmoid", []) => Ok(Layer::Sigmoid),
            ("flatten", []) => Ok(Layer::Flatten),
            _ => Err(bad()),
        }
    }
}

/// Network family used by the experiments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    /// `F → 120 (tanh) → out`.
    #[default]
    Mlp,
    /// Two 5×5 conv/tanh/max-pool stages, then `120 → 84 → out` with tanh.
    Cnn,
}

/// Width of the single hidden layer of [`Architecture::Mlp`].
pub const HIDDEN_UNITS: usize = 120;

/// Feed-forward network with a named parameter store.
#[derive(Clone, Debug)]
pub struct Network<T: Scalar> {
    input_shape: Vec<usize>,
    layers: Vec<Layer>,
    /// `shapes[i]` is the per-sample input shape of layer `i`; the last entry is the output.
    shapes: Vec<Vec<usize>>,
    params: Vec<Tensor<T>>,
    names: Vec<String>,
    /// index of the weight tensor for parameterized layers; the bias follows it
    slots: Vec<Option<usize>>,
    /// inputs to every layer plus the final output, from the last recorded forward
    cache: Option<(usize, Vec<Vec<T>>)>,
}

impl<T: Scalar> Network<T> {
    /// Validates shape composition and initializes every weight and bias
    /// uniformly in `±1/√fan_in`.
    pub fn new(input_shape: Vec<usize>, layers: Vec<Layer>, seed: u64) -> Result<Self> {
        let mut shapes = vec![input_shape.clone()];
        for l in &layers {
            let next = l.output_shape(shapes.last().expect("non-empty"))?;
            shapes.push(next);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Vec::new();
        let mut names = Vec::new();
        let mut slots = Vec::new();
        for (i, l) in layers.iter().enumerate() {
            match l.weight_shapes() {
                Some((ws, bs, fan_in)) => {
                    let bound = 1.0 / (fan_in as f64).sqrt();
                    let mut draw = |len: usize| -> Vec<T> {
                        (0..len).map(|_| T::of(rng.gen_range(-bound..=bound))).collect()
                    };
                    let w = draw(ws.iter().product());
                    let b = draw(bs[0]);
                    slots.push(Some(params.len()));
                    params.push(Tensor::parameter(ws, w)?);
                    params.push(Tensor::parameter(bs, b)?);
                    let kind = if matches!(l, Layer::Dense { .. }) { "dense" } else { "conv" };
                    names.push(format!("{kind}{i}.weight"));
                    names.push(format!("{kind}{i}.bias"));
                }
                None => slots.push(None),
            }
        }
        Ok(Self {
            input_shape,
            layers,
            shapes,
            params,
            names,
            slots,
            cache: None,
        })
    }

    /// `features → 120 → outputs`, tanh hidden, optional sigmoid head.
    pub fn mlp(features: usize, outputs: usize, sigmoid_head: bool, seed: u64) -> Result<Self> {
        let mut layers = vec![
            Layer::dense(features, HIDDEN_UNITS),
            Layer::Tanh,
            Layer::dense(HIDDEN_UNITS, outputs),
        ];
        if sigmoid_head {
            layers.push(Layer::Sigmoid);
        }
        Self::new(vec![features], layers, seed)
    }

    /// LeNet-style stack on `[c, h, w]` images.
    pub fn lenet(image: (usize, usize, usize), outputs: usize, sigmoid_head: bool, seed: u64) -> Result<Self> {
        let (c, h, w) = image;
        let trunk = [
            Layer::conv(c, 6),
            Layer::Tanh,
            Layer::pool(),
            Layer::conv(6, 16),
            Layer::Tanh,
            Layer::pool(),
            Layer::Flatten,
        ];
        let mut shape = vec![c, h, w];
        for l in &trunk {
            shape = l.output_shape(&shape)?;
        }
        let mut layers = trunk.to_vec();
        layers.extend([
            Layer::dense(shape[0], 120),
            Layer::Tanh,
            Layer::dense(120, 84),
            Layer::Tanh,
            Layer::dense(84, outputs),
        ]);
        if sigmoid_head {
            layers.push(Layer::Sigmoid);
        }
        Self::new(vec![c, h, w], layers, seed)
    }

    /// Builds `arch`; the CNN needs an image shape, the MLP flattens it.
    pub fn build(
        arch: Architecture,
        features: usize,
        image: Option<(usize, usize, usize)>,
        outputs: usize,
        sigmoid_head: bool,
        seed: u64,
    ) -> Result<Self> {
        match arch {
            Architecture::Mlp => Self::mlp(features, outputs, sigmoid_head, seed),
            Architecture::Cnn => {
                let image = image.ok_or_else(|| Error::Config("the cnn architecture needs image-shaped data".into()))?;
                Self::lenet(image, outputs, sigmoid_head, seed)
            }
        }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_shape(&self) -> &[usize] {
        &self.input_shape
    }

    pub fn input_len(&self) -> usize {
        self.input_shape.iter().product()
    }

    pub fn output_len(&self) -> usize {
        self.shapes.last().expect("non-empty").iter().product()
    }

    pub fn params(&self) -> &[Tensor<T>] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Tensor<T>] {
        &mut self.params
    }

    pub fn param_names(&self) -> &[String] {
        &self.names
    }

    pub fn parameter_count(&self) -> usize {
        self.params.iter().map(Tensor::len).sum()
    }

    pub fn zero_grad(&mut self) {
        self.params.iter_mut().for_each(Tensor::zero_grad);
    }

    /// Layer list as one line, e.g. `input=784 dense(784,120) tanh ...`.
    pub fn spec_line(&self) -> String {
        let dims: Vec<String> = self.input_shape.iter().map(usize::to_string).collect();
        let mut s = format!("input={}", dims.join("x"));
        for l in &self.layers {
            s.push(' ');
            s.push_str(&l.to_string());
        }
        s
    }

    fn check_batch(&self, batch: &Tensor<T>) -> Result<usize> {
        let b = batch.batch();
        if batch.shape().len() < 2 || batch.len() != b * self.input_len() {
            return Err(Error::Shape(format!(
                "batch {:?} does not match network input {:?}",
                batch.shape(),
                self.input_shape
            )));
        }
        Ok(b)
    }

    fn run(&self, batch: &Tensor<T>, record: bool) -> Result<(usize, Vec<Vec<T>>)> {
        let b = self.check_batch(batch)?;
        let mut acts = Vec::with_capacity(if record { self.layers.len() + 1 } else { 1 });
        let mut x = batch.data().to_vec();
        for i in 0..self.layers.len() {
            let y = self.layer_forward(i, &x, b);
            if record {
                acts.push(x);
            }
            x = y;
        }
        acts.push(x);
        Ok((b, acts))
    }

    fn out_tensor(&self, b: usize, data: Vec<T>) -> Tensor<T> {
        let mut shape = vec![b];
        shape.extend_from_slice(self.shapes.last().expect("non-empty"));
        Tensor::new(shape, data).expect("shape is consistent")
    }

    /// Forward pass that records activations for [`Network::backward`].
    pub fn forward(&mut self, batch: &Tensor<T>) -> Result<Tensor<T>> {
        let (b, acts) = self.run(batch, true)?;
        let out = acts.last().expect("output").clone();
        self.cache = Some((b, acts));
        Ok(self.out_tensor(b, out))
    }

    /// Forward pass without recording.
    pub fn predict(&self, batch: &Tensor<T>) -> Result<Tensor<T>> {
        let (b, mut acts) = self.run(batch, false)?;
        Ok(self.out_tensor(b, acts.pop().expect("output")))
    }

    /// Accumulates parameter gradients for the cotangent `loss_grad` of the
    /// last forward output and returns the input gradient. Consumes the
    /// recorded activations.
    pub fn backward(&mut self, loss_grad: &Tensor<T>) -> Result<Tensor<T>> {
        let (b, acts) = self
            .cache
            .take()
            .ok_or(Error::BackwardWithoutForward(self.layers.len().saturating_sub(1)))?;
        if loss_grad.len() != b * self.output_len() {
            return Err(Error::Shape(format!(
                "loss gradient {:?} does not match output of batch {b}",
                loss_grad.shape()
            )));
        }
        let mut dy = loss_grad.data().to_vec();
        for i in (0..self.layers.len()).rev() {
            dy = self.layer_backward(i, &acts[i], &acts[i + 1], &dy, b);
        }
        let mut shape = vec![b];
        shape.extend_from_slice(&self.input_shape);
        Tensor::new(shape, dy)
    }

    fn layer_forward(&self, i: usize, x: &[T], b: usize) -> Vec<T> {
        let in_shape = &self.shapes[i];
        let out_len: usize = self.shapes[i + 1].iter().product();
        match self.layers[i] {
            Layer::Dense { input, output } => {
                let p = self.slots[i].expect("dense has parameters");
                let (w, bias) = (self.params[p].data(), self.params[p + 1].data());
                let mut y = Vec::with_capacity(b * output);
                for s in 0..b {
                    let xs = &x[s * input..(s + 1) * input];
                    for o in 0..output {
                        let row = &w[o * input..(o + 1) * input];
                        let mut acc = bias[o];
                        for (a, c) in row.iter().zip(xs) {
                            acc += *a * *c;
                        }
                        y.push(acc);
                    }
                }
                y
            }
            Layer::Conv2D { in_ch, out_ch, kernel: k } => {
                let p = self.slots[i].expect("conv has parameters");
                let (w, bias) = (self.params[p].data(), self.params[p + 1].data());
                let (h, wd) = (in_shape[1], in_shape[2]);
                let (oh, ow) = (h - k + 1, wd - k + 1);
                let mut y = vec![T::zero(); b * out_len];
                for s in 0..b {
                    let xs = &x[s * in_ch * h * wd..(s + 1) * in_ch * h * wd];
                    let ys = &mut y[s * out_len..(s + 1) * out_len];
                    for o in 0..out_ch {
                        let plane = &mut ys[o * oh * ow..(o + 1) * oh * ow];
                        plane.iter_mut().for_each(|v| *v = bias[o]);
                        for c in 0..in_ch {
                            let xc = &xs[c * h * wd..(c + 1) * h * wd];
                            for p_ in 0..k {
                                for q in 0..k {
                                    let wv = w[((o * in_ch + c) * k + p_) * k + q];
                                    for r in 0..oh {
                                        let xrow = &xc[(r + p_) * wd + q..(r + p_) * wd + q + ow];
                                        let yrow = &mut plane[r * ow..(r + 1) * ow];
                                        for (yv, xv) in yrow.iter_mut().zip(xrow) {
                                            *yv += wv * *xv;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                y
            }
            Layer::MaxPool2D { size } => {
                let (c, h, wd) = (in_shape[0], in_shape[1], in_shape[2]);
                let (oh, ow) = (h / size, wd / size);
                let mut y = Vec::with_capacity(b * out_len);
                for s in 0..b {
                    for ch in 0..c {
                        let xc = &x[(s * c + ch) * h * wd..(s * c + ch + 1) * h * wd];
                        for r in 0..oh {
                            for col in 0..ow {
                                y.push(xc[pool_argmax(xc, wd, size, r, col)]);
                            }
                        }
                    }
                }
                y
            }
            Layer::Tanh => x.iter().map(|v| v.tanh()).collect(),
            Layer::Sigmoid => x.iter().map(|&v| sigmoid(v)).collect(),
            Layer::Flatten => x.to_vec(),
        }
    }

    fn layer_backward(&mut self, i: usize, x: &[T], y: &[T], dy: &[T], b: usize) -> Vec<T> {
        let in_shape = self.shapes[i].clone();
        let in_len: usize = in_shape.iter().product();
        match self.layers[i] {
            Layer::Dense { input, output } => {
                let p = self.slots[i].expect("dense has parameters");
                let mut dx = vec![T::zero(); b * input];
                let (wt, bt) = two_mut(&mut self.params, p);
                let w = &wt.data;
                let gw = wt.grad.as_mut().expect("parameter grad");
                let gb = bt.grad.as_mut().expect("parameter grad");
                for s in 0..b {
                    let xs = &x[s * input..(s + 1) * input];
                    let dxs = &mut dx[s * input..(s + 1) * input];
                    for o in 0..output {
                        let g = dy[s * output + o];
                        gb[o] += g;
                        let row = &w[o * input..(o + 1) * input];
                        let grow = &mut gw[o * input..(o + 1) * input];
                        for j in 0..input {
                            grow[j] += g * xs[j];
                            dxs[j] += g * row[j];
                        }
                    }
                }
                dx
            }
            Layer::Conv2D { in_ch, out_ch, kernel: k } => {
                let p = self.slots[i].expect("conv has parameters");
                let (h, wd) = (in_shape[1], in_shape[2]);
                let (oh, ow) = (h - k + 1, wd - k + 1);
                let out_len = out_ch * oh * ow;
                let mut dx = vec![T::zero(); b * in_len];
                let (wt, bt) = two_mut(&mut self.params, p);
                let w = &wt.data;
                let gw = wt.grad.as_mut().expect("parameter grad");
                let gb = bt.grad.as_mut().expect("parameter grad");
                for s in 0..b {
                    let xs = &x[s * in_len..(s + 1) * in_len];
                    let dys = &dy[s * out_len..(s + 1) * out_len];
                    let dxs = &mut dx[s * in_len..(s + 1) * in_len];
                    for o in 0..out_ch {
                        let plane = &dys[o * oh * ow..(o + 1) * oh * ow];
                        gb[o] += plane.iter().copied().sum::<T>();
                        for c in 0..in_ch {
                            let xc = &xs[c * h * wd..(c + 1) * h * wd];
                            let dxc = &mut dxs[c * h * wd..(c + 1) * h * wd];
                            for p_ in 0..k {
                                for q in 0..k {
                                    let wi = ((o * in_ch + c) * k + p_) * k + q;
                                    let wv = w[wi];
                                    let mut acc = T::zero();
                                    for r in 0..oh {
                                        let base = (r + p_) * wd + q;
                                        let drow = &plane[r * ow..(r + 1) * ow];
                                        let xrow = &xc[base..base + ow];
                                        let dxrow = &mut dxc[base..base + ow];
                                        for j in 0..ow {
                                            acc += drow[j] * xrow[j];
                                            dxrow[j] += wv * drow[j];
                                        }
                                    }
                                    gw[wi] += acc;
                                }
                            }
                        }
                    }
                }
                dx
            }
            Layer::MaxPool2D { size } => {
                let (c, h, wd) = (in_shape[0], in_shape[1], in_shape[2]);
                let (oh, ow) = (h / size, wd / size);
                let mut dx = vec![T::zero(); b * in_len];
                for s in 0..b {
                    for ch in 0..c {
                        let off = (s * c + ch) * h * wd;
                        let xc = &x[off..off + h * wd];
                        for r in 0..oh {
                            for col in 0..ow {
                                let src = pool_argmax(xc, wd, size, r, col);
                                dx[off + src] += dy[((s * c + ch) * oh + r) * ow + col];
                            }
                        }
                    }
                }
                dx
            }
            Layer::Tanh => dy.iter().zip(y).map(|(&g, &v)| g * (T::one() - v * v)).collect(),
            Layer::Sigmoid => dy.iter().zip(y).map(|(&g, &v)| g * v * (T::one() - v)).collect(),
            Layer::Flatten => dy.to_vec(),
        }
    }

    /// Writes `ANNEALNET1\n<spec line>\n` followed by every parameter as a
    /// little-endian `f64`, in declaration order.
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.checkpoint_bytes()).map_err(|e| Error::io(path, e))
    }

    /// The exact bytes [`Network::save`] writes.
    pub fn checkpoint_bytes(&self) -> Vec<u8> {
        let mut out = format!("{CHECKPOINT_MAGIC}\n{}\n", self.spec_line()).into_bytes();
        for t in &self.params {
            for &v in t.data() {
                out.extend_from_slice(&v.to_le_f64_bytes());
            }
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let fmt_err = |offset: usize, msg: String| Error::Format {
            path: path.to_path_buf(),
            offset: offset as u64,
            msg,
        };
        let magic_end = CHECKPOINT_MAGIC.len() + 1;
        if bytes.len() < magic_end || &bytes[..magic_end] != format!("{CHECKPOINT_MAGIC}\n").as_bytes() {
            return Err(fmt_err(0, "missing ANNEALNET1 magic".into()));
        }
        let spec_end = bytes[magic_end..]
            .iter()
            .position(|&c| c == b'\n')
            .map(|p| magic_end + p)
            .ok_or_else(|| fmt_err(magic_end, "unterminated layer spec".into()))?;
        let spec = std::str::from_utf8(&bytes[magic_end..spec_end])
            .map_err(|e| fmt_err(magic_end, e.to_string()))?;
        let (input_shape, layers) = parse_spec_line(spec).map_err(|e| fmt_err(magic_end, e.to_string()))?;
        let mut net = Self::new(input_shape, layers, 0).map_err(|e| fmt_err(magic_end, e.to_string()))?;
        let body = &bytes[spec_end + 1..];
        if body.len() != net.parameter_count() * 8 {
            return Err(fmt_err(
                bytes.len(),
                format!("{} parameter bytes, expected {}", body.len(), net.parameter_count() * 8),
            ));
        }
        let mut vals = body
            .chunks_exact(8)
            .map(|c| T::of(f64::from_le_bytes(c.try_into().expect("8 bytes"))));
        for t in &mut net.params {
            for v in t.data_mut() {
                *v = vals.next().expect("length checked");
            }
        }
        Ok(net)
    }
}

pub const CHECKPOINT_MAGIC: &str = "ANNEALNET1";

/// Inverse of [`Network::spec_line`].
pub fn parse_spec_line(line: &str) -> Result<(Vec<usize>, Vec<Layer>)> {
    let mut parts = line.split_whitespace();
    let input = parts
        .next()
        .and_then(|p| p.strip_prefix("input="))
        .ok_or_else(|| Error::Config("layer spec must start with input=".into()))?;
    let shape = input
        .split('x')
        .map(|d| d.parse().map_err(|_| Error::Config(format!("bad input shape `{input}`"))))
        .collect::<Result<Vec<usize>>>()?;
    let layers = parts.map(str::parse).collect::<Result<Vec<Layer>>>()?;
    Ok((shape, layers))
}

fn two_mut<T: Scalar>(params: &mut [Tensor<T>], p: usize) -> (&mut Tensor<T>, &mut Tensor<T>) {
    let (a, b) = params.split_at_mut(p + 1);
    (&mut a[p], &mut b[0])
}

/// Index within a channel plane of the first maximum of a pooling window.
#[inline]
fn pool_argmax<T: Scalar>(plane: &[T], width: usize, size: usize, r: usize, c: usize) -> usize {
    let mut best = (r * size) * width + c * size;
    for a in 0..size {
        for b in 0..size {
            let idx = (r * size + a) * width + c * size + b;
            if plane[idx] > plane[best] {
                best = idx;
            }
        }
    }
    best
}

#[inline]
pub fn sigmoid<T: Scalar>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// Mean softmax cross-entropy over the batch and its gradient w.r.t. the logits.
pub fn softmax_cross_entropy<T: Scalar>(logits: &Tensor<T>, labels: &[usize]) -> Result<(T, Tensor<T>)> {
    let b = logits.batch();
    if labels.len() != b || b == 0 {
        return Err(Error::LengthMismatch {
            what: "labels",
            expected: b,
            got: labels.len(),
        });
    }
    let k = logits.len() / b;
    let inv_b = T::one() / T::of(b as f64);
    let mut grad = Vec::with_capacity(logits.len());
    let mut loss = T::zero();
    for (s, &y) in labels.iter().enumerate() {
        if y >= k {
            return Err(Error::UnknownLabel { label: y, k });
        }
        let z = logits.sample(s);
        let mx = z.iter().copied().fold(T::neg_infinity(), T::max);
        let sum: T = z.iter().map(|&v| (v - mx).exp()).sum();
        loss += (sum.ln() + mx - z[y]) * inv_b;
        for (j, &v) in z.iter().enumerate() {
            let p = (v - mx).exp() / sum;
            let t = if j == y { T::one() } else { T::zero() };
            grad.push((p - t) * inv_b);
        }
    }
    Ok((loss, Tensor::new(logits.shape().to_vec(), grad)?))
}

/// Index of the largest entry of each sample; ties go to the lowest index.
pub fn argmax_rows<T: Scalar>(outputs: &Tensor<T>) -> Vec<usize> {
    (0..outputs.batch())
        .map(|s| {
            let row = outputs.sample(s);
            let mut best = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd { lr: f64, momentum: f64 },
    Adam { lr: f64, beta1: f64, beta2: f64, eps: f64 },
}

impl Default for OptimizerKind {
    fn default() -> Self {
        OptimizerKind::Adam {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl OptimizerKind {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidOptimizer(m));
        match *self {
            OptimizerKind::Sgd { lr, momentum } => {
                if !(lr > 0.0 && lr.is_finite()) {
                    return bad(format!("lr {lr} must be positive"));
                }
                if !(0.0..1.0).contains(&momentum) {
                    return bad(format!("momentum {momentum} outside [0, 1)"));
                }
            }
            OptimizerKind::Adam { lr, beta1, beta2, eps } => {
                if !(lr > 0.0 && lr.is_finite()) {
                    return bad(format!("lr {lr} must be positive"));
                }
                for (n, b) in [("beta1", beta1), ("beta2", beta2)] {
                    if !(b > 0.0 && b < 1.0) {
                        return bad(format!("{n} {b} outside (0, 1)"));
                    }
                }
                if !(eps > 0.0) {
                    return bad(format!("eps {eps} must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn lr(&self) -> f64 {
        match *self {
            OptimizerKind::Sgd { lr, .. } | OptimizerKind::Adam { lr, .. } => lr,
        }
    }
}

/// Stateful SGD (with momentum) or Adam.
#[derive(Clone, Debug)]
pub struct Optimizer<T: Scalar> {
    kind: OptimizerKind,
    t: u64,
    first: Vec<Vec<T>>,
    second: Vec<Vec<T>>,
}

impl<T: Scalar> Optimizer<T> {
    pub fn new(kind: OptimizerKind) -> Result<Self> {
        kind.validate()?;
        Ok(Self {
            kind,
            t: 0,
            first: Vec::new(),
            second: Vec::new(),
        })
    }

    pub fn sgd(lr: f64, momentum: f64) -> Result<Self> {
        Self::new(OptimizerKind::Sgd { lr, momentum })
    }

    pub fn adam(lr: f64) -> Result<Self> {
        Self::new(OptimizerKind::Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        })
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    /// Updates every tensor from its gradient buffer. Nothing is modified
    /// when any gradient is non-finite.
    pub fn step(&mut self, params: &mut [Tensor<T>], names: &[String]) -> Result<()> {
        for (pi, p) in params.iter().enumerate() {
            let g = p.grad().ok_or_else(|| Error::Shape("parameter without gradient buffer".into()))?;
            if let Some(j) = g.iter().position(|v| !v.is_finite()) {
                let name = names.get(pi).cloned().unwrap_or_else(|| format!("param{pi}"));
                return Err(Error::NonFiniteGradient(format!("{name}[{j}]")));
            }
        }
        if self.first.len() != params.len() {
            self.first = params.iter().map(|p| vec![T::zero(); p.len()]).collect();
            self.second = params.iter().map(|p| vec![T::zero(); p.len()]).collect();
        }
        self.t += 1;
        match self.kind {
            OptimizerKind::Sgd { lr, momentum } => {
                let (lr, mu) = (T::of(lr), T::of(momentum));
                for (p, vel) in params.iter_mut().zip(&mut self.first) {
                    let g = p.grad.take().expect("checked");
                    for ((x, v), &gi) in p.data.iter_mut().zip(vel.iter_mut()).zip(&g) {
                        *v = mu * *v + gi;
                        *x -= lr * *v;
                    }
                    p.grad = Some(g);
                }
            }
            OptimizerKind::Adam { lr, beta1, beta2, eps } => {
                let c1 = T::of(1.0 - beta1.powi(self.t as i32));
                let c2 = T::of(1.0 - beta2.powi(self.t as i32));
                let (lr, b1, b2, eps) = (T::of(lr), T::of(beta1), T::of(beta2), T::of(eps));
                for ((p, m), v) in params.iter_mut().zip(&mut self.first).zip(&mut self.second) {
                    let g = p.grad.take().expect("checked");
                    for (j, &gi) in g.iter().enumerate() {
                        m[j] = b1 * m[j] + (T::one() - b1) * gi;
                        v[j] = b2 * v[j] + (T::one() - b2) * gi * gi;
                        let mh = m[j] / c1;
                        let vh = v[j] / c2;
                        p.data[j] -= lr * mh / (vh.sqrt() + eps);
                    }
                    p.grad = Some(g);
                }
            }
        }
        Ok(())
    }

    /// [`Optimizer::step`] over a network's parameters.
    pub fn step_network(&mut self, net: &mut Network<T>) -> Result<()> {
        let names = net.names.clone();
        self.step(&mut net.params, &names)
    }
}
