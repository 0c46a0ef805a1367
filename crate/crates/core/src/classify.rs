//! Feedforward classifier over fingerprint features, trained with mini-batch
//! gradient descent and momentum, plus a nearest-centroid baseline.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qd::{Dataset, Sample};
use crate::rng::{derive_seed, seeded};

/// Hidden layer widths of the reference network.
pub const HIDDEN_LAYERS: [usize; 3] = [128, 64, 32];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: &mut Array2<f64>) {
        match self {
            Activation::Relu => z.mapv_inplace(|v| v.max(0.0)),
            Activation::Tanh => z.mapv_inplace(f64::tanh),
        }
    }

    /// Derivative expressed through the activation output `a`.
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

/// Dense network; layer `k` maps `layer_sizes[k]` inputs to
/// `layer_sizes[k + 1]` outputs with weights stored as `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct MLPModel {
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    pub seed: u64,
}

/// Gradients with the same shapes as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

fn check_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
        return Err(Error::Shape(format!("bad layer sizes {layer_sizes:?}")));
    }
    Ok(())
}

impl MLPModel {
    /// He-style uniform initialization: weights from `U(-√(6/fan_in), √(6/fan_in))`,
    /// zero biases.
    pub fn new(layer_sizes: &[usize], activation: Activation, seed: u64) -> Result<Self> {
        check_sizes(layer_sizes)?;
        let mut rng = seeded(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for w in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / fan_in as f64).sqrt();
            weights.push(Array2::from_shape_fn((fan_out, fan_in), |_| {
                rng.random_range(-limit..limit)
            }));
            biases.push(Array1::zeros(fan_out));
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            activation,
            weights,
            biases,
            seed,
        })
    }

    /// The reference architecture `inputs → 128 → 64 → 32 → classes`.
    pub fn reference(inputs: usize, classes: usize, seed: u64) -> Result<Self> {
        let mut sizes = vec![inputs];
        sizes.extend(HIDDEN_LAYERS);
        sizes.push(classes);
        Self::new(&sizes, Activation::Relu, seed)
    }

    pub fn zeros(layer_sizes: &[usize], activation: Activation) -> Result<Self> {
        check_sizes(layer_sizes)?;
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            activation,
            weights: layer_sizes
                .windows(2)
                .map(|w| Array2::zeros((w[1], w[0])))
                .collect(),
            biases: layer_sizes.windows(2).map(|w| Array1::zeros(w[1])).collect(),
            seed: 0,
        })
    }

    pub fn inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn classes(&self) -> usize {
        *self.layer_sizes.last().expect("at least two layers")
    }

    pub fn num_parameters(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Parameter `i` in the flat order: each layer's weights row-major, then
    /// its biases.
    pub fn parameter(&self, i: usize) -> f64 {
        let (layer, is_bias, j) = self.locate(i);
        if is_bias {
            self.biases[layer][j]
        } else {
            self.weights[layer].as_slice().expect("standard layout")[j]
        }
    }

    pub fn set_parameter(&mut self, i: usize, value: f64) {
        let (layer, is_bias, j) = self.locate(i);
        if is_bias {
            self.biases[layer][j] = value;
        } else {
            self.weights[layer].as_slice_mut().expect("standard layout")[j] = value;
        }
    }

    fn locate(&self, mut i: usize) -> (usize, bool, usize) {
        for (layer, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            if i < w.len() {
                return (layer, false, i);
            }
            i -= w.len();
            if i < b.len() {
                return (layer, true, i);
            }
            i -= b.len();
        }
        panic!("parameter index out of range")
    }

    fn check_input(&self, x: &ArrayView2<f64>) -> Result<()> {
        if x.ncols() != self.inputs() {
            return Err(Error::Shape(format!(
                "model takes {} features, got {}",
                self.inputs(),
                x.ncols()
            )));
        }
        Ok(())
    }

    /// Post-activation outputs of every layer, input first; the last entry
    /// holds raw logits.
    fn activations(&self, x: ArrayView2<f64>) -> Vec<Array2<f64>> {
        let mut acts = vec![x.to_owned()];
        let last = self.weights.len() - 1;
        for (k, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let mut z = acts[k].dot(&w.t()) + b;
            if k < last {
                self.activation.apply(&mut z);
            }
            acts.push(z);
        }
        acts
    }

    pub fn logits(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_input(&x)?;
        Ok(self.activations(x).pop().expect("output layer"))
    }

    /// Class probabilities for one feature vector.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let view = ArrayView2::from_shape((1, x.len()), x).map_err(|e| Error::Shape(e.to_string()))?;
        let mut z = self.logits(view)?;
        softmax_rows(&mut z);
        Ok(z.row(0).to_vec())
    }

    pub fn predict_batch(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        let z = self.logits(x)?;
        Ok(z.rows().into_iter().map(|r| argmax(r.as_slice().expect("row"))).collect())
    }

    /// Mean cross-entropy of `labels` and its gradient.
    pub fn loss_and_gradients(&self, x: ArrayView2<f64>, labels: &[usize]) -> Result<(f64, Gradients)> {
        self.check_input(&x)?;
        if x.nrows() != labels.len() || labels.is_empty() {
            return Err(Error::Shape(format!("{} rows for {} labels", x.nrows(), labels.len())));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= self.classes()) {
            return Err(Error::Shape(format!("label {bad} with {} classes", self.classes())));
        }
        let batch = labels.len() as f64;
        let mut acts = self.activations(x);
        let mut probs = acts.pop().expect("output layer");
        softmax_rows(&mut probs);
        let loss = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| -probs[[i, l]].max(f64::MIN_POSITIVE).ln())
            .sum::<f64>()
            / batch;

        let mut delta = probs;
        for (i, &l) in labels.iter().enumerate() {
            delta[[i, l]] -= 1.0;
        }
        delta /= batch;

        let layers = self.weights.len();
        let mut gw = Vec::with_capacity(layers);
        let mut gb = Vec::with_capacity(layers);
        for k in (0..layers).rev() {
            let input = &acts[k];
            gw.push(delta.t().dot(input));
            gb.push(delta.sum_axis(Axis(0)));
            if k > 0 {
                let mut back = delta.dot(&self.weights[k]);
                back.zip_mut_with(input, |d, &a| *d *= self.activation.derivative_from_output(a));
                delta = back;
            }
        }
        gw.reverse();
        gb.reverse();
        Ok((loss, Gradients { weights: gw, biases: gb }))
    }

    pub fn loss(&self, x: ArrayView2<f64>, labels: &[usize]) -> Result<f64> {
        self.loss_and_gradients(x, labels).map(|(l, _)| l)
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }
}

impl Gradients {
    pub fn get(&self, model: &MLPModel, i: usize) -> f64 {
        let (layer, is_bias, j) = model.locate(i);
        if is_bias {
            self.biases[layer][j]
        } else {
            self.weights[layer].as_slice().expect("standard layout")[j]
        }
    }
}

fn softmax_rows(z: &mut Array2<f64>) {
    for mut row in z.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row /= sum;
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Feature matrix and label vector for a list of samples.
pub fn to_arrays(samples: &[Sample]) -> Result<(Array2<f64>, Vec<usize>)> {
    let m = samples.first().map_or(0, |s| s.features.len());
    if samples.iter().any(|s| s.features.len() != m) {
        return Err(Error::Shape("samples have different feature lengths".into()));
    }
    let flat: Vec<f64> = samples.iter().flat_map(|s| s.features.iter().copied()).collect();
    let x = Array2::from_shape_vec((samples.len(), m), flat).map_err(|e| Error::Shape(e.to_string()))?;
    Ok((x, samples.iter().map(|s| s.label).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
    /// Share of each class that goes to training in [`stratified_split`].
    pub train_fraction: f64,
    pub hidden: Vec<usize>,
    pub activation: Activation,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 32,
            learning_rate: 0.01,
            momentum: 0.9,
            seed: 0,
            train_fraction: 0.8,
            hidden: HIDDEN_LAYERS.to_vec(),
            activation: Activation::Relu,
        }
    }
}

impl TrainConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Domain("epochs and batch size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Domain(format!("learning rate {}", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Domain(format!("momentum {} outside [0, 1)", self.momentum)));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Domain(format!(
                "train fraction {} outside (0, 1)",
                self.train_fraction
            )));
        }
        if self.hidden.contains(&0) {
            return Err(Error::Domain("hidden layers need at least one unit".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: MLPModel,
    /// Mean training loss per epoch.
    pub loss_trace: Vec<f64>,
}

/// Trains a fresh network on `samples`. Batches are drawn from a shuffle
/// seeded per epoch, so the result is a pure function of the inputs.
pub fn train(samples: &[Sample], classes: usize, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.check()?;
    if samples.is_empty() {
        return Err(Error::Domain("empty training set".into()));
    }
    let (x, y) = to_arrays(samples)?;
    let mut sizes = vec![x.ncols()];
    sizes.extend(&cfg.hidden);
    sizes.push(classes);
    let mut model = MLPModel::new(&sizes, cfg.activation, derive_seed(cfg.seed, 0))?;
    let mut vw: Vec<Array2<f64>> = model.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect();
    let mut vb: Vec<Array1<f64>> = model.biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect();
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut loss_trace = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.sort_unstable();
        order.shuffle(&mut seeded(derive_seed(cfg.seed, 1 + epoch as u64)));
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let xb = x.select(Axis(0), batch);
            let yb: Vec<usize> = batch.iter().map(|&i| y[i]).collect();
            let (loss, g) = model.loss_and_gradients(xb.view(), &yb)?;
            if !loss.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    detail: format!("loss {loss} after {} steps this epoch", total as usize),
                });
            }
            total += loss * batch.len() as f64;
            for k in 0..model.weights.len() {
                vw[k] *= cfg.momentum;
                vw[k].scaled_add(-cfg.learning_rate, &g.weights[k]);
                model.weights[k] += &vw[k];
                vb[k] *= cfg.momentum;
                vb[k].scaled_add(-cfg.learning_rate, &g.biases[k]);
                model.biases[k] += &vb[k];
            }
        }
        if !model.is_finite() {
            return Err(Error::Divergence {
                epoch,
                detail: "non-finite parameters".into(),
            });
        }
        loss_trace.push(total / samples.len() as f64);
    }
    model.seed = cfg.seed;
    Ok(TrainOutcome { model, loss_trace })
}

/// Splits each class separately, sending `fraction` of it (rounded) to the
/// first set.
pub fn stratified_split(samples: &[Sample], fraction: f64, seed: u64) -> Result<(Vec<Sample>, Vec<Sample>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Domain(format!("split fraction {fraction} outside (0, 1)")));
    }
    let classes = samples.iter().map(|s| s.label + 1).max().unwrap_or(0);
    let mut rng = seeded(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for c in 0..classes {
        let mut idx: Vec<usize> = (0..samples.len()).filter(|&i| samples[i].label == c).collect();
        idx.shuffle(&mut rng);
        let k = (idx.len() as f64 * fraction).round() as usize;
        train.extend(idx[..k].iter().map(|&i| samples[i].clone()));
        test.extend(idx[k..].iter().map(|&i| samples[i].clone()));
    }
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Accuracy of the last (or only) run.
    pub accuracy: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub classes: Vec<String>,
    pub run_count: usize,
    pub mean: f64,
    pub std: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub accuracies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl EvalReport {
    fn single(confusion: Vec<Vec<usize>>, classes: Vec<String>) -> Self {
        let total: usize = confusion.iter().flatten().sum();
        let correct: usize = (0..confusion.len()).map(|i| confusion[i][i]).sum();
        let accuracy = if total == 0 { 0.0 } else { correct as f64 / total as f64 };
        Self {
            accuracy,
            confusion,
            classes,
            run_count: 1,
            mean: accuracy,
            std: 0.0,
            accuracies: vec![accuracy],
            note: None,
        }
    }

    /// Samples per true class.
    pub fn support(&self) -> Vec<usize> {
        self.confusion.iter().map(|r| r.iter().sum()).collect()
    }
}

fn confusion_from(predicted: &[usize], labels: &[usize], classes: usize) -> Vec<Vec<usize>> {
    let mut c = vec![vec![0; classes]; classes];
    for (&p, &t) in predicted.iter().zip(labels) {
        c[t][p] += 1;
    }
    c
}

fn class_names(classes: usize, names: Option<&[String]>) -> Vec<String> {
    match names {
        Some(n) if n.len() == classes => n.to_vec(),
        _ => (0..classes).map(|c| c.to_string()).collect(),
    }
}

const EVAL_CHUNK: usize = 256;

pub fn evaluate(model: &MLPModel, samples: &[Sample], names: Option<&[String]>) -> Result<EvalReport> {
    let classes = model.classes();
    let (x, labels) = to_arrays(samples)?;
    if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
        return Err(Error::Shape(format!("label {bad} with {classes} classes")));
    }
    if samples.is_empty() {
        return Ok(EvalReport::single(confusion_from(&[], &[], classes), class_names(classes, names)));
    }
    let predicted = x
        .axis_chunks_iter(Axis(0), EVAL_CHUNK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|chunk| model.predict_batch(chunk))
        .collect::<Result<Vec<_>>>()?
        .concat();
    Ok(EvalReport::single(
        confusion_from(&predicted, &labels, classes),
        class_names(classes, names),
    ))
}

/// Classifies each test sample by the nearest class mean of `train`.
pub fn nearest_centroid(train: &[Sample], test: &[Sample], classes: usize, names: Option<&[String]>) -> Result<EvalReport> {
    let (x, y) = to_arrays(train)?;
    let m = x.ncols();
    let mut centroids = Array2::<f64>::zeros((classes, m));
    let mut counts = vec![0usize; classes];
    for (row, &l) in x.rows().into_iter().zip(&y) {
        if l >= classes {
            return Err(Error::Shape(format!("label {l} with {classes} classes")));
        }
        let mut c = centroids.row_mut(l);
        c += &row;
        counts[l] += 1;
    }
    if let Some(empty) = counts.iter().position(|&n| n == 0) {
        return Err(Error::Domain(format!("class {empty} has no training samples")));
    }
    for (mut c, &n) in centroids.rows_mut().into_iter().zip(&counts) {
        c /= n as f64;
    }
    let predicted: Vec<usize> = test
        .iter()
        .map(|s| {
            let d: Vec<f64> = centroids
                .rows()
                .into_iter()
                .map(|c| -c.iter().zip(&s.features).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                .collect();
            argmax(&d)
        })
        .collect();
    let labels: Vec<usize> = test.iter().map(|s| s.label).collect();
    Ok(EvalReport::single(
        confusion_from(&predicted, &labels, classes),
        class_names(classes, names),
    ))
}

/// One repeated train-and-test run next to the baseline on the same split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub mlp: f64,
    pub centroid: f64,
    pub final_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatReport {
    pub mlp: EvalReport,
    pub centroid: EvalReport,
    pub runs: Vec<RunRecord>,
}

impl RepeatReport {
    pub fn mlp_always_beats_centroid(&self) -> bool {
        self.runs.iter().all(|r| r.mlp > r.centroid)
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn aggregate(mut last: EvalReport, accuracies: Vec<f64>) -> EvalReport {
    let (mean, std) = mean_std(&accuracies);
    last.run_count = accuracies.len();
    last.mean = mean;
    last.std = std;
    last.accuracies = accuracies;
    last
}

/// Retrains `k` times on fresh stratified splits with derived seeds.
/// Runs go in parallel; each is single-threaded and seed-determined.
pub fn repeat_runs(k: usize, data: &Dataset, cfg: &TrainConfig) -> Result<RepeatReport> {
    if k == 0 {
        return Err(Error::Domain("need at least one run".into()));
    }
    cfg.check()?;
    let classes = data.num_classes();
    let names = &data.header.classes;
    let results = (0..k)
        .into_par_iter()
        .map(|run| -> Result<(RunRecord, EvalReport, EvalReport)> {
            let seed = derive_seed(cfg.seed, run as u64);
            let (train_set, test_set) = stratified_split(&data.samples, cfg.train_fraction, derive_seed(seed, 0))?;
            let run_cfg = cfg.clone().with_seed(derive_seed(seed, 1));
            let outcome = train(&train_set, classes, &run_cfg)?;
            let mlp = evaluate_serial(&outcome.model, &test_set, names)?;
            let centroid = nearest_centroid(&train_set, &test_set, classes, Some(names))?;
            let record = RunRecord {
                run,
                seed,
                mlp: mlp.accuracy,
                centroid: centroid.accuracy,
                final_loss: *outcome.loss_trace.last().expect("epochs > 0"),
            };
            Ok((record, mlp, centroid))
        })
        .collect::<Result<Vec<_>>>()?;
    let runs: Vec<RunRecord> = results.iter().map(|r| r.0.clone()).collect();
    let mlp_acc = runs.iter().map(|r| r.mlp).collect();
    let nc_acc = runs.iter().map(|r| r.centroid).collect();
    let (_, last_mlp, last_nc) = results.into_iter().last().expect("k > 0");
    let mut mlp = aggregate(last_mlp, mlp_acc);
    mlp.note = Some(format!(
        "{k} runs, train fraction {}, {} epochs, batch {}, lr {}, momentum {}",
        cfg.train_fraction, cfg.epochs, cfg.batch_size, cfg.learning_rate, cfg.momentum
    ));
    Ok(RepeatReport {
        mlp,
        centroid: aggregate(last_nc, nc_acc),
        runs,
    })
}

fn evaluate_serial(model: &MLPModel, samples: &[Sample], names: &[String]) -> Result<EvalReport> {
    let (x, labels) = to_arrays(samples)?;
    let predicted = model.predict_batch(x.view())?;
    Ok(EvalReport::single(
        confusion_from(&predicted, &labels, model.classes()),
        class_names(model.classes(), Some(names)),
    ))
}

/// Worst relative disagreement between analytic and central-difference
/// gradients over the given parameter indices.
pub fn gradient_check(model: &MLPModel, x: ArrayView2<f64>, labels: &[usize], params: &[usize], h: f64) -> Result<f64> {
    let (_, g) = model.loss_and_gradients(x, labels)?;
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for &i in params {
        let orig = model.parameter(i);
        probe.set_parameter(i, orig + h);
        let up = probe.loss(x, labels)?;
        probe.set_parameter(i, orig - h);
        let down = probe.loss(x, labels)?;
        probe.set_parameter(i, orig);
        let numeric = (up - down) / (2.0 * h);
        let analytic = g.get(model, i);
        let scale = analytic.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((analytic - numeric).abs() / scale);
    }
    Ok(worst)
}

/// `{"layer_sizes": [..], "activation": .., "weights": [[[..]]], "biases": [[..]], "seed": ..}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
    pub seed: u64,
}

impl From<&MLPModel> for ModelFile {
    fn from(m: &MLPModel) -> Self {
        Self {
            layer_sizes: m.layer_sizes.clone(),
            activation: m.activation,
            weights: m
                .weights
                .iter()
                .map(|w| w.rows().into_iter().map(|r| r.to_vec()).collect())
                .collect(),
            biases: m.biases.iter().map(|b| b.to_vec()).collect(),
            seed: m.seed,
        }
    }
}

impl TryFrom<ModelFile> for MLPModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        check_sizes(&f.layer_sizes)?;
        let layers = f.layer_sizes.len() - 1;
        if f.weights.len() != layers || f.biases.len() != layers {
            return Err(Error::Shape(format!("{layers} layers declared")));
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (k, (w, b)) in f.weights.into_iter().zip(f.biases).enumerate() {
            let (fan_in, fan_out) = (f.layer_sizes[k], f.layer_sizes[k + 1]);
            if w.len() != fan_out || w.iter().any(|r| r.len() != fan_in) || b.len() != fan_out {
                return Err(Error::Shape(format!("layer {k} is not {fan_out} × {fan_in}")));
            }
            let flat: Vec<f64> = w.into_iter().flatten().collect();
            weights.push(Array2::from_shape_vec((fan_out, fan_in), flat).map_err(|e| Error::Shape(e.to_string()))?);
            biases.push(Array1::from(b));
        }
        let model = MLPModel {
            layer_sizes: f.layer_sizes,
            activation: f.activation,
            weights,
            biases,
            seed: f.seed,
        };
        if !model.is_finite() {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(model)
    }
}

impl MLPModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelFile>(text)?.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn toy(n: usize, seed: u64) -> Vec<Sample> {
        // two blobs split by the line x0 + x1 = 1
        let mut rng = seeded(seed);
        (0..n)
            .map(|i| {
                let label = i % 2;
                let shift = if label == 0 { 0.2 } else { 0.8 };
                let features = vec![
                    shift + rng.random_range(-0.15..0.15),
                    shift + rng.random_range(-0.15..0.15),
                    rng.random_range(0.0..1.0),
                ];
                Sample { features, label }
            })
            .collect()
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = MLPModel::zeros(&[4, 8, 3], Activation::Relu).unwrap();
        let p = m.forward(&[0.3, -1.0, 2.0, 5.0]).unwrap();
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(m.forward(&[1.0]).is_err());
    }

    #[test]
    fn probabilities_sum_to_one() {
        let m = MLPModel::reference(6, 5, 3).unwrap();
        let mut rng = seeded(4);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..6).map(|_| rng.random_range(-5.0..5.0)).collect();
            let p = m.forward(&x).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let z = m.logits(ArrayView2::from_shape((1, 6), &x).unwrap()).unwrap();
            assert_eq!(argmax(&p), argmax(z.as_slice().unwrap()));
        }
    }

    #[test]
    fn separable_toy_is_learned() {
        let data = toy(200, 1);
        let cfg = TrainConfig {
            epochs: 50,
            seed: 9,
            ..Default::default()
        };
        let out = train(&data, 2, &cfg).unwrap();
        let r = evaluate(&out.model, &data, None).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert!(out.loss_trace.last().unwrap() < &out.loss_trace[0]);
        assert_eq!(r.support(), vec![100, 100]);

        let again = train(&data, 2, &cfg).unwrap();
        assert_eq!(again.model, out.model);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = seeded(17);
        let model = MLPModel::reference(6, 2, 5).unwrap();
        let data = toy(64, 2);
        let mut wide: Vec<Sample> = data
            .into_iter()
            .map(|mut s| {
                s.features.extend([0.1, 0.2, 0.3]);
                s
            })
            .collect();
        wide.truncate(16);
        let (x, y) = to_arrays(&wide).unwrap();
        let params: Vec<usize> = (0..50).map(|_| rng.random_range(0..model.num_parameters())).collect();
        let worst = gradient_check(&model, x.view(), &y, &params, 1e-5).unwrap();
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn divergence_is_reported() {
        let mut data = toy(40, 3);
        data[0].features[0] = 1e300;
        let cfg = TrainConfig {
            epochs: 5,
            learning_rate: 10.0,
            ..Default::default()
        };
        assert!(matches!(train(&data, 2, &cfg), Err(Error::Divergence { .. })));
    }

    #[test]
    fn centroid_baseline() {
        let one = vec![
            Sample { features: vec![0.2, 0.3], label: 0 },
            Sample { features: vec![1.0, 1.0], label: 1 },
        ];
        assert_eq!(nearest_centroid(&one, &one, 2, None).unwrap().accuracy, 1.0);
        assert!(nearest_centroid(&one[..1], &one, 2, None).is_err());
    }

    #[test]
    fn split_is_stratified() {
        let data = toy(100, 5);
        let (a, b) = stratified_split(&data, 0.8, 1).unwrap();
        assert_eq!(a.len(), 80);
        assert_eq!(b.len(), 20);
        assert_eq!(a.iter().filter(|s| s.label == 0).count(), 40);
    }

    #[test]
    fn model_file_round_trip() {
        let m = MLPModel::reference(6, 2, 8).unwrap();
        let back = MLPModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        let mut f = ModelFile::from(&m);
        f.biases[0].pop();
        assert!(MLPModel::try_from(f).is_err());
    }
}
