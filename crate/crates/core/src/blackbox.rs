//! The classifier being explained: a one-hidden-layer network over one-hot
//! encoded categorical features, trained with mini-batch SGD on softmax
//! cross-entropy.
//!
//! Checkpoints are JSON (see [`Checkpoint`]):
//!
//! ```text
//! {
//!   "format": "pride-blackbox", "version": 1,
//!   "config":   { hidden_units, learning_rate, momentum, epochs, batch_size, seed },
//!   "encoding": { "features": [{ "name", "domain" }...], "target": { "name", "domain" } },
//!   "hidden":   { "weights": [hidden_units][n_inputs], "bias": [hidden_units] },
//!   "output":   { "weights": [n_classes][hidden_units], "bias": [n_classes] },
//!   "train_accuracy": f64, "final_loss": f64
//! }
//! ```
//!
//! Inputs are laid out feature by feature, one slot per domain value in
//! domain order; output classes are the target domain values in order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mvl::{Schema, State, Transition, Variable};

pub const CHECKPOINT_FORMAT: &str = "pride-blackbox";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("expected exactly one target variable, schema has {0}")]
    TargetCount(usize),
    #[error("invalid model configuration: {0}")]
    Config(String),
    #[error("training diverged at epoch {epoch}, batch {batch}: loss = {loss}")]
    Diverged { epoch: usize, batch: usize, loss: f64 },
    #[error("state does not fit the model encoding: {0}")]
    Encoding(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { hidden_units: 32, learning_rate: 0.2, momentum: 0.9, epochs: 200, batch_size: 32, seed: 0 }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.hidden_units == 0 || self.batch_size == 0 {
            return Err(ModelError::Config("hidden_units and batch_size must be positive".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(ModelError::Config(format!("learning_rate {} must be positive", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(ModelError::Config(format!("momentum {} outside [0, 1)", self.momentum)));
        }
        Ok(())
    }
}

/// One-hot layout of the features and the class list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    pub features: Vec<Variable>,
    pub target: Variable,
}

impl Encoding {
    pub fn from_schema(schema: &Schema) -> Result<Self, ModelError> {
        match schema.targets() {
            [t] => Ok(Encoding { features: schema.features().to_vec(), target: t.clone() }),
            ts => Err(ModelError::TargetCount(ts.len())),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.features.iter().map(|v| v.domain.len()).sum()
    }

    pub fn n_classes(&self) -> usize {
        self.target.domain.len()
    }

    /// Indices of the active one-hot inputs.
    pub fn encode(&self, state: &State) -> Result<Vec<usize>, ModelError> {
        if state.len() != self.features.len() {
            return Err(ModelError::Encoding(format!(
                "{} values for {} features",
                state.len(),
                self.features.len()
            )));
        }
        let mut offset = 0;
        let mut active = Vec::with_capacity(state.len());
        for (v, &value) in self.features.iter().zip(state.values()) {
            let pos = v
                .domain
                .binary_search(&value)
                .map_err(|_| ModelError::Encoding(format!("value {value} not in domain of `{}`", v.name)))?;
            active.push(offset + pos);
            offset += v.domain.len();
        }
        Ok(active)
    }

    pub fn class_of(&self, value: u32) -> Result<usize, ModelError> {
        self.target
            .domain
            .binary_search(&value)
            .map_err(|_| ModelError::Encoding(format!("label {value} not in domain of `{}`", self.target.name)))
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Numerically stable softmax, in place.
pub fn softmax(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// Network parameters in one flat buffer: hidden weights (row-major,
/// `hidden × inputs`), hidden bias, output weights (`classes × hidden`),
/// output bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub n_inputs: usize,
    pub hidden: usize,
    pub classes: usize,
    pub params: Vec<f64>,
}

/// A training example: active one-hot inputs and the class index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub active: Vec<usize>,
    pub class: usize,
}

impl Network {
    pub fn zeros(n_inputs: usize, hidden: usize, classes: usize) -> Self {
        let len = hidden * n_inputs + hidden + classes * hidden + classes;
        Network { n_inputs, hidden, classes, params: vec![0.0; len] }
    }

    /// Xavier-uniform weights, zero biases.
    pub fn init(n_inputs: usize, hidden: usize, classes: usize, rng: &mut impl Rng) -> Self {
        let mut net = Network::zeros(n_inputs, hidden, classes);
        let l1 = (6.0 / (n_inputs + hidden) as f64).sqrt();
        let l2 = (6.0 / (hidden + classes) as f64).sqrt();
        let (w1, w2) = (net.w1_range(), net.w2_range());
        for p in &mut net.params[w1] {
            *p = rng.random_range(-l1..l1);
        }
        for p in &mut net.params[w2] {
            *p = rng.random_range(-l2..l2);
        }
        net
    }

    fn w1_range(&self) -> std::ops::Range<usize> {
        0..self.hidden * self.n_inputs
    }

    fn b1_range(&self) -> std::ops::Range<usize> {
        let s = self.hidden * self.n_inputs;
        s..s + self.hidden
    }

    fn w2_range(&self) -> std::ops::Range<usize> {
        let s = self.b1_range().end;
        s..s + self.classes * self.hidden
    }

    fn b2_range(&self) -> std::ops::Range<usize> {
        let s = self.w2_range().end;
        s..s + self.classes
    }

    /// Hidden activations and class probabilities.
    pub fn forward(&self, active: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let w1 = &self.params[self.w1_range()];
        let b1 = &self.params[self.b1_range()];
        let w2 = &self.params[self.w2_range()];
        let b2 = &self.params[self.b2_range()];
        let h: Vec<f64> = (0..self.hidden)
            .map(|j| {
                let row = &w1[j * self.n_inputs..(j + 1) * self.n_inputs];
                sigmoid(b1[j] + active.iter().map(|&a| row[a]).sum::<f64>())
            })
            .collect();
        let mut z: Vec<f64> = (0..self.classes)
            .map(|k| b2[k] + w2[k * self.hidden..(k + 1) * self.hidden].iter().zip(&h).map(|(w, h)| w * h).sum::<f64>())
            .collect();
        softmax(&mut z);
        (h, z)
    }

    /// Mean cross-entropy over `batch`.
    pub fn loss(&self, batch: &[Example]) -> f64 {
        batch.iter().map(|ex| -self.forward(&ex.active).1[ex.class].max(f64::MIN_POSITIVE).ln()).sum::<f64>()
            / batch.len() as f64
    }

    /// Mean cross-entropy over `batch` and its gradient w.r.t. `params`.
    pub fn loss_and_gradient(&self, batch: &[Example]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let (w1r, b1r, w2r, b2r) = (self.w1_range(), self.b1_range(), self.w2_range(), self.b2_range());
        let w2 = &self.params[w2r.clone()];
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        let mut dh = vec![0.0; self.hidden];
        for ex in batch {
            let (h, p) = self.forward(&ex.active);
            loss -= p[ex.class].max(f64::MIN_POSITIVE).ln();
            dh.iter_mut().for_each(|d| *d = 0.0);
            for k in 0..self.classes {
                let dz = (p[k] - if k == ex.class { 1.0 } else { 0.0 }) * scale;
                grad[b2r.start + k] += dz;
                let row = k * self.hidden;
                for j in 0..self.hidden {
                    grad[w2r.start + row + j] += dz * h[j];
                    dh[j] += dz * w2[row + j];
                }
            }
            for j in 0..self.hidden {
                let dpre = dh[j] * h[j] * (1.0 - h[j]);
                grad[b1r.start + j] += dpre;
                for &a in &ex.active {
                    grad[w1r.start + j * self.n_inputs + a] += dpre;
                }
            }
        }
        (loss * scale, grad)
    }

    /// Index of the most probable class; ties go to the lower index.
    pub fn predict_class(&self, active: &[usize]) -> usize {
        let (_, p) = self.forward(active);
        p.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best })
            .0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub config: ModelConfig,
    pub encoding: Encoding,
    pub network: Network,
    pub train_accuracy: f64,
    pub final_loss: f64,
}

fn examples(encoding: &Encoding, ts: &[Transition]) -> Result<Vec<Example>, ModelError> {
    ts.iter()
        .map(|t| {
            let label = t.targets.get(0).ok_or_else(|| ModelError::Encoding("empty target state".into()))?;
            Ok(Example { active: encoding.encode(&t.features)?, class: encoding.class_of(label)? })
        })
        .collect()
}

/// Trains on every transition of `ts` (feature state → its single target).
pub fn train(schema: &Schema, ts: &[Transition], cfg: &ModelConfig) -> Result<TrainedModel, ModelError> {
    cfg.validate()?;
    if ts.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    let encoding = Encoding::from_schema(schema)?;
    let data = examples(&encoding, ts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net = Network::init(encoding.n_inputs(), cfg.hidden_units, encoding.n_classes(), &mut rng);
    let mut velocity = vec![0.0; net.params.len()];
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut batch = Vec::with_capacity(cfg.batch_size);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for (b, chunk) in order.chunks(cfg.batch_size).enumerate() {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| data[i].clone()));
            let (loss, grad) = net.loss_and_gradient(&batch);
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(ModelError::Diverged { epoch, batch: b, loss });
            }
            for ((p, v), g) in net.params.iter_mut().zip(&mut velocity).zip(&grad) {
                *v = cfg.momentum * *v - cfg.learning_rate * g;
                *p += *v;
            }
        }
    }
    let final_loss = net.loss(&data);
    if !final_loss.is_finite() {
        return Err(ModelError::Diverged { epoch: cfg.epochs, batch: 0, loss: final_loss });
    }
    let correct = data.iter().filter(|ex| net.predict_class(&ex.active) == ex.class).count();
    Ok(TrainedModel {
        config: cfg.clone(),
        encoding,
        network: net,
        train_accuracy: correct as f64 / data.len() as f64,
        final_loss,
    })
}

impl TrainedModel {
    /// Predicted target value for a feature state.
    pub fn predict(&self, state: &State) -> Result<u32, ModelError> {
        let active = self.encoding.encode(state)?;
        Ok(self.encoding.target.domain[self.network.predict_class(&active)])
    }

    /// Share of `ts` whose label the model reproduces.
    pub fn accuracy(&self, ts: &[Transition]) -> Result<f64, ModelError> {
        let mut correct = 0;
        for t in ts {
            if Some(self.predict(&t.features)?) == t.targets.get(0) {
                correct += 1;
            }
        }
        Ok(correct as f64 / ts.len().max(1) as f64)
    }

    /// Schema with the model's features and target.
    pub fn schema(&self) -> Schema {
        Schema::new(self.encoding.features.clone(), vec![self.encoding.target.clone()])
            .expect("encoding variables come from a valid schema")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&Checkpoint::from(self)).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let c: Checkpoint = serde_json::from_str(text).map_err(|e| ModelError::Checkpoint(e.to_string()))?;
        c.try_into()
    }
}

/// The model's predictions over `states`: the dataset the explainer learns.
pub fn extract_transitions(model: &TrainedModel, states: &[State]) -> Result<Vec<Transition>, ModelError> {
    states
        .iter()
        .map(|s| Ok(Transition::new(s.clone(), vec![model.predict(s)?])))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

/// On-disk layout of a trained model.
#[derive(Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config: ModelConfig,
    pub encoding: Encoding,
    pub hidden: Layer,
    pub output: Layer,
    pub train_accuracy: f64,
    pub final_loss: f64,
}

impl From<&TrainedModel> for Checkpoint {
    fn from(m: &TrainedModel) -> Self {
        let n = &m.network;
        let rows = |range: std::ops::Range<usize>, width: usize| -> Vec<Vec<f64>> {
            n.params[range].chunks(width).map(<[f64]>::to_vec).collect()
        };
        Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            config: m.config.clone(),
            encoding: m.encoding.clone(),
            hidden: Layer { weights: rows(n.w1_range(), n.n_inputs), bias: n.params[n.b1_range()].to_vec() },
            output: Layer { weights: rows(n.w2_range(), n.hidden), bias: n.params[n.b2_range()].to_vec() },
            train_accuracy: m.train_accuracy,
            final_loss: m.final_loss,
        }
    }
}

impl TryFrom<Checkpoint> for TrainedModel {
    type Error = ModelError;

    fn try_from(c: Checkpoint) -> Result<Self, ModelError> {
        let bad = |msg: String| ModelError::Checkpoint(msg);
        if c.format != CHECKPOINT_FORMAT || c.version != CHECKPOINT_VERSION {
            return Err(bad(format!("unsupported checkpoint {} v{}", c.format, c.version)));
        }
        Schema::new(c.encoding.features.clone(), vec![c.encoding.target.clone()])
            .map_err(|e| bad(e.to_string()))?;
        let (inputs, hidden, classes) = (c.encoding.n_inputs(), c.hidden.bias.len(), c.encoding.n_classes());
        let shape_ok = c.hidden.weights.len() == hidden
            && c.hidden.weights.iter().all(|r| r.len() == inputs)
            && c.output.weights.len() == classes
            && c.output.bias.len() == classes
            && c.output.weights.iter().all(|r| r.len() == hidden);
        if !shape_ok || hidden == 0 {
            return Err(bad("layer shapes do not match the encoding".into()));
        }
        let mut params = Vec::new();
        params.extend(c.hidden.weights.into_iter().flatten());
        params.extend(c.hidden.bias);
        params.extend(c.output.weights.into_iter().flatten());
        params.extend(c.output.bias);
        Ok(TrainedModel {
            config: c.config,
            encoding: c.encoding,
            network: Network { n_inputs: inputs, hidden, classes, params },
            train_accuracy: c.train_accuracy,
            final_loss: c.final_loss,
        })
    }
}
