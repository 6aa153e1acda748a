use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{quartile_edges, FeatureSpace, FeatureVector};
use crate::annotator::LabeledSentence;
use crate::util::{create_writer, open_reader};
use crate::manifest::sha256_hex;
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Registered classifier name.
    pub classifier: String,
    pub learning_rate: f64,
    pub l2_penalty: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Share of the distant data admitted per epoch.
    pub beta: f64,
    pub relabel_threshold: f64,
    pub hash_bits: u32,
    pub hash_seed: u64,
    /// Epochs without dev-F1 improvement before stopping; 0 disables.
    pub patience: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            classifier: "logistic".into(),
            learning_rate: 0.05,
            l2_penalty: 1e-4,
            epochs: 20,
            seed: 0,
            beta: 0.1,
            relabel_threshold: 0.5,
            hash_bits: 18,
            hash_seed: 0,
            patience: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if self.l2_penalty.is_nan() || self.l2_penalty < 0.0 || self.learning_rate * self.l2_penalty >= 1.0 {
            return bad("l2_penalty must be >= 0 with learning_rate * l2_penalty < 1".into());
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return bad(format!("beta must lie in (0, 1], got {}", self.beta));
        }
        if !(self.relabel_threshold > 0.0 && self.relabel_threshold < 1.0) {
            return bad(format!("relabel_threshold must lie in (0, 1), got {}", self.relabel_threshold));
        }
        if !(1..=26).contains(&self.hash_bits) {
            return bad(format!("hash_bits must lie in 1..=26, got {}", self.hash_bits));
        }
        Ok(())
    }
}

/// Logistic-regression causality classifier over hashed sparse features.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub space: FeatureSpace,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: u32,
    kind: String,
    hash_seed: u64,
    hash_bits: u32,
    cs_bucket_edges: Option<[f64; 3]>,
    bias: f64,
    weights: BTreeMap<u32, f64>,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl DetectorModel {
    pub fn zeros(space: FeatureSpace) -> Self {
        DetectorModel {
            weights: vec![0.0; space.dimension()],
            bias: 0.0,
            space,
        }
    }

    pub fn score(&self, x: &FeatureVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    /// Probability of the causal class, kept strictly inside (0, 1).
    pub fn predict_features(&self, x: &FeatureVector) -> f64 {
        sigmoid(self.score(x)).clamp(f64::EPSILON, 1.0 - f64::EPSILON)
    }

    pub fn predict(&self, instance: &LabeledSentence) -> f64 {
        self.predict_features(&self.space.featurize(instance))
    }

    fn to_file(&self) -> ModelFile {
        ModelFile {
            format: MODEL_FORMAT_VERSION,
            kind: "logistic".into(),
            hash_seed: self.space.hash_seed,
            hash_bits: self.space.hash_bits,
            cs_bucket_edges: self.space.cs_bucket_edges,
            bias: self.bias,
            weights: self
                .weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != 0.0)
                .map(|(i, w)| (i as u32, *w))
                .collect(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = create_writer(path)?;
        serde_json::to_writer(&mut w, &self.to_file())?;
        std::io::Write::flush(&mut w).map_err(|e| Error::io(path, e))
    }

    /// SHA-256 of the serialized model.
    pub fn digest(&self) -> Result<String> {
        Ok(sha256_hex(&serde_json::to_vec(&self.to_file())?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: ModelFile = serde_json::from_reader(open_reader(path)?)?;
        if file.format != MODEL_FORMAT_VERSION || file.kind != "logistic" {
            return Err(Error::Config(format!(
                "{}: unsupported model format {} ({})",
                path.display(),
                file.format,
                file.kind
            )));
        }
        let space = FeatureSpace {
            hash_seed: file.hash_seed,
            hash_bits: file.hash_bits,
            cs_bucket_edges: file.cs_bucket_edges,
        };
        let mut model = DetectorModel::zeros(space);
        model.bias = file.bias;
        for (id, w) in file.weights {
            let slot = model
                .weights
                .get_mut(id as usize)
                .ok_or_else(|| Error::Config(format!("feature id {id} out of range")))?;
            *slot = w;
        }
        Ok(model)
    }
}

/// `(1/n) Σ log(1 + exp(−y·z)) + (l2/2)·‖w‖²`, bias unpenalized.
pub fn objective(model: &DetectorModel, data: &[(FeatureVector, bool)], l2: f64) -> f64 {
    let n = data.len().max(1) as f64;
    let loss: f64 = data
        .iter()
        .map(|(x, y)| {
            let z = model.score(x);
            let m = if *y { z } else { -z };
            // log(1 + e^{-m}) without overflow
            if m > 0.0 {
                (-m).exp().ln_1p()
            } else {
                -m + m.exp().ln_1p()
            }
        })
        .sum();
    loss / n + 0.5 * l2 * model.weights.iter().map(|w| w * w).sum::<f64>()
}

/// Gradient of [`objective`] as (dense weight gradient, bias gradient).
pub fn gradient(model: &DetectorModel, data: &[(FeatureVector, bool)], l2: f64) -> (Vec<f64>, f64) {
    let n = data.len().max(1) as f64;
    let mut gw: Vec<f64> = model.weights.iter().map(|w| l2 * w).collect();
    let mut gb = 0.0;
    for (x, y) in data {
        let g = (sigmoid(model.score(x)) - if *y { 1.0 } else { 0.0 }) / n;
        for (id, v) in x.entries() {
            gw[*id as usize] += g * v;
        }
        gb += g;
    }
    (gw, gb)
}

/// Binary P/R/F1 on the causal class.
pub(crate) fn f1_of(model: &DetectorModel, dev: &[(FeatureVector, bool)]) -> f64 {
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (x, y) in dev {
        let pred = model.predict_features(x) >= 0.5;
        match (pred, *y) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            _ => {}
        }
    }
    if tp == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
    }
}

/// SGD on the regularized log-loss. The weight vector is kept as
/// `scale · raw` so the L2 shrink costs O(1) per step.
struct Sgd {
    raw: Vec<f64>,
    scale: f64,
    bias: f64,
}

impl Sgd {
    fn step(&mut self, x: &FeatureVector, y: bool, lr: f64, l2: f64) {
        let z = self.scale * x.dot(&self.raw) + self.bias;
        let g = sigmoid(z) - if y { 1.0 } else { 0.0 };
        self.scale *= 1.0 - lr * l2;
        if self.scale < 1e-9 {
            self.fold();
        }
        for (id, v) in x.entries() {
            self.raw[*id as usize] -= lr * g * v / self.scale;
        }
        self.bias -= lr * g;
    }

    fn fold(&mut self) {
        let s = self.scale;
        self.raw.iter_mut().for_each(|w| *w *= s);
        self.scale = 1.0;
    }

    fn weights(&self) -> Vec<f64> {
        self.raw.iter().map(|w| w * self.scale).collect()
    }
}

/// Shared training loop. Each epoch trains on all of `gold` plus the first
/// `admitted(epoch)` items of `extra` (epochs count from 1), shuffled with a
/// generator derived from the seed and the epoch.
pub(crate) fn fit(
    gold: &[LabeledSentence],
    extra: &[LabeledSentence],
    admitted: &dyn Fn(usize) -> usize,
    dev: Option<&[LabeledSentence]>,
    config: &TrainConfig,
) -> Result<DetectorModel> {
    config.validate()?;
    let max_extra = (1..=config.epochs).map(admitted).max().unwrap_or(0).min(extra.len());
    let used = || gold.iter().chain(&extra[..max_extra]);
    let positives = used().filter(|x| x.is_causal()).count();
    let total = gold.len() + max_extra;
    if positives == 0 || positives == total {
        return Err(Error::Training(format!(
            "training data needs both classes ({positives} causal of {total})"
        )));
    }
    let space = FeatureSpace {
        hash_seed: config.hash_seed,
        hash_bits: config.hash_bits,
        cs_bucket_edges: quartile_edges(gold),
    };
    let encode = |data: &[LabeledSentence]| -> Vec<(FeatureVector, bool)> {
        data.iter().map(|x| (space.featurize(x), x.is_causal())).collect()
    };
    let gold_x = encode(gold);
    let extra_x = encode(&extra[..max_extra]);
    let dev_x = dev.map(encode);

    let mut sgd = Sgd {
        raw: vec![0.0; space.dimension()],
        scale: 1.0,
        bias: 0.0,
    };
    let mut best: Option<(f64, DetectorModel)> = None;
    let mut stale = 0usize;
    for epoch in 1..=config.epochs {
        let k = admitted(epoch).min(max_extra);
        let mut order: Vec<usize> = (0..gold_x.len() + k).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(epoch as u64);
        order.shuffle(&mut rng);
        for i in order {
            let (x, y) = if i < gold_x.len() {
                &gold_x[i]
            } else {
                &extra_x[i - gold_x.len()]
            };
            sgd.step(x, *y, config.learning_rate, config.l2_penalty);
        }
        if let (Some(dev_x), true) = (&dev_x, config.patience > 0) {
            let model = DetectorModel {
                weights: sgd.weights(),
                bias: sgd.bias,
                space,
            };
            let f1 = f1_of(&model, dev_x);
            if best.as_ref().is_none_or(|(b, _)| f1 > *b) {
                best = Some((f1, model));
                stale = 0;
            } else {
                stale += 1;
                if stale >= config.patience {
                    log::debug!("early stop after epoch {epoch}");
                    break;
                }
            }
        }
    }
    if let Some((_, model)) = best {
        return Ok(model);
    }
    Ok(DetectorModel {
        weights: sgd.weights(),
        bias: sgd.bias,
        space,
    })
}

/// Trains on `data` alone.
pub fn train_plain(data: &[LabeledSentence], config: &TrainConfig) -> Result<DetectorModel> {
    fit(data, &[], &|_| 0, None, config)
}

pub fn predict(model: &DetectorModel, instance: &LabeledSentence) -> f64 {
    model.predict(instance)
}
