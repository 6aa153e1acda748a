use std::path::Path;

use super::model::{DetectorModel, TrainConfig};
use super::schedule::train_annealed_with_dev;
use crate::annotator::LabeledSentence;
use crate::{Error, Result};

/// A fitted causality classifier.
pub trait Detector: Send + Sync {
    /// Probability that the instance's pair is causal in its sentence.
    fn predict(&self, instance: &LabeledSentence) -> f64;

    fn save(&self, path: &Path) -> Result<()>;

    /// Stable content hash of the fitted parameters.
    fn digest(&self) -> Result<String>;
}

impl Detector for DetectorModel {
    fn predict(&self, instance: &LabeledSentence) -> f64 {
        DetectorModel::predict(self, instance)
    }

    fn save(&self, path: &Path) -> Result<()> {
        DetectorModel::save(self, path)
    }

    fn digest(&self) -> Result<String> {
        DetectorModel::digest(self)
    }
}

/// A classifier family that can be trained under the annealed schedule.
pub trait DetectorTrainer: Send + Sync {
    fn name(&self) -> &'static str;

    /// Trains on `gold` while admitting `distant` in order; with an empty
    /// `distant` this is plain supervised training.
    fn train(
        &self,
        gold: &[LabeledSentence],
        distant: &[LabeledSentence],
        dev: Option<&[LabeledSentence]>,
        config: &TrainConfig,
    ) -> Result<Box<dyn Detector>>;

    fn load(&self, path: &Path) -> Result<Box<dyn Detector>>;
}

/// Sparse-feature logistic regression.
#[derive(Debug, Default, Clone, Copy)]
pub struct LogisticTrainer;

impl DetectorTrainer for LogisticTrainer {
    fn name(&self) -> &'static str {
        "logistic"
    }

    fn train(
        &self,
        gold: &[LabeledSentence],
        distant: &[LabeledSentence],
        dev: Option<&[LabeledSentence]>,
        config: &TrainConfig,
    ) -> Result<Box<dyn Detector>> {
        Ok(Box::new(train_annealed_with_dev(gold, distant, dev, config)?))
    }

    fn load(&self, path: &Path) -> Result<Box<dyn Detector>> {
        Ok(Box::new(DetectorModel::load(path)?))
    }
}

pub const CLASSIFIERS: &[&str] = &["logistic"];

pub fn detector_trainer(name: &str) -> Result<Box<dyn DetectorTrainer>> {
    match name {
        "logistic" => Ok(Box::new(LogisticTrainer)),
        other => Err(Error::Config(format!(
            "unknown classifier {other:?}; expected one of {CLASSIFIERS:?}"
        ))),
    }
}
