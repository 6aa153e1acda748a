//! Event causality detector with relabeling and annealed training.
//!
//! The classifier sees an instance through hashed sparse features (event
//! lemmas, connective, orientation, token distance, cs-score quartile and
//! nearby lemmas). Distant data enters training gradually: epoch `e` admits
//! the first `⌊min(1, (e−1)·β)·|D|⌋` relabeled instances.

mod classifier;
mod features;
mod model;
mod schedule;

pub use classifier::{detector_trainer, Detector, DetectorTrainer, LogisticTrainer, CLASSIFIERS};
pub use features::{cs_bucket, distance_bucket, feature_names, quartile_edges, FeatureSpace, FeatureVector};
pub use model::{gradient, objective, predict, train_plain, DetectorModel, TrainConfig, MODEL_FORMAT_VERSION};
pub use schedule::{anneal_count, relabel, train_annealed, train_annealed_with_dev, RelabeledDataset};
