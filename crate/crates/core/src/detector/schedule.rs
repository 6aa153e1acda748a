use super::model::{fit, DetectorModel, TrainConfig};
use crate::annotator::LabeledSentence;
use crate::commonsense::by_score_desc;
use crate::lexicon::PairLabel;
use crate::manifest::{hash_records, DatasetManifest};
use crate::util::floor_count;
use crate::Result;

use super::classifier::Detector;

/// Distant items admitted at `epoch`: `⌊min(1, (epoch − 1)·β) · total⌋`.
pub fn anneal_count(epoch: usize, beta: f64, total: usize) -> usize {
    let share = (epoch.saturating_sub(1) as f64 * beta).min(1.0);
    floor_count(share, total)
}

/// Trains on gold data, admitting the relabeled distant data in order of
/// [`anneal_count`]. `d_rr` is expected highest-confidence first.
pub fn train_annealed(gold: &[LabeledSentence], d_rr: &[LabeledSentence], config: &TrainConfig) -> Result<DetectorModel> {
    train_annealed_with_dev(gold, d_rr, None, config)
}

pub fn train_annealed_with_dev(
    gold: &[LabeledSentence],
    d_rr: &[LabeledSentence],
    dev: Option<&[LabeledSentence]>,
    config: &TrainConfig,
) -> Result<DetectorModel> {
    let total = d_rr.len();
    let beta = config.beta;
    fit(gold, d_rr, &|epoch| anneal_count(epoch, beta, total), dev, config)
}

/// Relabeled distant data, highest cs score first.
#[derive(Debug, Clone)]
pub struct RelabeledDataset {
    pub instances: Vec<LabeledSentence>,
    pub manifest: DatasetManifest,
}

/// Keeps the instances the detector scores at or above `threshold`, labeled
/// causal.
pub fn relabel(detector: &dyn Detector, d_r: &[LabeledSentence], threshold: f64) -> Result<RelabeledDataset> {
    let mut kept: Vec<LabeledSentence> = d_r
        .iter()
        .filter(|x| detector.predict(x) >= threshold)
        .cloned()
        .map(|mut x| {
            x.pair.label = PairLabel::Causal;
            x
        })
        .collect();
    let dropped = d_r.len() - kept.len();
    kept.sort_by(by_score_desc);
    let manifest = DatasetManifest::new("relabel")
        .input("dr", hash_records(d_r)?)
        .output("drr.jsonl", hash_records(&kept)?)
        .count("kept", kept.len())
        .count("dropped", dropped);
    Ok(RelabeledDataset { instances: kept, manifest })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_epoch_admits_nothing() {
        for beta in [0.05, 0.1, 0.5, 1.0] {
            assert_eq!(anneal_count(1, beta, 1000), 0);
        }
    }

    #[test]
    fn linear_ramp() {
        assert_eq!(anneal_count(3, 0.1, 100), 20);
        let seq: Vec<_> = (1..=5).map(|e| anneal_count(e, 0.1, 50)).collect();
        assert_eq!(seq, [0, 5, 10, 15, 20]);
        assert_eq!(anneal_count(11, 0.1, 37), 37);
        assert_eq!(anneal_count(40, 0.1, 37), 37);
    }
}
