use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::augment::{pair_keys, run_chain, Resources};
use super::config::PipelineConfig;
use crate::annotator::LabeledSentence;
use crate::detector::Detector;
use crate::lexicon::{EventPair, Lemma};
use crate::manifest::DatasetManifest;
use crate::{Error, Result};

/// Probability at or above which an instance is predicted causal.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn add(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Precision, recall and F1 of the causal class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: Confusion,
    /// Per-fold reports when this one pools several folds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub folds: Vec<EvalReport>,
}

impl EvalReport {
    /// Metrics from counts. Undefined ratios are reported as 0.
    pub fn from_confusion(confusion: Confusion) -> Self {
        let Confusion { tp, fp, fn_, .. } = confusion;
        let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        EvalReport {
            precision,
            recall,
            f1,
            confusion,
            folds: Vec::new(),
        }
    }

    /// Pools the counts of `parts`, which become the per-fold breakdown.
    pub fn pooled(parts: Vec<EvalReport>) -> Self {
        let mut total = Confusion::default();
        for p in &parts {
            total.add(&p.confusion);
        }
        EvalReport {
            folds: parts,
            ..EvalReport::from_confusion(total)
        }
    }

    pub fn mean_fold_f1(&self) -> f64 {
        if self.folds.is_empty() {
            self.f1
        } else {
            self.folds.iter().map(|f| f.f1).sum::<f64>() / self.folds.len() as f64
        }
    }
}

pub fn evaluate(detector: &dyn Detector, test: &[LabeledSentence]) -> EvalReport {
    let mut c = Confusion::default();
    for x in test {
        match (detector.predict(x) >= DECISION_THRESHOLD, x.is_causal()) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    EvalReport::from_confusion(c)
}

/// One train/test split at document level.
#[derive(Debug, Clone)]
pub struct Fold {
    pub index: usize,
    pub test_docs: BTreeSet<String>,
    pub train: Vec<LabeledSentence>,
    pub test: Vec<LabeledSentence>,
}

/// Shuffles the distinct documents with `seed` and deals them round-robin
/// into `k` folds, so fold sizes differ by at most one document.
pub fn kfold_split(data: &[LabeledSentence], k: usize, seed: u64) -> Result<Vec<Fold>> {
    let docs: BTreeSet<&str> = data.iter().map(|x| x.sentence.doc_id.as_str()).collect();
    if k < 2 || k > docs.len() {
        return Err(Error::Config(format!(
            "cannot split {} documents into {k} folds",
            docs.len()
        )));
    }
    let mut docs: Vec<&str> = docs.into_iter().collect();
    docs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok((0..k)
        .map(|i| {
            let test_docs: BTreeSet<String> = docs
                .iter()
                .skip(i)
                .step_by(k)
                .map(|d| d.to_string())
                .collect();
            let (test, train) = data
                .iter()
                .cloned()
                .partition(|x| test_docs.contains(&x.sentence.doc_id));
            Fold {
                index: i,
                test_docs,
                train,
                test,
            }
        })
        .collect())
}

/// What one fold used and how it scored.
pub struct FoldOutcome {
    pub fold: usize,
    pub seed: u64,
    pub gold_pairs: BTreeSet<EventPair>,
    pub test_keys: BTreeSet<(Lemma, Lemma)>,
    pub report: EvalReport,
    pub manifests: Vec<DatasetManifest>,
}

pub struct CrossValidation {
    pub report: EvalReport,
    pub folds: Vec<FoldOutcome>,
}

/// Runs the full chain once per fold and repeat.
///
/// Repeat `r` uses seed `config.seed + r` for the split and every stage.
/// Pairs of test sentences never reach the training pair set of their fold.
pub fn cross_validate(
    res: &Resources,
    corpus: &[u8],
    config: &PipelineConfig,
    repeats: usize,
    workers: usize,
) -> Result<CrossValidation> {
    let mut reports = Vec::new();
    let mut outcomes = Vec::new();
    for r in 0..repeats.max(1) {
        let mut cfg = config.clone();
        cfg.set_seed(config.seed.wrapping_add(r as u64));
        for fold in kfold_split(&res.gold, cfg.eval.folds, cfg.seed)? {
            let Fold { index, mut train, mut test, .. } = fold;
            let test_keys = pair_keys(&test);
            let chain = run_chain(res, &mut train, &test_keys, corpus, &cfg, workers)?;
            chain.prepare(res, &cfg, &mut test);
            let report = evaluate(chain.detector.as_ref(), &test);
            log::info!(
                "seed {} fold {index}: P {:.3} R {:.3} F1 {:.3} ({} distant)",
                cfg.seed,
                report.precision,
                report.recall,
                report.f1,
                chain.d_rr.len()
            );
            reports.push(report.clone());
            outcomes.push(FoldOutcome {
                fold: index,
                seed: cfg.seed,
                gold_pairs: chain.gold_pairs,
                test_keys,
                report,
                manifests: chain.manifests,
            });
        }
    }
    Ok(CrossValidation {
        report: EvalReport::pooled(reports),
        folds: outcomes,
    })
}
