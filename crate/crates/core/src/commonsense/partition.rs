use std::cmp::Ordering;

use crate::annotator::{sort_canonical, LabeledSentence};
use crate::manifest::{hash_records, DatasetManifest};
use crate::util::{ceil_count, check_fraction};
use crate::Result;

/// Retention fractions for the connective and no-connective partitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeepFractions {
    pub with_connective: f64,
    pub without_connective: f64,
}

impl Default for KeepFractions {
    fn default() -> Self {
        KeepFractions {
            with_connective: 0.5,
            without_connective: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RefinedDataset {
    /// Kept instances in canonical order.
    pub instances: Vec<LabeledSentence>,
    pub manifest: DatasetManifest,
}

/// Descending score, then canonical order.
pub fn by_score_desc(a: &LabeledSentence, b: &LabeledSentence) -> Ordering {
    let sa = a.cs_score.unwrap_or(f64::NEG_INFINITY);
    let sb = b.cs_score.unwrap_or(f64::NEG_INFINITY);
    sb.partial_cmp(&sa)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.canonical_cmp(b))
}

fn keep_top(mut part: Vec<LabeledSentence>, fraction: f64) -> (Vec<LabeledSentence>, usize) {
    part.sort_by(by_score_desc);
    let k = ceil_count(fraction, part.len());
    let dropped = part.len() - k;
    part.truncate(k);
    (part, dropped)
}

/// Splits scored instances by connective presence and keeps the top-scoring
/// fraction of each partition.
pub fn partition_and_keep(scored: Vec<LabeledSentence>, keep: KeepFractions) -> Result<RefinedDataset> {
    check_fraction("keep fraction (connective)", keep.with_connective)?;
    check_fraction("keep fraction (no connective)", keep.without_connective)?;
    let (with, without): (Vec<_>, Vec<_>) = scored.into_iter().partition(|s| s.connective.is_some());
    let (n_c, n_nc) = (with.len(), without.len());
    let (kept_c, dropped_c) = keep_top(with, keep.with_connective);
    let (kept_nc, dropped_nc) = keep_top(without, keep.without_connective);
    let (k_c, k_nc) = (kept_c.len(), kept_nc.len());

    let mut instances = kept_c;
    instances.extend(kept_nc);
    sort_canonical(&mut instances);
    let manifest = DatasetManifest::new("filter")
        .output("dr.jsonl", hash_records(&instances)?)
        .count("connective_in", n_c)
        .count("connective_kept", k_c)
        .count("connective_dropped", dropped_c)
        .count("plain_in", n_nc)
        .count("plain_kept", k_nc)
        .count("plain_dropped", dropped_nc)
        .count("instances", instances.len());
    Ok(RefinedDataset { instances, manifest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotator::SentenceRecord;
    use crate::lexicon::{EventPair, Lemma, PairLabel};

    fn inst(id: u64, score: f64, connective: bool) -> LabeledSentence {
        let lemmas: Vec<Lemma> = ["a", "b"].iter().map(|s| Lemma::new(s).unwrap()).collect();
        let s = SentenceRecord {
            doc_id: "d".into(),
            sent_id: id,
            text: "a b".into(),
            tokens: vec!["a".into(), "b".into()],
            lemmas,
        };
        let mut x = LabeledSentence::new(s, 0, 1, EventPair::gold("a", "b", PairLabel::Causal).unwrap());
        x.cs_score = Some(score);
        x.connective = connective.then(|| "because".to_string());
        x
    }

    fn scores(v: &[LabeledSentence]) -> Vec<f64> {
        let mut s: Vec<f64> = v.iter().map(|x| x.cs_score.unwrap()).collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    }

    #[test]
    fn keeps_top_half_with_connective() {
        let data: Vec<_> = [3.0, 2.0, 1.0, 0.5].iter().enumerate().map(|(i, s)| inst(i as u64, *s, true)).collect();
        let out = partition_and_keep(data, KeepFractions::default()).unwrap();
        assert_eq!(scores(&out.instances), [3.0, 2.0]);
    }

    #[test]
    fn keeps_one_of_ten_without_connective() {
        let data: Vec<_> = (0..10).map(|i| inst(i, i as f64 * 0.1, false)).collect();
        let out = partition_and_keep(data, KeepFractions::default()).unwrap();
        assert_eq!(out.instances.len(), 1);
        assert!((out.instances[0].cs_score.unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn empty_input() {
        let out = partition_and_keep(Vec::new(), KeepFractions::default()).unwrap();
        assert!(out.instances.is_empty());
        assert_eq!(out.manifest.counts["instances"], 0);
    }

    #[test]
    fn ties_resolve_canonically() {
        let data: Vec<_> = (0..4).rev().map(|i| inst(i, 1.0, true)).collect();
        let out = partition_and_keep(data, KeepFractions::default()).unwrap();
        let ids: Vec<u64> = out.instances.iter().map(|x| x.sentence.sent_id).collect();
        assert_eq!(ids, [0, 1]);
    }
}
