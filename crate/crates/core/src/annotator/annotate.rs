use std::collections::HashMap;

use super::sentence::{LabeledSentence, SentenceRecord};
use crate::lexicon::{EventPair, Lemma};

/// Known pairs indexed by cause lemma.
#[derive(Debug, Clone, Default)]
pub struct PairIndex {
    by_cause: HashMap<Lemma, Vec<EventPair>>,
    len: usize,
}

impl PairIndex {
    /// Builds the index; later duplicates of a (cause, effect) key are ignored.
    pub fn new<'a>(pairs: impl IntoIterator<Item = &'a EventPair>) -> Self {
        let mut index = PairIndex::default();
        for p in pairs {
            let bucket = index.by_cause.entry(p.cause.clone()).or_default();
            if bucket.iter().all(|q| q.effect != p.effect) {
                bucket.push(p.clone());
                index.len += 1;
            }
        }
        index
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn with_cause(&self, cause: &Lemma) -> &[EventPair] {
        self.by_cause.get(cause).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, cause: &Lemma, effect: &Lemma) -> bool {
        self.with_cause(cause).iter().any(|p| &p.effect == effect)
    }
}

/// One instance per known pair whose two lemmas occur at distinct positions,
/// anchored at the first occurrence of each lemma.
pub fn annotate(sentence: &SentenceRecord, pairs: &PairIndex) -> Vec<LabeledSentence> {
    let mut first: HashMap<&Lemma, usize> = HashMap::new();
    for (i, l) in sentence.lemmas.iter().enumerate() {
        first.entry(l).or_insert(i);
    }
    let mut causes: Vec<(&Lemma, usize)> = first.iter().map(|(l, i)| (*l, *i)).collect();
    causes.sort_by_key(|(_, i)| *i);

    let mut out = Vec::new();
    for (cause, ci) in causes {
        for pair in pairs.with_cause(cause) {
            if let Some(&ei) = first.get(&pair.effect) {
                if ei != ci {
                    out.push(LabeledSentence::new(sentence.clone(), ci, ei, pair.clone()));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotator::sentence::{Orientation, PairSource};
    use crate::lexicon::{PairLabel, Provenance};

    fn sentence(lemmas: &[&str]) -> SentenceRecord {
        SentenceRecord {
            doc_id: "d".into(),
            sent_id: 0,
            text: lemmas.join(" "),
            tokens: lemmas.iter().map(|s| s.to_string()).collect(),
            lemmas: lemmas.iter().map(|s| Lemma::new(s).unwrap()).collect(),
        }
    }

    fn pair(c: &str, e: &str) -> EventPair {
        EventPair::gold(c, e, PairLabel::Causal).unwrap()
    }

    #[test]
    fn cause_first_match() {
        let idx = PairIndex::new(&[pair("attack", "kill")]);
        let out = annotate(&sentence(&["police", "attack", "man", "kill"]), &idx);
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].cause_idx, out[0].effect_idx), (1, 3));
        assert_eq!(out[0].orientation, Orientation::CauseFirst);
        assert_eq!(out[0].pair_source, PairSource::Gold);
        out[0].validate().unwrap();
    }

    #[test]
    fn effect_first_match() {
        let idx = PairIndex::new(&[pair("attack", "kill")]);
        let out = annotate(&sentence(&["kill", "attack"]), &idx);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].orientation, Orientation::EffectFirst);
    }

    #[test]
    fn self_pair_needs_distinct_positions() {
        let idx = PairIndex::new(&[pair("attack", "attack")]);
        assert!(annotate(&sentence(&["the", "attack"]), &idx).is_empty());
        assert!(annotate(&sentence(&["attack", "and", "attack"]), &idx).is_empty());
    }

    #[test]
    fn repeats_anchor_first_occurrence_and_multiple_pairs() {
        let mut extracted = pair("storm", "flood");
        extracted.provenance = Provenance::Wordnet;
        let idx = PairIndex::new(&[pair("attack", "kill"), extracted]);
        let s = sentence(&["storm", "attack", "flood", "attack", "kill", "kill"]);
        let out = annotate(&s, &idx);
        assert_eq!(out.len(), 2);
        let atk = out.iter().find(|x| x.pair.cause.as_str() == "attack").unwrap();
        assert_eq!((atk.cause_idx, atk.effect_idx), (1, 4));
        let storm = out.iter().find(|x| x.pair.cause.as_str() == "storm").unwrap();
        assert_eq!(storm.pair_source, PairSource::Extracted);
    }

    #[test]
    fn index_dedups_keys() {
        let idx = PairIndex::new(&[pair("a", "b"), pair("a", "b"), pair("a", "c")]);
        assert_eq!(idx.len(), 2);
        assert!(idx.contains(&Lemma::new("a").unwrap(), &Lemma::new("c").unwrap()));
    }
}
