use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize_and_lemmatize, LemmaTable};
use crate::lexicon::{EventPair, Lemma, PairLabel, Provenance};
use crate::{Error, Result};

/// One line of corpus input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusLine {
    pub doc_id: String,
    pub sent_id: u64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub doc_id: String,
    pub sent_id: u64,
    pub text: String,
    pub tokens: Vec<String>,
    pub lemmas: Vec<Lemma>,
}

impl SentenceRecord {
    /// Tokenizes `line`; `None` when nothing is left after tokenization.
    pub fn from_line(line: CorpusLine, table: &LemmaTable) -> Option<Self> {
        let (tokens, lemmas) = tokenize_and_lemmatize(&line.text, table);
        if tokens.is_empty() {
            return None;
        }
        Some(SentenceRecord {
            doc_id: line.doc_id,
            sent_id: line.sent_id,
            text: line.text,
            tokens,
            lemmas,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSource {
    Gold,
    Extracted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    CauseFirst,
    EffectFirst,
}

/// A sentence with two marked event tokens and the pair they instantiate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub sentence: SentenceRecord,
    pub cause_idx: usize,
    pub effect_idx: usize,
    pub pair: EventPair,
    pub pair_source: PairSource,
    pub orientation: Orientation,
    #[serde(default)]
    pub connective: Option<String>,
    #[serde(default)]
    pub cs_score: Option<f64>,
}

impl LabeledSentence {
    pub fn new(sentence: SentenceRecord, cause_idx: usize, effect_idx: usize, pair: EventPair) -> Self {
        let pair_source = if pair.provenance == Provenance::Gold {
            PairSource::Gold
        } else {
            PairSource::Extracted
        };
        let orientation = if cause_idx < effect_idx {
            Orientation::CauseFirst
        } else {
            Orientation::EffectFirst
        };
        LabeledSentence {
            sentence,
            cause_idx,
            effect_idx,
            pair,
            pair_source,
            orientation,
            connective: None,
            cs_score: None,
        }
    }

    pub fn is_causal(&self) -> bool {
        self.pair.label.is_causal()
    }

    pub fn lemmas(&self) -> &[Lemma] {
        &self.sentence.lemmas
    }

    /// Index and lemma consistency.
    pub fn validate(&self) -> Result<()> {
        let n = self.sentence.len();
        let ok = self.cause_idx != self.effect_idx
            && self.cause_idx < n
            && self.effect_idx < n
            && self.sentence.lemmas.len() == n
            && self.sentence.lemmas[self.cause_idx] == self.pair.cause
            && self.sentence.lemmas[self.effect_idx] == self.pair.effect;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "inconsistent instance {}#{} ({}, {})",
                self.sentence.doc_id, self.sentence.sent_id, self.cause_idx, self.effect_idx
            )))
        }
    }

    /// Canonical dataset order: (doc_id, sent_id, cause, effect).
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        (&self.sentence.doc_id, self.sentence.sent_id, self.pair.key())
            .cmp(&(&other.sentence.doc_id, other.sentence.sent_id, other.pair.key()))
            .then_with(|| self.pair.cmp(&other.pair))
            .then_with(|| self.cause_idx.cmp(&other.cause_idx))
            .then_with(|| self.effect_idx.cmp(&other.effect_idx))
    }
}

pub fn sort_canonical(data: &mut [LabeledSentence]) {
    data.sort_by(LabeledSentence::canonical_cmp);
}

/// An annotated sentence: token indices of the two events and the gold label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSentence {
    pub doc_id: String,
    pub sent_id: u64,
    pub text: String,
    pub cause_idx: usize,
    pub effect_idx: usize,
    pub label: PairLabel,
}

impl GoldSentence {
    /// Tokenizes the text and builds the labeled instance. Indices refer to
    /// the tokens produced by [`super::tokenize`].
    pub fn to_labeled(&self, table: &LemmaTable) -> Result<LabeledSentence> {
        let line = CorpusLine {
            doc_id: self.doc_id.clone(),
            sent_id: self.sent_id,
            text: self.text.clone(),
        };
        let bad = || {
            Error::Config(format!(
                "gold sentence {}#{}: event indices ({}, {}) invalid",
                self.doc_id, self.sent_id, self.cause_idx, self.effect_idx
            ))
        };
        let sentence = SentenceRecord::from_line(line, table).ok_or_else(bad)?;
        if self.cause_idx == self.effect_idx
            || self.cause_idx >= sentence.len()
            || self.effect_idx >= sentence.len()
        {
            return Err(bad());
        }
        let pair = EventPair::new(
            sentence.lemmas[self.cause_idx].clone(),
            sentence.lemmas[self.effect_idx].clone(),
            Provenance::Gold,
            self.label,
        );
        Ok(LabeledSentence::new(sentence, self.cause_idx, self.effect_idx, pair))
    }
}
