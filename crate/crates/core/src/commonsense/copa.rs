use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotator::{tokenize_and_lemmatize, LabeledSentence, LemmaTable};
use crate::lexicon::Lemma;
use crate::util::read_jsonl;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextSource {
    Copa,
    Annotated,
}

/// Cause-side and effect-side lemmas of one causal text pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausePairText {
    pub cause_tokens: Vec<Lemma>,
    pub effect_tokens: Vec<Lemma>,
    pub source: TextSource,
}

impl CausePairText {
    pub fn new(cause_tokens: Vec<Lemma>, effect_tokens: Vec<Lemma>, source: TextSource) -> Result<Self> {
        if cause_tokens.is_empty() || effect_tokens.is_empty() {
            return Err(Error::Config("cause and effect text must both be non-empty".into()));
        }
        Ok(CausePairText {
            cause_tokens,
            effect_tokens,
            source,
        })
    }
}

/// A choice-of-plausible-alternatives item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopaRecord {
    pub premise: String,
    pub alt1: String,
    pub alt2: String,
    pub correct: u8,
    pub asks_for: String,
}

pub fn load_copa(path: &Path) -> Result<Vec<CopaRecord>> {
    read_jsonl(path)
}

/// Turns each record into (cause text, effect text); the wrong alternative
/// is discarded.
///
/// When the question asks for a cause, the correct alternative is the cause
/// and the premise the effect; when it asks for an effect, the roles swap.
pub fn extract_copa_pairs(records: &[CopaRecord], table: &LemmaTable) -> Result<Vec<CausePairText>> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let bad = |m: String| Error::parse("copa", i + 1, m);
            let alt = match r.correct {
                1 => &r.alt1,
                2 => &r.alt2,
                other => return Err(bad(format!("correct must be 1 or 2, got {other}"))),
            };
            let (cause, effect) = match r.asks_for.as_str() {
                "cause" => (alt, &r.premise),
                "effect" => (&r.premise, alt),
                other => return Err(bad(format!("asks_for must be cause or effect, got {other:?}"))),
            };
            let lemmas = |text: &str| tokenize_and_lemmatize(text, table).1;
            CausePairText::new(lemmas(cause), lemmas(effect), TextSource::Copa)
                .map_err(|e| bad(e.to_string()))
        })
        .collect()
}

/// First token index of the second half when splitting between two events.
pub fn midpoint_boundary(a: usize, b: usize) -> usize {
    (a.min(b) + a.max(b)) / 2 + 1
}

/// Splits causal gold sentences between their events; the half holding the
/// cause event is the cause text.
pub fn extract_annotated_pairs(gold: &[LabeledSentence]) -> Vec<CausePairText> {
    gold.iter()
        .filter(|s| s.is_causal())
        .filter_map(|s| {
            let b = midpoint_boundary(s.cause_idx, s.effect_idx);
            let (left, right) = s.lemmas().split_at(b);
            let (cause, effect) = if s.cause_idx < b { (left, right) } else { (right, left) };
            CausePairText::new(cause.to_vec(), effect.to_vec(), TextSource::Annotated).ok()
        })
        .collect()
}
