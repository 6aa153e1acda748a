use std::path::Path;

use crate::annotator::{tokenize_and_lemmatize, LabeledSentence, LemmaTable};
use crate::lexicon::Lemma;
use crate::util::{numbered_lines, open_reader};
use crate::{Error, Result};

/// Explicit causal connectives shipped with the crate.
pub const DEFAULT_CONNECTIVES: &[&str] = &[
    "because",
    "because of",
    "since",
    "as",
    "so",
    "therefore",
    "thus",
    "hence",
    "consequently",
    "as a result",
    "due to",
    "lead to",
    "leads to",
    "led to",
    "result in",
    "results in",
    "resulted in",
    "caused by",
    "owing to",
];

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    phrase: String,
    lemmas: Vec<Lemma>,
}

/// Connective phrases, lemmatized the same way as corpus text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectiveLexicon {
    // Longest first; equal lengths keep insertion order.
    entries: Vec<Entry>,
}

/// A connective occurrence covering tokens `start..end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectiveMatch {
    pub phrase: String,
    pub start: usize,
    pub end: usize,
}

impl ConnectiveLexicon {
    pub fn from_phrases<'a>(phrases: impl IntoIterator<Item = &'a str>, table: &LemmaTable) -> Result<Self> {
        let mut entries: Vec<Entry> = Vec::new();
        for phrase in phrases {
            let phrase = phrase.trim().to_lowercase();
            let (_, lemmas) = tokenize_and_lemmatize(&phrase, table);
            if lemmas.is_empty() {
                continue;
            }
            if entries.iter().any(|e| e.lemmas == lemmas) {
                continue;
            }
            entries.push(Entry { phrase, lemmas });
        }
        if entries.is_empty() {
            return Err(Error::Config("connective lexicon is empty".into()));
        }
        entries.sort_by_key(|e| std::cmp::Reverse(e.lemmas.len()));
        Ok(ConnectiveLexicon { entries })
    }

    pub fn default_lexicon(table: &LemmaTable) -> Self {
        Self::from_phrases(DEFAULT_CONNECTIVES.iter().copied(), table).expect("non-empty default list")
    }

    /// One phrase per line; `#` starts a comment.
    pub fn load(path: &Path, table: &LemmaTable) -> Result<Self> {
        let mut phrases = Vec::new();
        for item in numbered_lines(open_reader(path)?, path) {
            let (_, line) = item?;
            let body = line.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                phrases.push(body.to_string());
            }
        }
        Self::from_phrases(phrases.iter().map(String::as_str), table)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn phrases(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.phrase.as_str())
    }

    /// Longest phrase inside `lemmas[window]`, leftmost on ties.
    pub fn longest_in(&self, lemmas: &[Lemma], window: std::ops::Range<usize>) -> Option<ConnectiveMatch> {
        let mut best: Option<ConnectiveMatch> = None;
        for entry in &self.entries {
            let len = entry.lemmas.len();
            if best.as_ref().is_some_and(|b| b.end - b.start > len) {
                break;
            }
            if window.len() < len {
                continue;
            }
            for start in window.start..=window.end - len {
                if lemmas[start..start + len] == entry.lemmas[..] {
                    let better = best.as_ref().is_none_or(|b| start < b.start);
                    if better {
                        best = Some(ConnectiveMatch {
                            phrase: entry.phrase.clone(),
                            start,
                            end: start + len,
                        });
                    }
                    break;
                }
            }
        }
        best
    }
}

/// Connective strictly between the two event tokens, if any.
pub fn detect_connective_match(instance: &LabeledSentence, lexicon: &ConnectiveLexicon) -> Option<ConnectiveMatch> {
    let lo = instance.cause_idx.min(instance.effect_idx);
    let hi = instance.cause_idx.max(instance.effect_idx);
    lexicon.longest_in(instance.lemmas(), lo + 1..hi)
}

pub fn detect_connective(instance: &LabeledSentence, lexicon: &ConnectiveLexicon) -> Option<String> {
    detect_connective_match(instance, lexicon).map(|m| m.phrase)
}
