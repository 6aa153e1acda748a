use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Lemma;
use crate::util::{numbered_lines, open_reader};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Gold,
    Wordnet,
    Verbnet,
    Both,
}

impl Provenance {
    /// Provenance of a pair found by two expansion routes.
    pub fn merge(self, other: Provenance) -> Provenance {
        if self == other {
            self
        } else {
            Provenance::Both
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairLabel {
    Causal,
    Noncausal,
}

impl PairLabel {
    pub fn is_causal(self) -> bool {
        self == PairLabel::Causal
    }
}

/// An ordered (cause, effect) head-word pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EventPair {
    pub cause: Lemma,
    pub effect: Lemma,
    pub provenance: Provenance,
    pub label: PairLabel,
}

impl EventPair {
    pub fn new(cause: Lemma, effect: Lemma, provenance: Provenance, label: PairLabel) -> Self {
        EventPair {
            cause,
            effect,
            provenance,
            label,
        }
    }

    pub fn gold(cause: &str, effect: &str, label: PairLabel) -> Result<Self> {
        Ok(EventPair::new(
            Lemma::new(cause)?,
            Lemma::new(effect)?,
            Provenance::Gold,
            label,
        ))
    }

    pub fn key(&self) -> (&Lemma, &Lemma) {
        (&self.cause, &self.effect)
    }
}

/// Reads gold pairs from `cause<TAB>effect<TAB>causal|noncausal`. Event
/// phrases are reduced to their head word.
pub fn load_gold_pairs(path: &Path) -> Result<BTreeSet<EventPair>> {
    read_gold_pairs(open_reader(path)?, path)
}

pub fn read_gold_pairs<R: BufRead>(reader: R, path: &Path) -> Result<BTreeSet<EventPair>> {
    let name = path.display().to_string();
    let mut pairs = BTreeSet::new();
    for item in numbered_lines(reader, path) {
        let (lineno, line) = item?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(&name, lineno, "expected cause<TAB>effect<TAB>label"));
        }
        let label = match fields[2].trim() {
            "causal" => PairLabel::Causal,
            "noncausal" => PairLabel::Noncausal,
            other => {
                return Err(Error::parse(&name, lineno, format!("unknown label {other:?}")));
            }
        };
        let head = |s: &str| Lemma::head_of(s).map_err(|e| Error::parse(&name, lineno, e.to_string()));
        pairs.insert(EventPair::new(head(fields[0])?, head(fields[1])?, Provenance::Gold, label));
    }
    Ok(pairs)
}
