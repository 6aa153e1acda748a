use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use super::Lemma;
use crate::util::{numbered_lines, open_reader};
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynsetEntry {
    pub synonyms: BTreeSet<Lemma>,
    pub hypernyms: BTreeSet<Lemma>,
}

/// Synonym and hypernym lists per lemma, merged over all senses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynsetIndex {
    entries: BTreeMap<Lemma, SynsetEntry>,
}

static EMPTY: BTreeSet<Lemma> = BTreeSet::new();

impl SynsetIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds synonyms and hypernyms for `lemma`. Self-references are dropped.
    pub fn insert(
        &mut self,
        lemma: Lemma,
        synonyms: impl IntoIterator<Item = Lemma>,
        hypernyms: impl IntoIterator<Item = Lemma>,
    ) {
        let entry = self.entries.entry(lemma.clone()).or_default();
        entry.synonyms.extend(synonyms.into_iter().filter(|l| *l != lemma));
        entry.hypernyms.extend(hypernyms.into_iter().filter(|l| *l != lemma));
    }

    pub fn synonyms(&self, lemma: &Lemma) -> &BTreeSet<Lemma> {
        self.entries.get(lemma).map_or(&EMPTY, |e| &e.synonyms)
    }

    pub fn hypernyms(&self, lemma: &Lemma) -> &BTreeSet<Lemma> {
        self.entries.get(lemma).map_or(&EMPTY, |e| &e.hypernyms)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Lemma, &SynsetEntry)> {
        self.entries.iter()
    }
}

/// Loads `lemma<TAB>syn:a,b<TAB>hyp:c,d` records. Repeated lemmas are merged.
pub fn load_synset_index(path: &Path) -> Result<SynsetIndex> {
    read_synset_index(open_reader(path)?, path)
}

pub fn read_synset_index<R: BufRead>(reader: R, path: &Path) -> Result<SynsetIndex> {
    let name = path.display().to_string();
    let mut index = SynsetIndex::new();
    for item in numbered_lines(reader, path) {
        let (lineno, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                &name,
                lineno,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let lemma = Lemma::new(fields[0]).map_err(|e| Error::parse(&name, lineno, e.to_string()))?;
        let syn = prefixed_list(fields[1], "syn:").map_err(|m| Error::parse(&name, lineno, m))?;
        let hyp = prefixed_list(fields[2], "hyp:").map_err(|m| Error::parse(&name, lineno, m))?;
        index.insert(lemma, syn, hyp);
    }
    Ok(index)
}

fn prefixed_list(field: &str, prefix: &str) -> std::result::Result<Vec<Lemma>, String> {
    let body = field
        .trim()
        .strip_prefix(prefix)
        .ok_or_else(|| format!("field {field:?} does not start with `{prefix}`"))?;
    csv_lemmas(body)
}

pub(crate) fn csv_lemmas(body: &str) -> std::result::Result<Vec<Lemma>, String> {
    body.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Lemma::new(s).map_err(|e| e.to_string()))
        .collect()
}
