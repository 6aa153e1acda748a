use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use crate::lexicon::{trim_punct, Lemma};
use crate::util::{numbered_lines, open_reader};
use crate::{Error, Result};

/// Surface form → lemma overrides consulted before the suffix rules.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaTable {
    forms: HashMap<String, Lemma>,
}

impl LemmaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, surface: &str, lemma: Lemma) {
        self.forms.insert(surface.to_lowercase(), lemma);
    }

    pub fn get(&self, surface: &str) -> Option<&Lemma> {
        self.forms.get(surface)
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    /// Loads `surface<TAB>lemma` lines.
    pub fn load(path: &Path) -> Result<Self> {
        Self::read(open_reader(path)?, path)
    }

    pub fn read<R: BufRead>(reader: R, path: &Path) -> Result<Self> {
        let name = path.display().to_string();
        let mut table = LemmaTable::new();
        for item in numbered_lines(reader, path) {
            let (lineno, line) = item?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (surface, lemma) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(&name, lineno, "expected surface<TAB>lemma"))?;
            let lemma = Lemma::new(lemma).map_err(|e| Error::parse(&name, lineno, e.to_string()))?;
            let surface = trim_punct(surface.trim());
            if surface.is_empty() {
                return Err(Error::parse(&name, lineno, "empty surface form"));
            }
            table.insert(surface, lemma);
        }
        Ok(table)
    }

    /// Lemma for one already-trimmed token.
    pub fn lemmatize(&self, token: &str) -> Lemma {
        let lower = token.to_lowercase();
        if let Some(l) = self.forms.get(&lower) {
            return l.clone();
        }
        let stem = suffix_stem(&lower).unwrap_or(lower);
        Lemma::new(&stem).expect("trimmed non-empty token")
    }
}

const MIN_STEM: usize = 3;

// Final consonants that are doubled before -ed/-ing (stopped, planned).
// l, s, z and f are left alone since kill/pass/buzz/staff end that way.
fn undouble(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 2 && b[n - 1] == b[n - 2] && b"bdgkmnprt".contains(&b[n - 1]) {
        stem[..n - 1].to_string()
    } else {
        stem.to_string()
    }
}

/// Heuristic inflection stripping; `None` when no rule applies.
fn suffix_stem(word: &str) -> Option<String> {
    if !word.chars().all(|c| c.is_ascii_alphabetic()) {
        return None;
    }
    if let Some(stem) = word.strip_suffix("ies") {
        if stem.len() >= 2 {
            return Some(format!("{stem}y"));
        }
    }
    if let Some(stem) = word.strip_suffix("es") {
        if stem.len() >= 2 && ["s", "x", "z", "ch", "sh"].iter().any(|s| stem.ends_with(s)) {
            return Some(stem.to_string());
        }
    }
    if let Some(stem) = word.strip_suffix('s') {
        if stem.len() >= MIN_STEM && !["s", "u", "i"].iter().any(|s| stem.ends_with(s)) {
            return Some(stem.to_string());
        }
    }
    if let Some(stem) = word.strip_suffix("ed") {
        if stem.len() >= MIN_STEM {
            return Some(undouble(stem));
        }
    }
    if let Some(stem) = word.strip_suffix("ing") {
        if stem.len() >= MIN_STEM {
            return Some(undouble(stem));
        }
    }
    None
}

/// Whitespace tokenization with edge punctuation stripped; tokens that are
/// pure punctuation are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(trim_punct)
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn tokenize_and_lemmatize(text: &str, table: &LemmaTable) -> (Vec<String>, Vec<Lemma>) {
    let tokens = tokenize(text);
    let lemmas = tokens.iter().map(|t| table.lemmatize(t)).collect();
    (tokens, lemmas)
}
