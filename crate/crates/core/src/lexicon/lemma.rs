use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A normalized head-word lemma: lowercase, non-empty, no whitespace and no
/// punctuation at either edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Lemma(String);

impl Lemma {
    pub fn new(raw: &str) -> Result<Lemma> {
        let trimmed = trim_punct(raw.trim());
        if trimmed.is_empty() || trimmed.chars().any(char::is_whitespace) {
            return Err(Error::InvalidLemma(raw.to_string()));
        }
        Ok(Lemma(trimmed.to_lowercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Reduces an event phrase to its head word (the last token).
    pub fn head_of(phrase: &str) -> Result<Lemma> {
        phrase
            .split_whitespace()
            .rev()
            .find(|t| !trim_punct(t).is_empty())
            .ok_or_else(|| Error::InvalidLemma(phrase.to_string()))
            .and_then(Lemma::new)
    }
}

/// Strips non-alphanumeric characters from both ends of a token.
pub(crate) fn trim_punct(s: &str) -> &str {
    s.trim_matches(|c: char| !c.is_alphanumeric())
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Lemma {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Lemma {
    type Error = Error;

    fn try_from(s: String) -> Result<Lemma> {
        Lemma::new(&s)
    }
}

impl From<Lemma> for String {
    fn from(l: Lemma) -> String {
        l.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_case_and_edges() {
        assert_eq!(Lemma::new("Killed.").unwrap().as_str(), "killed");
        assert_eq!(Lemma::new("\"U.S.\"").unwrap().as_str(), "u.s");
    }

    #[test]
    fn rejects_empty_and_spaced() {
        assert!(Lemma::new("").is_err());
        assert!(Lemma::new("...").is_err());
        assert!(Lemma::new("two words").is_err());
    }

    #[test]
    fn head_word_is_last_token() {
        assert_eq!(Lemma::head_of("police attack").unwrap().as_str(), "attack");
        assert_eq!(Lemma::head_of("was killed ,").unwrap().as_str(), "killed");
        assert!(Lemma::head_of("  ").is_err());
    }
}
