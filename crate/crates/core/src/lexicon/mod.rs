//! Lexical knowledge fixtures and gold-pair expansion.
//!
//! Synonym/hypernym lists and verb classes are read from small TSV fixtures.
//! Each causal gold pair `(c, e)` is expanded by grouping lemmas around `c`
//! and `e` and taking the cross product of the two groups.

mod expand;
mod lemma;
mod pair;
mod synset;
mod verbclass;

pub use expand::{expand_all, expand_verbnet, expand_with, expand_wordnet, ExpansionSource};
pub use lemma::Lemma;
pub(crate) use lemma::trim_punct;
pub use pair::{load_gold_pairs, read_gold_pairs, EventPair, PairLabel, Provenance};
pub use synset::{load_synset_index, read_synset_index, SynsetEntry, SynsetIndex};
pub use verbclass::{load_verbclass_index, read_verbclass_index, ClassId, VerbClassIndex};
