//! Corpus streaming, sampling and distant labeling.

mod annotate;
mod corpus;
mod sample;
mod sentence;
mod tokenize;

pub use annotate::{annotate, PairIndex};
pub use corpus::{build_dn, build_dn_from_path, AnnotateOptions, DistantDataset};
pub use sample::{keep_sentence, sample_corpus, sentence_draw};
pub use sentence::{
    sort_canonical, CorpusLine, GoldSentence, LabeledSentence, Orientation, PairSource,
    SentenceRecord,
};
pub use tokenize::{tokenize, tokenize_and_lemmatize, LemmaTable};
