//! Co-occurrence causal strength and connective-aware filtering of
//! distantly labeled sentences.

mod connective;
mod copa;
mod partition;
mod strength;
mod table;

pub use connective::{
    detect_connective, detect_connective_match, ConnectiveLexicon, ConnectiveMatch, DEFAULT_CONNECTIVES,
};
pub use copa::{
    extract_annotated_pairs, extract_copa_pairs, load_copa, midpoint_boundary, CausePairText, CopaRecord,
    TextSource,
};
pub use partition::{by_score_desc, partition_and_keep, KeepFractions, RefinedDataset};
pub use strength::{cs, score_sentence, span_strength, split_spans, strength, CSParams, SpanSplit, Strength};
pub use table::{build_table, CooccurrenceTable};
