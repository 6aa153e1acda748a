//! Translation-embedding scorer for candidate causal pairs.
//!
//! A pair `(c, e)` scores `‖v(c) + r − v(e)‖₂` against a single learned
//! causal relation vector `r`; smaller means more plausibly causal. Training
//! minimises the pairwise hinge `[margin + d(pos) − d(neg)]₊`.

mod negatives;
mod rank;
mod space;
mod train;

pub use negatives::{
    negative_sampler, AnnotatedNegatives, Corruption, NegativeSampler, SamplingContext,
    NEGATIVE_SAMPLERS,
};
pub use rank::{filter_top, rank_candidates, Ranking};
pub use space::{EmbeddingSpace, RELATION_KEY};
pub use train::{margin_gradient, margin_loss, train, MarginConfig, MarginGradient, PairVectors};

use crate::lexicon::EventPair;
use crate::Result;

/// Distance of a pair in `space`.
pub fn distance(space: &EmbeddingSpace, pair: &EventPair) -> Result<f64> {
    space.distance(pair)
}
