use std::cmp::Ordering;

use super::EmbeddingSpace;
use crate::lexicon::EventPair;
use crate::util::{ceil_count, check_fraction};
use crate::Result;

/// Candidates sorted by ascending distance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ranking {
    pub ranked: Vec<(EventPair, f64)>,
    /// Candidates skipped because a lemma has no vector.
    pub dropped: usize,
}

pub fn rank_candidates<'a>(
    space: &EmbeddingSpace,
    candidates: impl IntoIterator<Item = &'a EventPair>,
) -> Ranking {
    let mut ranking = Ranking::default();
    for cand in candidates {
        match space.distance(cand) {
            Ok(d) => ranking.ranked.push((cand.clone(), d)),
            Err(_) => ranking.dropped += 1,
        }
    }
    ranking.ranked.sort_by(|(pa, da), (pb, db)| {
        da.partial_cmp(db)
            .unwrap_or(Ordering::Equal)
            .then_with(|| pa.key().cmp(&pb.key()))
            .then_with(|| pa.cmp(pb))
    });
    if ranking.dropped > 0 {
        log::info!("{} candidate pairs have no embedding and were dropped", ranking.dropped);
    }
    ranking
}

/// Keeps the first `⌈fraction · n⌉` ranked pairs.
pub fn filter_top(ranked: &[(EventPair, f64)], fraction: f64) -> Result<Vec<EventPair>> {
    check_fraction("pair keep fraction", fraction)?;
    let k = ceil_count(fraction, ranked.len());
    Ok(ranked[..k].iter().map(|(p, _)| p.clone()).collect())
}
