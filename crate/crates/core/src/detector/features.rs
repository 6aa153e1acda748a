use std::collections::BTreeSet;
use std::hash::Hasher;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};

use crate::annotator::{LabeledSentence, Orientation};

const CONTEXT_WINDOW: usize = 3;

/// Sparse feature vector with ids sorted ascending and no duplicates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector {
    entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    /// Sorts entries and sums duplicate ids.
    pub fn from_entries(mut entries: Vec<(u32, f64)>) -> Self {
        entries.sort_by_key(|(id, _)| *id);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(entries.len());
        for (id, v) in entries {
            match merged.last_mut() {
                Some((last, acc)) if *last == id => *acc += v,
                _ => merged.push((id, v)),
            }
        }
        FeatureVector { entries: merged }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries.iter().map(|(id, v)| weights[*id as usize] * v).sum()
    }
}

/// Settings shared by training and prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    pub hash_seed: u64,
    pub hash_bits: u32,
    /// Quartile edges of training cs scores; `None` when no instance had one.
    pub cs_bucket_edges: Option<[f64; 3]>,
}

impl FeatureSpace {
    pub fn dimension(&self) -> usize {
        1usize << self.hash_bits
    }

    pub fn feature_id(&self, name: &str) -> u32 {
        let mut h = FnvHasher::with_key(self.hash_seed ^ 0xcbf2_9ce4_8422_2325);
        h.write(name.as_bytes());
        (h.finish() & (self.dimension() as u64 - 1)) as u32
    }

    pub fn featurize(&self, instance: &LabeledSentence) -> FeatureVector {
        let entries = feature_names(instance, self.cs_bucket_edges.as_ref())
            .iter()
            .map(|name| (self.feature_id(name), 1.0))
            .collect();
        FeatureVector::from_entries(entries)
    }
}

pub fn distance_bucket(distance: usize) -> &'static str {
    match distance {
        0 | 1 => "1",
        2..=3 => "2-3",
        4..=7 => "4-7",
        _ => "8+",
    }
}

pub fn cs_bucket(score: f64, edges: &[f64; 3]) -> usize {
    edges.iter().take_while(|e| score >= **e).count()
}

/// Quartile edges (nearest rank) of the scores present in `data`.
pub fn quartile_edges<'a>(data: impl IntoIterator<Item = &'a LabeledSentence>) -> Option<[f64; 3]> {
    let mut scores: Vec<f64> = data.into_iter().filter_map(|x| x.cs_score).filter(|s| s.is_finite()).collect();
    if scores.is_empty() {
        return None;
    }
    scores.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let at = |q: f64| {
        let rank = (q * scores.len() as f64).ceil() as usize;
        scores[rank.saturating_sub(1).min(scores.len() - 1)]
    };
    Some([at(0.25), at(0.5), at(0.75)])
}

/// Human-readable feature names of one instance, deduplicated and sorted.
pub fn feature_names(instance: &LabeledSentence, cs_edges: Option<&[f64; 3]>) -> Vec<String> {
    let lemmas = instance.lemmas();
    let cause = &lemmas[instance.cause_idx];
    let effect = &lemmas[instance.effect_idx];
    let mut names = BTreeSet::new();
    names.insert(format!("PAIR={cause}|{effect}"));
    names.insert(format!("CAUSE={cause}"));
    names.insert(format!("EFFECT={effect}"));
    names.insert(format!(
        "CONN={}",
        instance.connective.as_deref().unwrap_or("NONE")
    ));
    names.insert(
        match instance.orientation {
            Orientation::CauseFirst => "ORIENT=cause_first",
            Orientation::EffectFirst => "ORIENT=effect_first",
        }
        .to_string(),
    );
    names.insert(format!(
        "DIST={}",
        distance_bucket(instance.cause_idx.abs_diff(instance.effect_idx))
    ));
    if let (Some(score), Some(edges)) = (instance.cs_score, cs_edges) {
        names.insert(format!("CSQ={}", cs_bucket(score, edges)));
    }
    for (tag, center) in [("CTXC", instance.cause_idx), ("CTXE", instance.effect_idx)] {
        let lo = center.saturating_sub(CONTEXT_WINDOW);
        let hi = (center + CONTEXT_WINDOW).min(lemmas.len() - 1);
        for (i, l) in lemmas.iter().enumerate().take(hi + 1).skip(lo) {
            if i != center {
                names.insert(format!("{tag}={l}"));
            }
        }
    }
    names.into_iter().collect()
}
