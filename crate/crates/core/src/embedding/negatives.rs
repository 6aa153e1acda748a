use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::lexicon::{EventPair, Lemma, PairLabel};
use crate::{Error, Result};

/// What a sampler can draw from during one training run.
pub struct SamplingContext<'a> {
    pub positives: &'a [EventPair],
    pub negatives: &'a [EventPair],
    pub vocabulary: &'a [Lemma],
    positive_keys: HashSet<(&'a Lemma, &'a Lemma)>,
}

impl<'a> SamplingContext<'a> {
    pub fn new(
        positives: &'a [EventPair],
        negatives: &'a [EventPair],
        vocabulary: &'a [Lemma],
    ) -> Self {
        SamplingContext {
            positives,
            negatives,
            vocabulary,
            positive_keys: positives.iter().map(EventPair::key).collect(),
        }
    }

    pub fn is_positive(&self, cause: &Lemma, effect: &Lemma) -> bool {
        self.positive_keys.contains(&(cause, effect))
    }
}

/// Produces the non-causal counterpart for a causal training pair.
pub trait NegativeSampler: Send + Sync {
    fn name(&self) -> &'static str;

    fn check(&self, ctx: &SamplingContext<'_>) -> Result<()>;

    fn sample(&self, positive: &EventPair, ctx: &SamplingContext<'_>, rng: &mut ChaCha8Rng)
        -> EventPair;
}

/// Draws uniformly from the annotated non-causal pairs.
#[derive(Debug, Default, Clone, Copy)]
pub struct AnnotatedNegatives;

impl NegativeSampler for AnnotatedNegatives {
    fn name(&self) -> &'static str {
        "annotated_negatives"
    }

    fn check(&self, ctx: &SamplingContext<'_>) -> Result<()> {
        if ctx.negatives.is_empty() {
            return Err(Error::Config(
                "annotated_negatives needs at least one non-causal pair".into(),
            ));
        }
        Ok(())
    }

    fn sample(&self, _: &EventPair, ctx: &SamplingContext<'_>, rng: &mut ChaCha8Rng) -> EventPair {
        ctx.negatives
            .choose(rng)
            .cloned()
            .expect("checked non-empty")
    }
}

/// Replaces the cause or the effect with a random vocabulary lemma.
#[derive(Debug, Default, Clone, Copy)]
pub struct Corruption;

const CORRUPTION_RETRIES: usize = 16;

impl NegativeSampler for Corruption {
    fn name(&self) -> &'static str {
        "corruption"
    }

    fn check(&self, ctx: &SamplingContext<'_>) -> Result<()> {
        if ctx.vocabulary.len() < 2 {
            return Err(Error::Config("corruption needs at least two lemmas".into()));
        }
        Ok(())
    }

    fn sample(&self, positive: &EventPair, ctx: &SamplingContext<'_>, rng: &mut ChaCha8Rng) -> EventPair {
        let mut last = None;
        for _ in 0..CORRUPTION_RETRIES {
            let replacement = ctx.vocabulary.choose(rng).expect("checked non-empty").clone();
            let (cause, effect) = if rng.gen_bool(0.5) {
                (replacement, positive.effect.clone())
            } else {
                (positive.cause.clone(), replacement)
            };
            let known = ctx.is_positive(&cause, &effect);
            let cand = EventPair::new(cause, effect, positive.provenance, PairLabel::Noncausal);
            if !known {
                return cand;
            }
            last = Some(cand);
        }
        last.expect("at least one attempt")
    }
}

pub const NEGATIVE_SAMPLERS: &[&str] = &["annotated_negatives", "corruption"];

/// Looks up a negative sampler by its configuration name.
pub fn negative_sampler(name: &str) -> Result<Box<dyn NegativeSampler>> {
    match name {
        "annotated_negatives" => Ok(Box::new(AnnotatedNegatives)),
        "corruption" => Ok(Box::new(Corruption)),
        other => Err(Error::Config(format!(
            "unknown negative strategy {other:?}; expected one of {NEGATIVE_SAMPLERS:?}"
        ))),
    }
}
