use std::collections::{BTreeMap, BTreeSet};

use super::{EventPair, Lemma, PairLabel, Provenance, SynsetIndex, VerbClassIndex};

/// A lexical resource that proposes new causal pairs from a gold pair.
///
/// Each source builds a cause group and an effect group around the two head
/// words; the candidate pairs are their cross product minus the original.
pub trait ExpansionSource: Send + Sync {
    fn name(&self) -> &'static str;

    fn provenance(&self) -> Provenance;

    /// The group of lemmas standing in for `lemma`, including itself.
    fn group(&self, lemma: &Lemma) -> BTreeSet<Lemma>;

    fn expand(&self, pair: &EventPair) -> BTreeSet<EventPair> {
        if !pair.label.is_causal() {
            return BTreeSet::new();
        }
        let causes = self.group(&pair.cause);
        let effects = self.group(&pair.effect);
        let mut out = BTreeSet::new();
        for c in &causes {
            for e in &effects {
                if c == &pair.cause && e == &pair.effect {
                    continue;
                }
                out.insert(EventPair::new(
                    c.clone(),
                    e.clone(),
                    self.provenance(),
                    PairLabel::Causal,
                ));
            }
        }
        out
    }
}

impl ExpansionSource for SynsetIndex {
    fn name(&self) -> &'static str {
        "wordnet"
    }

    fn provenance(&self) -> Provenance {
        Provenance::Wordnet
    }

    fn group(&self, lemma: &Lemma) -> BTreeSet<Lemma> {
        let mut g = BTreeSet::from([lemma.clone()]);
        g.extend(self.synonyms(lemma).iter().cloned());
        g.extend(self.hypernyms(lemma).iter().cloned());
        g
    }
}

impl ExpansionSource for VerbClassIndex {
    fn name(&self) -> &'static str {
        "verbnet"
    }

    fn provenance(&self) -> Provenance {
        Provenance::Verbnet
    }

    fn group(&self, lemma: &Lemma) -> BTreeSet<Lemma> {
        self.class_mates(lemma)
    }
}

pub fn expand_wordnet(pair: &EventPair, index: &SynsetIndex) -> BTreeSet<EventPair> {
    index.expand(pair)
}

pub fn expand_verbnet(pair: &EventPair, index: &VerbClassIndex) -> BTreeSet<EventPair> {
    index.expand(pair)
}

/// Expands every causal gold pair through both lexical resources.
pub fn expand_all(
    gold: &BTreeSet<EventPair>,
    synsets: &SynsetIndex,
    verb_classes: &VerbClassIndex,
) -> BTreeSet<EventPair> {
    expand_with(gold, &[synsets, verb_classes])
}

/// Union of all sources' expansions, deduplicated on (cause, effect).
///
/// Pairs whose (cause, effect) key occurs in `gold` are dropped; a key
/// produced by several sources carries [`Provenance::Both`].
pub fn expand_with(
    gold: &BTreeSet<EventPair>,
    sources: &[&dyn ExpansionSource],
) -> BTreeSet<EventPair> {
    let gold_keys: BTreeSet<(&Lemma, &Lemma)> = gold.iter().map(EventPair::key).collect();
    let mut merged: BTreeMap<(Lemma, Lemma), Provenance> = BTreeMap::new();
    for pair in gold.iter().filter(|p| p.label.is_causal()) {
        for source in sources {
            for cand in source.expand(pair) {
                if gold_keys.contains(&cand.key()) {
                    continue;
                }
                merged
                    .entry((cand.cause, cand.effect))
                    .and_modify(|p| *p = p.merge(cand.provenance))
                    .or_insert(cand.provenance);
            }
        }
    }
    merged
        .into_iter()
        .map(|((c, e), prov)| EventPair::new(c, e, prov, PairLabel::Causal))
        .collect()
}
