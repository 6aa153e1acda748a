use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::negatives::{negative_sampler, SamplingContext};
use super::space::{translation_distance, EmbeddingSpace};
use crate::lexicon::{EventPair, Lemma};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarginConfig {
    pub dim: usize,
    pub margin: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub negative_strategy: String,
    /// Negatives drawn per positive per epoch.
    pub negatives_per_positive: usize,
    /// When false the relation vector stays at zero and the distance is
    /// plain `‖v(cause) − v(effect)‖`.
    pub use_relation: bool,
}

impl Default for MarginConfig {
    fn default() -> Self {
        MarginConfig {
            dim: 100,
            margin: 1.0,
            learning_rate: 0.01,
            epochs: 200,
            seed: 0,
            negative_strategy: "annotated_negatives".into(),
            negatives_per_positive: 1,
            use_relation: true,
        }
    }
}

impl MarginConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("embedding dim must be positive".into()));
        }
        if self.margin.is_nan() || self.margin <= 0.0 {
            return Err(Error::Config("margin must be positive".into()));
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::Config("embedding learning_rate must be positive".into()));
        }
        if self.epochs == 0 || self.negatives_per_positive == 0 {
            return Err(Error::Config(
                "embedding epochs and negatives_per_positive must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Vectors of one (cause, effect) pair.
#[derive(Debug, Clone, Copy)]
pub struct PairVectors<'a> {
    pub cause: &'a [f64],
    pub effect: &'a [f64],
}

/// Partial derivatives of one hinge term.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginGradient {
    pub pos_cause: Vec<f64>,
    pub pos_effect: Vec<f64>,
    pub neg_cause: Vec<f64>,
    pub neg_effect: Vec<f64>,
    pub relation: Vec<f64>,
}

/// `[margin + d(pos) − d(neg)]₊`.
pub fn margin_loss(pos: PairVectors<'_>, neg: PairVectors<'_>, relation: &[f64], margin: f64) -> f64 {
    let dp = translation_distance(pos.cause, relation, pos.effect);
    let dn = translation_distance(neg.cause, relation, neg.effect);
    (margin + (dp - dn)).max(0.0)
}

/// Gradient of [`margin_loss`]; all zeros when the hinge is inactive.
pub fn margin_gradient(
    pos: PairVectors<'_>,
    neg: PairVectors<'_>,
    relation: &[f64],
    margin: f64,
) -> MarginGradient {
    let dim = relation.len();
    let zeros = || vec![0.0; dim];
    let mut g = MarginGradient {
        pos_cause: zeros(),
        pos_effect: zeros(),
        neg_cause: zeros(),
        neg_effect: zeros(),
        relation: zeros(),
    };
    if margin_loss(pos, neg, relation, margin) <= 0.0 {
        return g;
    }
    let up = unit_residual(pos, relation);
    let un = unit_residual(neg, relation);
    for k in 0..dim {
        g.pos_cause[k] = up[k];
        g.pos_effect[k] = -up[k];
        g.neg_cause[k] = -un[k];
        g.neg_effect[k] = un[k];
        g.relation[k] = up[k] - un[k];
    }
    g
}

// (h + r - t) / ‖h + r - t‖, or zero at the non-differentiable point.
fn unit_residual(pair: PairVectors<'_>, relation: &[f64]) -> Vec<f64> {
    let res: Vec<f64> = pair
        .cause
        .iter()
        .zip(relation)
        .zip(pair.effect)
        .map(|((h, r), t)| h + r - t)
        .collect();
    let norm = res.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![0.0; res.len()];
    }
    res.into_iter().map(|x| x / norm).collect()
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn uniform_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let bound = 6.0 / (dim as f64).sqrt();
    (0..dim).map(|_| rng.gen_range(-bound..bound)).collect()
}

/// Trains entity and relation vectors with the pairwise margin loss so that
/// causal pairs end up closer than non-causal ones.
///
/// One epoch visits every positive in shuffled order and takes an SGD step on
/// the hinge term against each sampled negative. Entity vectors are rescaled
/// to unit norm at the start of every epoch.
pub fn train(
    positives: &BTreeSet<EventPair>,
    negatives: &BTreeSet<EventPair>,
    config: &MarginConfig,
) -> Result<EmbeddingSpace> {
    config.validate()?;
    if positives.is_empty() {
        return Err(Error::Config("embedding training needs at least one causal pair".into()));
    }
    if positives.iter().any(|p| !p.label.is_causal()) || negatives.iter().any(|p| p.label.is_causal()) {
        return Err(Error::Config("positive/negative pair labels are inconsistent".into()));
    }
    let sampler = negative_sampler(&config.negative_strategy)?;
    let pos: Vec<EventPair> = positives.iter().cloned().collect();
    let neg: Vec<EventPair> = negatives.iter().cloned().collect();
    let vocab: Vec<Lemma> = pos
        .iter()
        .chain(&neg)
        .flat_map(|p| [p.cause.clone(), p.effect.clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let ctx = SamplingContext::new(&pos, &neg, &vocab);
    sampler.check(&ctx)?;

    let index: HashMap<&Lemma, usize> = vocab.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let dim = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut entity: Vec<Vec<f64>> = vocab.iter().map(|_| uniform_vector(dim, &mut rng)).collect();
    let mut relation = if config.use_relation {
        let mut r = uniform_vector(dim, &mut rng);
        normalize(&mut r);
        r
    } else {
        vec![0.0; dim]
    };

    let lr = config.learning_rate;
    let mut order: Vec<usize> = (0..pos.len()).collect();
    for epoch in 0..config.epochs {
        entity.iter_mut().for_each(|v| normalize(v));
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for &pi in &order {
            let p = &pos[pi];
            for _ in 0..config.negatives_per_positive {
                let n = sampler.sample(p, &ctx, &mut rng);
                let ids = [index[&p.cause], index[&p.effect], index[&n.cause], index[&n.effect]];
                let g = {
                    let pv = PairVectors { cause: &entity[ids[0]], effect: &entity[ids[1]] };
                    let nv = PairVectors { cause: &entity[ids[2]], effect: &entity[ids[3]] };
                    let loss = margin_loss(pv, nv, &relation, config.margin);
                    if loss <= 0.0 {
                        continue;
                    }
                    epoch_loss += loss;
                    margin_gradient(pv, nv, &relation, config.margin)
                };
                for (id, grad) in ids.iter().zip([&g.pos_cause, &g.pos_effect, &g.neg_cause, &g.neg_effect]) {
                    for (x, d) in entity[*id].iter_mut().zip(grad) {
                        *x -= lr * d;
                    }
                }
                if config.use_relation {
                    for (x, d) in relation.iter_mut().zip(&g.relation) {
                        *x -= lr * d;
                    }
                }
            }
        }
        log::trace!("embedding epoch {epoch}: loss {epoch_loss:.6}");
    }
    entity.iter_mut().for_each(|v| normalize(v));

    let mut space = EmbeddingSpace::new(dim);
    space.set_relation(relation)?;
    for (lemma, v) in vocab.into_iter().zip(entity) {
        space.insert(lemma, v)?;
    }
    Ok(space)
}
