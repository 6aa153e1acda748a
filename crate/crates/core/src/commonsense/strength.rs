use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::connective::{detect_connective_match, ConnectiveLexicon};
use super::copa::midpoint_boundary;
use super::table::CooccurrenceTable;
use crate::annotator::LabeledSentence;
use crate::lexicon::Lemma;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CSParams {
    /// Penalty exponent on the high-frequency marginal.
    pub alpha: f64,
    /// Weight of necessity against sufficiency.
    pub lambda_interp: f64,
    /// Floor for zero probabilities; 0 scores absent terms as 0.
    pub epsilon: f64,
}

impl Default for CSParams {
    fn default() -> Self {
        CSParams {
            alpha: 0.5,
            lambda_interp: 0.5,
            epsilon: 0.0,
        }
    }
}

impl CSParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.lambda_interp) {
            return Err(Error::Config(format!(
                "lambda_interp must lie in [0, 1], got {}",
                self.lambda_interp
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in [0, 1), got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Necessity and sufficiency components of one word pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strength {
    pub necessity: f64,
    pub sufficiency: f64,
    pub combined: f64,
}

/// Causal strength of cause-side `i` towards effect-side `j`.
///
/// With `p(i) = Σ_w f(i,w) / M`, `p(j) = Σ_w f(w,j) / M` and
/// `p(i,j) = f(i,j) / N`:
///
/// ```text
/// nec = p(i,j) / (p(i)^α · p(j))
/// suf = p(i,j) / (p(i) · p(j)^α)
/// cs  = nec^λ · suf^(1−λ)
/// ```
pub fn strength(cause: &Lemma, effect: &Lemma, table: &CooccurrenceTable, params: &CSParams) -> Strength {
    const ZERO: Strength = Strength {
        necessity: 0.0,
        sufficiency: 0.0,
        combined: 0.0,
    };
    let m = table.total() as f64;
    let n = table.pair_count() as f64;
    if m == 0.0 || n == 0.0 {
        return ZERO;
    }
    let f = table.count(cause, effect) as f64;
    let row = table.row_sum(cause) as f64;
    let col = table.col_sum(effect) as f64;
    let (mut p_joint, mut p_cause, mut p_effect) = (f / n, row / m, col / m);
    if params.epsilon > 0.0 {
        p_joint = p_joint.max(params.epsilon);
        p_cause = p_cause.max(params.epsilon);
        p_effect = p_effect.max(params.epsilon);
    } else if f == 0.0 || row == 0.0 || col == 0.0 {
        return ZERO;
    }
    let necessity = p_joint / (p_cause.powf(params.alpha) * p_effect);
    let sufficiency = p_joint / (p_cause * p_effect.powf(params.alpha));
    let combined = necessity.powf(params.lambda_interp) * sufficiency.powf(1.0 - params.lambda_interp);
    Strength {
        necessity,
        sufficiency,
        combined,
    }
}

pub fn cs(cause: &Lemma, effect: &Lemma, table: &CooccurrenceTable, params: &CSParams) -> f64 {
    strength(cause, effect, table, params).combined
}

/// Average pairwise strength of two spans:
/// `Σ_{i∈SP1} Σ_{j∈SP2} cs(i, j) / (|SP1| + |SP2|)`.
pub fn span_strength(cause_span: &[Lemma], effect_span: &[Lemma], table: &CooccurrenceTable, params: &CSParams) -> f64 {
    let denom = cause_span.len() + effect_span.len();
    if cause_span.is_empty() || effect_span.is_empty() {
        return 0.0;
    }
    let total: f64 = cause_span
        .iter()
        .map(|i| effect_span.iter().map(|j| cs(i, j, table, params)).sum::<f64>())
        .sum();
    total / denom as f64
}

/// How a sentence is cut into a cause span and an effect span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanSplit {
    pub cause_span: Range<usize>,
    pub effect_span: Range<usize>,
    pub connective: Option<String>,
}

/// Cuts at the connective between the events when one is found (its tokens
/// belong to neither span), else at the token midpoint between the events.
pub fn split_spans(instance: &LabeledSentence, lexicon: Option<&ConnectiveLexicon>) -> SpanSplit {
    let n = instance.sentence.len();
    let found = lexicon.and_then(|lex| detect_connective_match(instance, lex));
    let (left, right, connective) = match found {
        Some(m) => (0..m.start, m.end..n, Some(m.phrase)),
        None => {
            let b = midpoint_boundary(instance.cause_idx, instance.effect_idx).min(n);
            (0..b, b..n, None)
        }
    };
    let (cause_span, effect_span) = if left.contains(&instance.cause_idx) {
        (left, right)
    } else {
        (right, left)
    };
    SpanSplit {
        cause_span,
        effect_span,
        connective,
    }
}

/// Scores `instance` and stores the score and detected connective on it.
///
/// Passing no lexicon disables connective evidence: the sentence is split at
/// the midpoint and no connective is recorded.
pub fn score_sentence(
    instance: &mut LabeledSentence,
    table: &CooccurrenceTable,
    params: &CSParams,
    lexicon: Option<&ConnectiveLexicon>,
) -> f64 {
    let split = split_spans(instance, lexicon);
    let lemmas = instance.lemmas();
    let sp1 = &lemmas[split.cause_span.clone()];
    let sp2 = &lemmas[split.effect_span.clone()];
    let score = if sp1.is_empty() || sp2.is_empty() {
        log::warn!(
            "empty span in {}#{}; scoring 0",
            instance.sentence.doc_id,
            instance.sentence.sent_id
        );
        0.0
    } else {
        span_strength(sp1, sp2, table, params)
    };
    instance.connective = split.connective;
    instance.cs_score = Some(score);
    score
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotator::{GoldSentence, LemmaTable};
    use crate::commonsense::copa::{CausePairText, TextSource};
    use crate::commonsense::table::build_table;
    use crate::lexicon::PairLabel;

    fn l(s: &str) -> Lemma {
        Lemma::new(s).unwrap()
    }

    fn two_pair_table() -> CooccurrenceTable {
        build_table(&[
            CausePairText::new(vec![l("attack")], vec![l("killed")], TextSource::Copa).unwrap(),
            CausePairText::new(vec![l("rain")], vec![l("flood")], TextSource::Copa).unwrap(),
        ])
    }

    #[test]
    fn hand_computed_sqrt_two() {
        let s = strength(&l("attack"), &l("killed"), &two_pair_table(), &CSParams::default());
        assert!((s.necessity - 2f64.sqrt()).abs() < 1e-12);
        assert!((s.sufficiency - 2f64.sqrt()).abs() < 1e-12);
        assert!((s.combined - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn zero_count_scores_zero() {
        let t = two_pair_table();
        assert_eq!(cs(&l("attack"), &l("flood"), &t, &CSParams::default()), 0.0);
        assert_eq!(cs(&l("unseen"), &l("flood"), &t, &CSParams::default()), 0.0);
        assert_eq!(cs(&l("a"), &l("b"), &CooccurrenceTable::new(), &CSParams::default()), 0.0);
    }

    #[test]
    fn alpha_one_is_plain_ratio() {
        let t = build_table(&[
            CausePairText::new(vec![l("a"), l("b")], vec![l("c")], TextSource::Copa).unwrap(),
            CausePairText::new(vec![l("a")], vec![l("d"), l("c")], TextSource::Copa).unwrap(),
        ]);
        let p = CSParams { alpha: 1.0, ..Default::default() };
        let (m, n) = (t.total() as f64, t.pair_count() as f64);
        let ratio = (2.0 / n) / ((3.0 / m) * (3.0 / m));
        let s = strength(&l("a"), &l("c"), &t, &p);
        assert!((s.necessity - ratio).abs() < 1e-12);
        assert!((s.sufficiency - ratio).abs() < 1e-12);
        assert!((s.combined - ratio).abs() < 1e-12);
    }

    #[test]
    fn epsilon_smooths_absent_terms() {
        let p = CSParams { epsilon: 1e-3, ..Default::default() };
        assert!(cs(&l("attack"), &l("flood"), &two_pair_table(), &p) > 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(CSParams::default().validate().is_ok());
        assert!(CSParams { alpha: 0.0, ..Default::default() }.validate().is_err());
        assert!(CSParams { lambda_interp: 1.5, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn one_word_spans() {
        let t = two_pair_table();
        let s = span_strength(&[l("attack")], &[l("killed")], &t, &CSParams::default());
        assert!((s - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(span_strength(&[l("rain")], &[l("killed")], &t, &CSParams::default()), 0.0);
    }

    #[test]
    fn duplicating_tokens_doubles_score() {
        let t = two_pair_table();
        let p = CSParams::default();
        let once = span_strength(&[l("attack")], &[l("killed")], &t, &p);
        let twice = span_strength(&[l("attack"), l("attack")], &[l("killed"), l("killed")], &t, &p);
        assert!((twice - 2.0 * once).abs() < 1e-12);
    }

    fn instance(text: &str, cause_idx: usize, effect_idx: usize) -> LabeledSentence {
        GoldSentence {
            doc_id: "d".into(),
            sent_id: 0,
            text: text.into(),
            cause_idx,
            effect_idx,
            label: PairLabel::Causal,
        }
        .to_labeled(&LemmaTable::new())
        .unwrap()
    }

    #[test]
    fn connective_split_excludes_connective_tokens() {
        let lex = ConnectiveLexicon::from_phrases(["because of"], &LemmaTable::new()).unwrap();
        let inst = instance("killed because of attack", 3, 0);
        let split = split_spans(&inst, Some(&lex));
        assert_eq!(split.cause_span, 3..4);
        assert_eq!(split.effect_span, 0..1);
        assert_eq!(split.connective.as_deref(), Some("because of"));
    }

    #[test]
    fn score_sentence_stores_results() {
        let t = two_pair_table();
        let mut inst = instance("rain flood", 0, 1);
        let s = score_sentence(&mut inst, &t, &CSParams::default(), None);
        assert!((s - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(inst.cs_score, Some(s));
        assert_eq!(inst.connective, None);
    }
}
