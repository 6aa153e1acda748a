use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::annotator::LabeledSentence;
use crate::{Error, Result};

/// Uniform sample of `n` instances without replacement, in input order.
pub fn audit_sample(data: &[LabeledSentence], n: usize, seed: u64) -> Result<Vec<&LabeledSentence>> {
    if n > data.len() {
        return Err(Error::Config(format!(
            "audit sample of {n} requested from {} instances",
            data.len()
        )));
    }
    let mut picked = sample(&mut ChaCha8Rng::seed_from_u64(seed), data.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| &data[i]).collect())
}

/// The sentence with the cause in `[[ ]]` and the effect in `<< >>`.
pub fn highlight(instance: &LabeledSentence) -> String {
    instance
        .sentence
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if i == instance.cause_idx {
                format!("[[{t}]]")
            } else if i == instance.effect_idx {
                format!("<<{t}>>")
            } else {
                t.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// One tab-separated line per instance, with a header.
pub fn render_audit(sample: &[&LabeledSentence]) -> String {
    let mut out = String::from("doc_id\tsent_id\tcause\teffect\tconnective\tcs_score\tsentence\tjudgement\n");
    for x in sample {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t",
            x.sentence.doc_id,
            x.sentence.sent_id,
            x.pair.cause,
            x.pair.effect,
            x.connective.as_deref().unwrap_or("-"),
            x.cs_score.map_or("-".to_string(), |s| format!("{s:.6}")),
            highlight(x),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotator::{GoldSentence, LemmaTable};
    use crate::lexicon::PairLabel;

    fn inst(id: u64) -> LabeledSentence {
        GoldSentence {
            doc_id: "d".into(),
            sent_id: id,
            text: "the storm caused a flood".into(),
            cause_idx: 1,
            effect_idx: 4,
            label: PairLabel::Causal,
        }
        .to_labeled(&LemmaTable::new())
        .unwrap()
    }

    #[test]
    fn sample_is_uniform_subset_and_deterministic() {
        let data: Vec<_> = (0..50).map(inst).collect();
        let a = audit_sample(&data, 10, 4).unwrap();
        let b = audit_sample(&data, 10, 4).unwrap();
        assert_eq!(a.len(), 10);
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].sentence.sent_id < w[1].sentence.sent_id));
        assert_eq!(audit_sample(&data, 50, 4).unwrap().len(), 50);
        assert!(matches!(audit_sample(&data, 51, 4), Err(Error::Config(_))));
    }

    #[test]
    fn highlights_events() {
        assert_eq!(highlight(&inst(0)), "the [[storm]] caused a <<flood>>");
        let text = render_audit(&[&inst(0)]);
        assert_eq!(text.lines().count(), 2);
    }
}
