use sha2::{Digest, Sha256};

use super::sentence::CorpusLine;
use crate::util::check_fraction;
use crate::Result;

/// Uniform draw in `[0, 1)` that depends only on `(seed, doc_id, sent_id)`.
pub fn sentence_draw(seed: u64, doc_id: &str, sent_id: u64) -> f64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(doc_id.as_bytes());
    h.update([0xff]);
    h.update(sent_id.to_le_bytes());
    let digest = h.finalize();
    let mut word = [0u8; 8];
    word.copy_from_slice(&digest[..8]);
    // 53 high bits give an exactly representable value below 1.
    (u64::from_le_bytes(word) >> 11) as f64 / (1u64 << 53) as f64
}

pub fn keep_sentence(seed: u64, doc_id: &str, sent_id: u64, fraction: f64) -> bool {
    fraction >= 1.0 || sentence_draw(seed, doc_id, sent_id) < fraction
}

/// Retains each sentence independently with probability `fraction`.
pub fn sample_corpus<I>(corpus: I, fraction: f64, seed: u64) -> Result<impl Iterator<Item = CorpusLine>>
where
    I: IntoIterator<Item = CorpusLine>,
{
    check_fraction("corpus fraction", fraction)?;
    Ok(corpus
        .into_iter()
        .filter(move |l| keep_sentence(seed, &l.doc_id, l.sent_id, fraction)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(n: u64) -> Vec<CorpusLine> {
        (0..n)
            .map(|i| CorpusLine {
                doc_id: format!("doc{}", i / 20),
                sent_id: i % 20,
                text: "x".into(),
            })
            .collect()
    }

    #[test]
    fn full_fraction_is_identity() {
        let c = corpus(50);
        let kept: Vec<_> = sample_corpus(c.clone(), 1.0, 7).unwrap().collect();
        assert_eq!(kept, c);
    }

    #[test]
    fn rejects_bad_fraction() {
        assert!(sample_corpus(corpus(1), 0.0, 1).is_err());
        assert!(sample_corpus(corpus(1), 2.0, 1).is_err());
    }

    #[test]
    fn binomial_count_within_three_sigma() {
        let n = 100_000u64;
        let p = 0.05;
        let kept = sample_corpus(corpus(n), p, 42).unwrap().count() as f64;
        let mean = n as f64 * p;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((kept - mean).abs() <= 3.0 * sigma, "kept {kept}, sigma {sigma}");
    }

    #[test]
    fn deterministic_and_order_free() {
        let c = corpus(2000);
        let a: Vec<_> = sample_corpus(c.clone(), 0.3, 11).unwrap().collect();
        let b: Vec<_> = sample_corpus(c.clone(), 0.3, 11).unwrap().collect();
        assert_eq!(a, b);
        let mut rev = c;
        rev.reverse();
        let mut r: Vec<_> = sample_corpus(rev, 0.3, 11).unwrap().collect();
        r.reverse();
        assert_eq!(a, r);
    }

    #[test]
    fn draws_are_in_unit_interval() {
        for i in 0..1000 {
            let u = sentence_draw(i, "d", i * 7);
            assert!((0.0..1.0).contains(&u));
        }
    }
}
