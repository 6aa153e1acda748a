//! Deterministic synthetic fixtures.
//!
//! The generated world has causal families: each family owns a few cause
//! lemmas and a few effect lemmas, and any cause of a family causes any
//! effect of the same family. Distractor events co-occur with family events
//! but cause nothing. Causal sentences carry an explicit connective or
//! context words that the commonsense records tie together; non-causal
//! sentences mention the same events without either.
//!
//! Every lemma is a pseudo-word ending in `a`, `o` or `u`, so the suffix
//! lemmatizer leaves it alone.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotator::{CorpusLine, GoldSentence};
use crate::commonsense::CopaRecord;
use crate::lexicon::PairLabel;
use crate::util::write_jsonl;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub families: usize,
    pub causes_per_family: usize,
    pub effects_per_family: usize,
    pub distractors: usize,
    pub context_words: usize,
    pub fillers: usize,
    pub gold_docs: usize,
    pub sentences_per_doc: usize,
    pub corpus_sentences: usize,
    pub copa_records: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            seed: 2024,
            families: 12,
            causes_per_family: 3,
            effects_per_family: 3,
            distractors: 24,
            context_words: 10,
            fillers: 40,
            gold_docs: 40,
            sentences_per_doc: 3,
            corpus_sentences: 3000,
            copa_records: 80,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Family {
    pub causes: Vec<String>,
    pub effects: Vec<String>,
}

/// Generated vocabulary and data, before serialization.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub families: Vec<Family>,
    pub distractors: Vec<String>,
    pub cause_context: Vec<String>,
    pub effect_context: Vec<String>,
    pub fillers: Vec<String>,
    /// `(cause, effect, label)` rows of the gold pair list.
    pub gold_pairs: Vec<(String, String, PairLabel)>,
    pub gold_sentences: Vec<GoldSentence>,
    pub corpus: Vec<CorpusLine>,
    pub synsets: String,
    pub verb_classes: String,
    pub lemma_table: String,
    pub copa: Vec<CopaRecord>,
}

const FORWARD: &[&str] = &["led to", "resulted in", "therefore", "so"];
const BACKWARD: &[&str] = &["because of", "due to", "caused by", "owing to"];

fn pseudo_words(rng: &mut ChaCha8Rng, n: usize, taken: &mut BTreeSet<String>) -> Vec<String> {
    const CONS: &[u8] = b"bdfgklmnprtvz";
    const BODY: &[u8] = b"aeiou";
    const LAST: &[u8] = b"aou";
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.gen_range(2..=3);
        let mut w = String::new();
        for s in 0..syllables {
            w.push(*CONS.choose(rng).unwrap() as char);
            let vowels = if s + 1 == syllables { LAST } else { BODY };
            w.push(*vowels.choose(rng).unwrap() as char);
        }
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

struct World<'a> {
    data: &'a SyntheticData,
}

impl World<'_> {
    fn pick<'b>(rng: &mut ChaCha8Rng, v: &'b [String]) -> &'b str {
        v.choose(rng).unwrap()
    }

    fn filler(&self, rng: &mut ChaCha8Rng) -> &str {
        Self::pick(rng, &self.data.fillers)
    }

    /// A same-family pair.
    fn family_pair(&self, rng: &mut ChaCha8Rng) -> (String, String) {
        let f = self.data.families.choose(rng).unwrap();
        (Self::pick(rng, &f.causes).into(), Self::pick(rng, &f.effects).into())
    }

    fn cross_pair(&self, rng: &mut ChaCha8Rng) -> (String, String) {
        let n = self.data.families.len();
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let fa = &self.data.families[a];
        let fb = &self.data.families[b];
        (Self::pick(rng, &fa.causes).into(), Self::pick(rng, &fb.effects).into())
    }

    fn distractor_pair(&self, rng: &mut ChaCha8Rng) -> (String, String) {
        let d = &self.data.distractors;
        let a = rng.gen_range(0..d.len());
        let b = (a + rng.gen_range(1..d.len())) % d.len();
        (d[a].clone(), d[b].clone())
    }

    /// Tokens plus cause and effect positions.
    fn causal_text(&self, rng: &mut ChaCha8Rng, c: &str, e: &str, connective: bool) -> (Vec<String>, usize, usize) {
        let kc = Self::pick(rng, &self.data.cause_context).to_string();
        let ke = Self::pick(rng, &self.data.effect_context).to_string();
        let mut t: Vec<String> = vec![self.filler(rng).into()];
        let forward = !connective || rng.gen_bool(0.6);
        let middle: Vec<String> = if connective {
            let phrase = if forward { FORWARD } else { BACKWARD }.choose(rng).unwrap();
            phrase.split(' ').map(String::from).collect()
        } else {
            vec![self.filler(rng).into()]
        };
        let (first, k1, k2, last) = if forward { (c, kc, ke, e) } else { (e, ke, kc, c) };
        t.push(first.into());
        let i = t.len() - 1;
        t.push(k1);
        t.extend(middle);
        t.push(k2);
        t.push(last.into());
        let j = t.len() - 1;
        t.push(self.filler(rng).into());
        if forward {
            (t, i, j)
        } else {
            (t, j, i)
        }
    }

    /// Two events with fillers only.
    fn plain_text(&self, rng: &mut ChaCha8Rng, a: &str, b: &str) -> (Vec<String>, usize, usize) {
        let mut t: Vec<String> = vec![self.filler(rng).into()];
        t.push(a.into());
        let i = t.len() - 1;
        for _ in 0..rng.gen_range(1..=3) {
            t.push(self.filler(rng).into());
        }
        t.push(b.into());
        let j = t.len() - 1;
        t.push(self.filler(rng).into());
        (t, i, j)
    }

    fn gold_sentence(&self, rng: &mut ChaCha8Rng) -> (Vec<String>, usize, usize, PairLabel) {
        if rng.gen_bool(0.5) {
            let (c, e) = self.family_pair(rng);
            let connective = rng.gen_bool(0.6);
            let (t, i, j) = self.causal_text(rng, &c, &e, connective);
            return (t, i, j, PairLabel::Causal);
        }
        let roll: f64 = rng.gen();
        let (t, i, j) = if roll < 0.5 {
            let (c, e) = self.family_pair(rng);
            self.plain_text(rng, &c, &e)
        } else if roll < 0.7 {
            let (c, e) = self.cross_pair(rng);
            self.plain_text(rng, &c, &e)
        } else {
            let (a, b) = self.distractor_pair(rng);
            if rng.gen_bool(0.5) {
                self.causal_text(rng, &a, &b, true)
            } else {
                self.plain_text(rng, &a, &b)
            }
        };
        (t, i, j, PairLabel::Noncausal)
    }

    fn corpus_sentence(&self, rng: &mut ChaCha8Rng) -> Vec<String> {
        let roll: f64 = rng.gen();
        if roll < 0.3 {
            let (c, e) = self.family_pair(rng);
            let connective = rng.gen_bool(0.6);
            self.causal_text(rng, &c, &e, connective).0
        } else if roll < 0.6 {
            let (c, e) = self.family_pair(rng);
            self.plain_text(rng, &c, &e).0
        } else if roll < 0.8 {
            let d = Self::pick(rng, &self.data.distractors).to_string();
            let (c, e) = self.family_pair(rng);
            let other = if rng.gen_bool(0.5) { c } else { e };
            self.plain_text(rng, &d, &other).0
        } else {
            (0..rng.gen_range(4..9)).map(|_| self.filler(rng).to_string()).collect()
        }
    }
}

/// Builds the synthetic world for `spec`.
pub fn generate(spec: &SyntheticSpec) -> SyntheticData {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut taken = BTreeSet::new();
    let families: Vec<Family> = (0..spec.families)
        .map(|_| Family {
            causes: pseudo_words(&mut rng, spec.causes_per_family, &mut taken),
            effects: pseudo_words(&mut rng, spec.effects_per_family, &mut taken),
        })
        .collect();
    let mut data = SyntheticData {
        families,
        distractors: pseudo_words(&mut rng, spec.distractors, &mut taken),
        cause_context: pseudo_words(&mut rng, spec.context_words, &mut taken),
        effect_context: pseudo_words(&mut rng, spec.context_words, &mut taken),
        fillers: pseudo_words(&mut rng, spec.fillers, &mut taken),
        gold_pairs: Vec::new(),
        gold_sentences: Vec::new(),
        corpus: Vec::new(),
        synsets: String::new(),
        verb_classes: String::new(),
        lemma_table: String::new(),
        copa: Vec::new(),
    };

    for (i, f) in data.families.iter().enumerate() {
        data.gold_pairs.push((f.causes[0].clone(), f.effects[0].clone(), PairLabel::Causal));
        let next = &data.families[(i + 1) % data.families.len()];
        data.gold_pairs.push((f.causes[0].clone(), next.effects[0].clone(), PairLabel::Noncausal));
    }
    for pair in data.distractors.chunks(2) {
        if let [a, b] = pair {
            data.gold_pairs.push((a.clone(), b.clone(), PairLabel::Noncausal));
        }
    }

    // Synonyms within a family; every third family also gets a misleading
    // hypernym that points at a distractor.
    for (i, f) in data.families.iter().enumerate() {
        for group in [&f.causes, &f.effects] {
            let head = &group[0];
            let syn = group[1..].join(",");
            let hyp = if i % 3 == 0 {
                data.distractors[i % data.distractors.len()].clone()
            } else {
                String::new()
            };
            let _ = writeln!(data.synsets, "{head}\tsyn:{syn}\thyp:{hyp}");
        }
    }
    for (i, f) in data.families.iter().enumerate() {
        let mut causes = f.causes.clone();
        if i % 4 == 1 {
            causes.push(data.distractors[(i + 7) % data.distractors.len()].clone());
        }
        let _ = writeln!(data.verb_classes, "cause-{i}\t{}", causes.join(","));
        let _ = writeln!(data.verb_classes, "effect-{i}\t{}", f.effects.join(","));
    }
    for f in &data.families {
        for w in f.causes.iter().chain(&f.effects) {
            let _ = writeln!(data.lemma_table, "{w}ta\t{w}");
        }
    }

    let world = World { data: &data };
    let mut gold = Vec::new();
    for d in 0..spec.gold_docs {
        for s in 0..spec.sentences_per_doc {
            let (tokens, cause_idx, effect_idx, label) = world.gold_sentence(&mut rng);
            gold.push(GoldSentence {
                doc_id: format!("g{d:03}"),
                sent_id: s as u64,
                text: tokens.join(" "),
                cause_idx,
                effect_idx,
                label,
            });
        }
    }
    let mut corpus = Vec::with_capacity(spec.corpus_sentences);
    for n in 0..spec.corpus_sentences {
        let mut tokens = world.corpus_sentence(&mut rng);
        // Some event mentions use the inflected form from the lemma table.
        for t in tokens.iter_mut() {
            let is_event = data.families.iter().any(|f| f.causes.contains(t) || f.effects.contains(t));
            if is_event && rng.gen_bool(0.1) {
                t.push_str("ta");
            }
        }
        corpus.push(CorpusLine {
            doc_id: format!("c{:04}", n / 10),
            sent_id: (n % 10) as u64,
            text: tokens.join(" "),
        });
    }
    let mut copa = Vec::with_capacity(spec.copa_records);
    for _ in 0..spec.copa_records {
        let mut cause: Vec<String> = vec![World::pick(&mut rng, &data.cause_context).into()];
        let mut effect: Vec<String> = vec![World::pick(&mut rng, &data.effect_context).into()];
        if rng.gen_bool(0.5) {
            let (c, e) = world.family_pair(&mut rng);
            cause.push(c);
            effect.push(e);
        }
        cause.push(World::pick(&mut rng, &data.cause_context).into());
        let wrong: String = (0..3).map(|_| world.filler(&mut rng).to_string()).collect::<Vec<_>>().join(" ");
        let asks_cause = rng.gen_bool(0.5);
        let correct: u8 = if rng.gen_bool(0.5) { 1 } else { 2 };
        let (premise, right) = if asks_cause { (effect, cause) } else { (cause, effect) };
        let right = right.join(" ");
        let (alt1, alt2) = if correct == 1 { (right, wrong) } else { (wrong, right) };
        copa.push(CopaRecord {
            premise: premise.join(" "),
            alt1,
            alt2,
            correct,
            asks_for: if asks_cause { "cause" } else { "effect" }.into(),
        });
    }
    data.gold_sentences = gold;
    data.corpus = corpus;
    data.copa = copa;
    data
}

/// Configuration text for a fixture directory; paths are relative to it.
pub fn config_text(seed: u64) -> String {
    format!(
        r#"seed = {seed}

[paths]
gold_pairs = "gold_pairs.tsv"
gold_sentences = "gold_sentences.jsonl"
corpus = "corpus.jsonl"
synsets = "synsets.tsv"
verb_classes = "verb_classes.tsv"
lemma_table = "lemmas.tsv"
copa = "copa.jsonl"
output_dir = "out"

[augment]
pair_keep_fraction = 0.1
corpus_fraction = 0.5
keep_c = 0.5
keep_nc = 0.1
max_sentence_tokens = 128

[embedding]
dim = 32
epochs = 100

[detector]
epochs = 15
hash_bits = 16

[eval]
folds = 5
repeats = 1
audit_n = 50
"#
    )
}

/// Writes every fixture file plus `knowdis.toml` into `dir` and returns the
/// config path.
pub fn write_fixture(dir: &Path, spec: &SyntheticSpec) -> Result<PathBuf> {
    let data = generate(spec);
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, text: &str| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    };
    let mut pairs = String::new();
    for (c, e, label) in &data.gold_pairs {
        let label = if label.is_causal() { "causal" } else { "noncausal" };
        let _ = writeln!(pairs, "{c}\t{e}\t{label}");
    }
    write("gold_pairs.tsv", &pairs)?;
    write("synsets.tsv", &data.synsets)?;
    write("verb_classes.tsv", &data.verb_classes)?;
    write("lemmas.tsv", &data.lemma_table)?;
    write_jsonl(&dir.join("gold_sentences.jsonl"), &data.gold_sentences)?;
    write_jsonl(&dir.join("corpus.jsonl"), &data.corpus)?;
    write_jsonl(&dir.join("copa.jsonl"), &data.copa)?;
    write("knowdis.toml", &config_text(spec.seed))?;
    Ok(dir.join("knowdis.toml"))
}
