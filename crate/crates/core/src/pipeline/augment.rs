use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use super::config::{Ablation, PipelineConfig};
use crate::annotator::{
    build_dn, sentence_draw, sort_canonical, AnnotateOptions, GoldSentence, LabeledSentence, LemmaTable,
};
use crate::commonsense::{
    build_table, by_score_desc, extract_annotated_pairs, extract_copa_pairs, load_copa, partition_and_keep,
    score_sentence, CSParams, CausePairText, ConnectiveLexicon, CooccurrenceTable,
};
use crate::detector::{detector_trainer, relabel, Detector};
use crate::embedding::{filter_top, rank_candidates, train as train_embedding, EmbeddingSpace, MarginConfig, Ranking};
use crate::lexicon::{
    expand_all, load_gold_pairs, load_synset_index, load_verbclass_index, EventPair, Lemma, SynsetIndex,
    VerbClassIndex,
};
use crate::manifest::{hash_records, DatasetManifest};
use crate::util::read_jsonl;
use crate::Result;

/// Lexical resources and gold data shared by every stage.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lemma_table: LemmaTable,
    pub synsets: SynsetIndex,
    pub verb_classes: VerbClassIndex,
    pub connectives: ConnectiveLexicon,
    pub copa_pairs: Vec<CausePairText>,
    /// Pairs listed in the gold pair file, if one is configured.
    pub listed_pairs: BTreeSet<EventPair>,
    pub gold: Vec<LabeledSentence>,
    pub corpus_path: PathBuf,
}

impl Resources {
    pub fn load(config: &PipelineConfig) -> Result<Self> {
        let paths = &config.paths;
        let lemma_table = match &paths.lemma_table {
            Some(p) => LemmaTable::load(p)?,
            None => LemmaTable::new(),
        };
        let connectives = match &paths.connectives {
            Some(p) => ConnectiveLexicon::load(p, &lemma_table)?,
            None => ConnectiveLexicon::default_lexicon(&lemma_table),
        };
        let copa = load_copa(&paths.copa)?;
        let copa_pairs = extract_copa_pairs(&copa, &lemma_table)?;
        let listed_pairs = match &paths.gold_pairs {
            Some(p) => load_gold_pairs(p)?,
            None => BTreeSet::new(),
        };
        let gold = load_gold_sentences(&paths.gold_sentences, &lemma_table)?;
        Ok(Resources {
            synsets: load_synset_index(&paths.synsets)?,
            verb_classes: load_verbclass_index(&paths.verb_classes)?,
            lemma_table,
            connectives,
            copa_pairs,
            listed_pairs,
            gold,
            corpus_path: paths.corpus.clone(),
        })
    }
}

pub fn load_gold_sentences(path: &Path, table: &LemmaTable) -> Result<Vec<LabeledSentence>> {
    let raw: Vec<GoldSentence> = read_jsonl(path)?;
    let mut out = raw.iter().map(|g| g.to_labeled(table)).collect::<Result<Vec<_>>>()?;
    sort_canonical(&mut out);
    Ok(out)
}

/// Annotated pairs: those of the gold sentences plus the listed ones, minus
/// any whose (cause, effect) key is in `exclude`.
pub fn gold_pairs(
    sentences: &[LabeledSentence],
    listed: &BTreeSet<EventPair>,
    exclude: &BTreeSet<(Lemma, Lemma)>,
) -> BTreeSet<EventPair> {
    sentences
        .iter()
        .map(|s| s.pair.clone())
        .chain(listed.iter().cloned())
        .filter(|p| !exclude.contains(&(p.cause.clone(), p.effect.clone())))
        .collect()
}

pub fn pair_keys(sentences: &[LabeledSentence]) -> BTreeSet<(Lemma, Lemma)> {
    sentences.iter().map(|s| (s.pair.cause.clone(), s.pair.effect.clone())).collect()
}

/// Expansion candidates of the causal gold pairs.
pub fn expand_candidates(e_g: &BTreeSet<EventPair>, res: &Resources) -> BTreeSet<EventPair> {
    expand_all(e_g, &res.synsets, &res.verb_classes)
}

/// Output of embedding-based candidate selection.
#[derive(Debug, Clone)]
pub struct PairSelection {
    pub space: EmbeddingSpace,
    pub ranking: Ranking,
    pub kept: Vec<EventPair>,
}

/// Trains the pair embedding on `e_g` and keeps the closest candidates.
///
/// A causal and a non-causal entry with the same key are both dropped from
/// training.
pub fn select_pairs(
    e_g: &BTreeSet<EventPair>,
    candidates: &BTreeSet<EventPair>,
    config: &MarginConfig,
    keep_fraction: f64,
) -> Result<PairSelection> {
    let (pos, neg): (BTreeSet<EventPair>, BTreeSet<EventPair>) =
        e_g.iter().cloned().partition(|p| p.label.is_causal());
    let pos_keys: BTreeSet<_> = pos.iter().map(|p| (p.cause.clone(), p.effect.clone())).collect();
    let neg_keys: BTreeSet<_> = neg.iter().map(|p| (p.cause.clone(), p.effect.clone())).collect();
    let conflict = |p: &EventPair| {
        let k = (p.cause.clone(), p.effect.clone());
        pos_keys.contains(&k) && neg_keys.contains(&k)
    };
    let pos: BTreeSet<_> = pos.into_iter().filter(|p| !conflict(p)).collect();
    let neg: BTreeSet<_> = neg.into_iter().filter(|p| !conflict(p)).collect();
    let space = train_embedding(&pos, &neg, config)?;
    let ranking = rank_candidates(&space, candidates);
    let kept = filter_top(&ranking.ranked, keep_fraction)?;
    Ok(PairSelection { space, ranking, kept })
}

/// Pairs used for distant labeling: causal gold pairs and the selected ones.
pub fn labeling_pairs(e_g: &BTreeSet<EventPair>, selected: &[EventPair]) -> Vec<EventPair> {
    e_g.iter()
        .filter(|p| p.label.is_causal())
        .cloned()
        .chain(selected.iter().cloned())
        .collect()
}

/// Co-occurrence table over the commonsense pairs and the causal gold
/// sentences.
pub fn strength_table(res: &Resources, gold: &[LabeledSentence]) -> CooccurrenceTable {
    let mut texts = res.copa_pairs.clone();
    texts.extend(extract_annotated_pairs(gold));
    build_table(&texts)
}

/// How instances get their connective and score.
#[derive(Clone, Copy)]
pub struct Scorer<'a> {
    pub table: &'a CooccurrenceTable,
    pub params: &'a CSParams,
    pub connectives: Option<&'a ConnectiveLexicon>,
    /// Replace causal strength by a seeded uniform draw.
    pub random_seed: Option<u64>,
}

impl<'a> Scorer<'a> {
    pub fn new(res: &'a Resources, table: &'a CooccurrenceTable, config: &'a PipelineConfig) -> Self {
        Scorer {
            table,
            params: &config.strength,
            connectives: config.ablation.connectives.then_some(&res.connectives),
            random_seed: (!config.ablation.cs_scoring).then_some(config.seed),
        }
    }

    pub fn score(&self, instance: &mut LabeledSentence) {
        score_sentence(instance, self.table, self.params, self.connectives);
        if let Some(seed) = self.random_seed {
            let key = format!(
                "{}\u{1f}{}\u{1f}{}",
                instance.sentence.doc_id, instance.pair.cause, instance.pair.effect
            );
            instance.cs_score = Some(sentence_draw(seed, &key, instance.sentence.sent_id));
        }
    }

    pub fn score_all(&self, data: &mut [LabeledSentence]) {
        data.iter_mut().for_each(|x| self.score(x));
    }
}

/// Keeps the top of each connective partition, or everything when the
/// filter is ablated.
pub fn refine(scored: Vec<LabeledSentence>, config: &PipelineConfig) -> Result<(Vec<LabeledSentence>, DatasetManifest)> {
    if config.ablation.filter {
        let refined = partition_and_keep(scored, config.augment.keep_fractions())?;
        Ok((refined.instances, refined.manifest))
    } else {
        let manifest = DatasetManifest::new("filter")
            .output("dr.jsonl", hash_records(&scored)?)
            .count("instances", scored.len());
        Ok((scored, manifest))
    }
}

/// Relabels `d_r` with `detector`, or passes it through best score first
/// when relabeling is ablated.
pub fn relabel_step(
    detector: &dyn Detector,
    d_r: &[LabeledSentence],
    config: &PipelineConfig,
) -> Result<(Vec<LabeledSentence>, DatasetManifest)> {
    if config.ablation.relabel {
        let out = relabel(detector, d_r, config.detector.relabel_threshold)?;
        Ok((out.instances, out.manifest))
    } else {
        let mut kept = d_r.to_vec();
        kept.sort_by(by_score_desc);
        let manifest = DatasetManifest::new("relabel")
            .input("dr", hash_records(d_r)?)
            .output("drr.jsonl", hash_records(&kept)?)
            .count("kept", kept.len())
            .count("dropped", 0);
        Ok((kept, manifest))
    }
}

/// Trains the final detector on gold data plus `d_rr`.
pub fn train_final(
    gold: &[LabeledSentence],
    d_rr: &[LabeledSentence],
    dev: Option<&[LabeledSentence]>,
    config: &PipelineConfig,
) -> Result<Box<dyn Detector>> {
    let trainer = detector_trainer(&config.detector.classifier)?;
    let ab = &config.ablation;
    if !ab.augment {
        trainer.train(gold, &[], dev, &config.detector)
    } else if ab.anneal {
        trainer.train(gold, d_rr, dev, &config.detector)
    } else {
        let mut all = gold.to_vec();
        all.extend_from_slice(d_rr);
        trainer.train(&all, &[], dev, &config.detector)
    }
}

/// Everything one run of the augmentation chain produces.
pub struct ChainOutput {
    pub gold_pairs: BTreeSet<EventPair>,
    pub candidates: BTreeSet<EventPair>,
    pub selected: Vec<EventPair>,
    pub d_n: Vec<LabeledSentence>,
    pub d_r: Vec<LabeledSentence>,
    pub d_rr: Vec<LabeledSentence>,
    pub detector: Box<dyn Detector>,
    pub table: CooccurrenceTable,
    pub manifests: Vec<DatasetManifest>,
}

impl ChainOutput {
    /// Scores held-out sentences the way training sentences were scored.
    pub fn prepare(&self, res: &Resources, config: &PipelineConfig, data: &mut [LabeledSentence]) {
        Scorer::new(res, &self.table, config).score_all(data);
    }
}

/// Runs expansion through final training in memory.
///
/// `gold` is the training portion of the annotated sentences; pairs whose
/// key is in `exclude` are kept out of every pair set. `gold` is scored in
/// place.
pub fn run_chain<R: BufRead>(
    res: &Resources,
    gold: &mut [LabeledSentence],
    exclude: &BTreeSet<(Lemma, Lemma)>,
    corpus: R,
    config: &PipelineConfig,
    workers: usize,
) -> Result<ChainOutput> {
    let ablation: Ablation = config.ablation;
    let table = strength_table(res, gold);
    let scorer = Scorer::new(res, &table, config);
    scorer.score_all(gold);
    let e_g = gold_pairs(gold, &res.listed_pairs, exclude);
    let mut manifests = Vec::new();

    let (candidates, selected) = if ablation.augment && ablation.extracted_pairs {
        let candidates = expand_candidates(&e_g, res);
        let selection = select_pairs(&e_g, &candidates, &config.embedding, config.augment.pair_keep_fraction)?;
        (candidates, selection.kept)
    } else {
        (BTreeSet::new(), Vec::new())
    };
    manifests.push(
        DatasetManifest::new("expand")
            .input("gold_pairs", hash_records(&e_g.iter().collect::<Vec<_>>())?)
            .output("expanded.jsonl", hash_records(&candidates.iter().collect::<Vec<_>>())?)
            .output("selected.jsonl", hash_records(&selected)?)
            .count("gold_pairs", e_g.len())
            .count("candidates", candidates.len())
            .count("selected", selected.len()),
    );

    let (d_n, d_r, d_rr) = if ablation.augment {
        let pairs = labeling_pairs(&e_g, &selected);
        let opts = AnnotateOptions {
            fraction: config.augment.corpus_fraction,
            seed: config.seed,
            max_tokens: config.augment.max_sentence_tokens,
            workers,
        };
        let mut dn = build_dn(corpus, &res.corpus_path, &pairs, &res.lemma_table, &opts)?;
        manifests.push(dn.manifest);
        scorer.score_all(&mut dn.instances);
        let (d_r, filter_manifest) = refine(dn.instances.clone(), config)?;
        manifests.push(filter_manifest);
        let gold_model = train_final(gold, &[], None, &PipelineConfig {
            ablation: Ablation::gold_only(),
            ..config.clone()
        })?;
        let (d_rr, relabel_manifest) = relabel_step(gold_model.as_ref(), &d_r, config)?;
        manifests.push(relabel_manifest);
        (dn.instances, d_r, d_rr)
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    };

    let detector = train_final(gold, &d_rr, None, config)?;
    manifests.push(
        DatasetManifest::new("train")
            .input("drr", hash_records(&d_rr)?)
            .output("model", detector.digest()?)
            .count("gold", gold.len())
            .count("distant", d_rr.len()),
    );
    Ok(ChainOutput {
        gold_pairs: e_g,
        candidates,
        selected,
        d_n,
        d_r,
        d_rr,
        detector,
        table,
        manifests,
    })
}
