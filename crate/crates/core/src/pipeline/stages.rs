use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::audit::{audit_sample, render_audit};
use super::augment::{
    expand_candidates, gold_pairs, labeling_pairs, load_gold_sentences, refine, relabel_step, select_pairs,
    strength_table, train_final, Resources, Scorer,
};
use super::config::{Ablation, PipelineConfig};
use super::eval::{cross_validate, evaluate, EvalReport};
use crate::annotator::{build_dn_from_path, AnnotateOptions, LabeledSentence};
use crate::commonsense::CooccurrenceTable;
use crate::detector::detector_trainer;
use crate::embedding::EmbeddingSpace;
use crate::lexicon::EventPair;
use crate::manifest::{hash_file, hash_records, DatasetManifest};
use crate::util::{create_writer, read_jsonl, write_jsonl};
use crate::{Error, Result};

/// A candidate pair with its embedding distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedPair {
    #[serde(flatten)]
    pub pair: EventPair,
    pub distance: f64,
}

pub struct StageContext<'a> {
    pub config: &'a PipelineConfig,
    pub workers: usize,
}

impl StageContext<'_> {
    fn path(&self, file: &str) -> PathBuf {
        self.config.output(file)
    }

    fn resources(&self) -> Result<Resources> {
        Resources::load(self.config)
    }

    fn upstream_manifest(&self, stage: &str) -> Result<DatasetManifest> {
        DatasetManifest::load(&self.path(&manifest_file(stage)))
    }

    fn write_records<T: Serialize>(&self, file: &str, records: &[T]) -> Result<String> {
        write_jsonl(&self.path(file), records)?;
        hash_records(records)
    }

    fn read_records<T: serde::de::DeserializeOwned>(&self, file: &str) -> Result<Vec<T>> {
        read_jsonl(&self.path(file))
    }

    fn load_table(&self) -> Result<CooccurrenceTable> {
        CooccurrenceTable::load(&self.path(CS_TABLE))
    }

    /// Gold sentences scored against the stored strength table.
    fn scored_gold(&self, res: &Resources, table: &CooccurrenceTable) -> Vec<LabeledSentence> {
        let mut gold = res.gold.clone();
        Scorer::new(res, table, self.config).score_all(&mut gold);
        gold
    }

    fn dev(&self, res: &Resources, table: &CooccurrenceTable) -> Result<Option<Vec<LabeledSentence>>> {
        self.config
            .paths
            .dev_sentences
            .as_ref()
            .map(|p| {
                let mut dev = load_gold_sentences(p, &res.lemma_table)?;
                Scorer::new(res, table, self.config).score_all(&mut dev);
                Ok(dev)
            })
            .transpose()
    }
}

pub fn manifest_file(stage: &str) -> String {
    format!("{stage}.manifest.json")
}

/// One step of the pipeline. Stages communicate only through files in the
/// output directory.
pub trait Stage: Send + Sync {
    fn name(&self) -> &'static str;

    /// Stages whose manifests must exist before this one runs.
    fn upstream(&self, config: &PipelineConfig) -> Vec<&'static str>;

    fn run(&self, ctx: &StageContext<'_>) -> Result<DatasetManifest>;
}

const GOLD_PAIRS: &str = "gold_pairs.jsonl";
const EXPANDED: &str = "expanded.jsonl";
const EMBEDDING: &str = "embedding.tsv";
const RANKED: &str = "ranked.jsonl";
const SELECTED: &str = "selected.jsonl";
const DN: &str = "dn.jsonl";
const CS_TABLE: &str = "cs_table.tsv";
const DR: &str = "dr.jsonl";
const DRR: &str = "drr.jsonl";
const GOLD_MODEL: &str = "gold_model.json";
const MODEL: &str = "model.json";
const REPORT: &str = "eval_report.json";
const AUDIT: &str = "audit_sample.tsv";

struct Expand;
struct TrainEmbed;
struct Annotate;
struct BuildCs;
struct Filter;
struct Relabel;
struct Train;
struct Evaluate;
struct AuditSample;

impl Stage for Expand {
    fn name(&self) -> &'static str {
        "expand"
    }

    fn upstream(&self, _: &PipelineConfig) -> Vec<&'static str> {
        vec![]
    }

    fn run(&self, ctx: &StageContext<'_>) -> Result<DatasetManifest> {
        let res = ctx.resources()?;
        let e_g = gold_pairs(&res.gold, &res.listed_pairs, &BTreeSet::new());
        let candidates = if ctx.config.ablation.extracted_pairs {
            expand_candidates(&e_g, &res)
        } else {
            BTreeSet::new()
        };
        let e_g: Vec<_> = e_g.into_iter().collect();
        let candidates: Vec<_> = candidates.into_iter().collect();
        Ok(DatasetManifest::new(self.name())
            .input("gold_sentences", hash_file(&ctx.config.paths.gold_sentences)?)
            .input("synsets", hash_file(&ctx.config.paths.synsets)?)
            .input("verb_classes", hash_file(&ctx.config.paths.verb_classes)?)
            .output(GOLD_PAIRS, ctx.write_records(GOLD_PAIRS, &e_g)?)
            .output(EXPANDED, ctx.write_records(EXPANDED, &candidates)?)
            .count("gold_pairs", e_g.len())
            .count("candidates", candidates.len()))
    }
}

impl Stage for TrainEmbed {
    fn name(&self) -> &'static str {
        "train-embed"
    }

    fn upstream(&self, _: &PipelineConfig) -> Vec<&'static str> {
        vec!["expand"]
    }

    fn run(&self, ctx: &StageContext<'_>) -> Result<DatasetManifest> {
        let e_g: BTreeSet<EventPair> = ctx.read_records::<EventPair>(GOLD_PAIRS)?.into_iter().collect();
        let candidates: BTreeSet<EventPair> = ctx.read_records::<EventPair>(EXPANDED)?.into_iter().collect();
        let sel = select_pairs(
            &e_g,
            &candidates,
            &ctx.config.embedding,
            ctx.config.augment.pair_keep_fraction,
        )?;
        sel.space.save(&ctx.path(EMBEDDING))?;
        let ranked: Vec<RankedPair> = sel
            .ranking
            .ranked
            .iter()
            .map(|(pair, distance)| RankedPair { pair: pair.clone(), distance: *distance })
            .collect();
        Ok(DatasetManifest::new(self.name())
            .output(EMBEDDING, hash_file(&ctx.path(EMBEDDING))?)
            .output(RANKED, ctx.write_records(RANKED, &ranked)?)
            .output(SELECTED, ctx.write_records(SELECTED, &sel.kept)?)
            .count("candidates", candidates.len())
            .count("ranked", ranked.len())
            .count("no_embedding", sel.ranking.dropped)
            .count("selected", sel.kept.len()))
    }
}

impl Stage for Annotate {
    fn name(&self) -> &'static str {
        "annotate"
    }

    fn upstream(&self, _: &PipelineConfig) -> Vec<&'static str> {
        vec!["expand", "train-embed"]
    }

    fn run(&self, ctx: &StageContext<'_>) -> Result<DatasetManifest> {
        let res = ctx.resources()?;
        let e_g: BTreeSet<EventPair> = ctx.read_records::<EventPair>(GOLD_PAIRS)?.into_iter().collect();
        let selected: Vec<EventPair> = ctx.read_records(SELECTED)?;
        let pairs = labeling_pairs(&e_g, &selected);
        let aug = &ctx.config.augment;
        let opts = AnnotateOptions {
            fraction: aug.corpus_fraction,
            seed: ctx.config.seed,
            max_tokens: aug.max_sentence_tokens,
            workers: ctx.workers,
        };
        let dn = if ctx.config.ablation.augment {
            build_dn_from_path(&res.corpus_path, &pairs, &res.lemma_table, &opts)?
        } else {
            let mut empty = build_dn_from_path(&res.corpus_path, &[], &res.lemma_table, &opts)?;
            empty.instances.clear();
            empty
        };
        let hash = ctx.write_records(DN, &dn.instances)?;
        let mut manifest = dn.manifest;
        manifest.outputs.clear();
        Ok(manifest.output(DN, hash))
    }
}

impl Stage for BuildCs {
    fn name(&self) -> &'static str {
        "build-cs"
    }

    fn upstream(&self, _: &PipelineConfig) -> Vec<&'static str> {
        vec![]
    }

    fn run(&self, ctx: &StageContext<'_>) -> Result<DatasetManifest> {
        let res = ctx.resources()?;
        let table = strength_table(&res, &res.gold);
        table.save(&ctx.path(CS_TABLE))?;
        Ok(DatasetManifest::new(self.name())
            .input("copa", hash_file(&ctx.config.paths.copa)?)
            .input("gold_sentences", hash_file(&ctx.config.paths.gold_sentences)?)
            .output(CS_TABLE, hash_file(&ctx.path(CS_TABLE))?)
            .count("cells", table.nonzero_cells())
            .count("pairs", table.pair_count() as usize)
            .count("total", table.total() as usize))
    }
}

impl Stage for Filter {
    fn name(&self) -> &'static str {
        "filter"
    }

    fn upstream(&self, _: &PipelineConfig) -> Vec<&'static str> {
        vec!["annotate", "build-cs"]
    }

    fn run(&self, ctx: &StageContext<'_>) -> Result<DatasetManifest> {
        let res = ctx.resources()?;
        let table = ctx.load_table()?;
        let mut dn: Vec<LabeledSentence> = ctx.read_records(DN)?;
        Scorer::new(&res, &table, ctx.config).score_all(&mut dn);
        let (d_r, manifest) = refine(dn, ctx.config)?;
        let hash = ctx.write_records(DR, &d_r)?;
        Ok(DatasetManifest { outputs: Default::default(), ..manifest }.output(DR, hash))
    }
}

impl Stage for Relabel {
    fn name(&self) -> &'static str {
        "relabel"
    }

    fn upstream(&self, _: &PipelineConfig) -> Vec<&'static str> {
        vec!["filter"]
    }

    fn run(&self, ctx: &StageContext<'_>) -> Result<DatasetManifest> {
        let res = ctx.resources()?;
        let table = ctx.load_table()?;
        let gold = ctx.scored_gold(&res, &table);
        let dev = ctx.dev(&res, &table)?;
        let d_r: Vec<LabeledSentence> = ctx.read_records(DR)?;
        let gold_cfg = PipelineConfig { ablation: Ablation::gold_only(), ..ctx.config.clone() };
        let gold_model = train_final(&gold, &[], dev.as_deref(), &gold_cfg)?;
        gold_model.save(&ctx.path(GOLD_MODEL))?;
        let (d_rr, manifest) = relabel_step(gold_model.as_ref(), &d_r, ctx.config)?;
        let hash = ctx.write_records(DRR, &d_rr)?;
        Ok(DatasetManifest { outputs: Default::default(), ..manifest }
            .output(GOLD_MODEL, hash_file(&ctx.path(GOLD_MODEL))?)
            .output(DRR, hash))
    }
}

impl Stage for Train {
    fn name(&self) -> &'static str {
        "train"
    }

    fn upstream(&self, _: &PipelineConfig) -> Vec<&'static str> {
        vec!["relabel"]
    }

    fn run(&self, ctx: &StageContext<'_>) -> Result<DatasetManifest> {
        let res = ctx.resources()?;
        let table = ctx.load_table()?;
        let gold = ctx.scored_gold(&res, &table);
        let dev = ctx.dev(&res, &table)?;
        let d_rr: Vec<LabeledSentence> = ctx.read_records(DRR)?;
        let model = train_final(&gold, &d_rr, dev.as_deref(), ctx.config)?;
        model.save(&ctx.path(MODEL))?;
        Ok(DatasetManifest::new(self.name())
            .input("gold_sentences", hash_file(&ctx.config.paths.gold_sentences)?)
            .output(MODEL, hash_file(&ctx.path(MODEL))?)
            .count("gold", gold.len())
            .count("distant", d_rr.len()))
    }
}

impl Stage for Evaluate {
    fn name(&self) -> &'static str {
        "evaluate"
    }

    /// With a test set the stored model is scored; otherwise evaluation is
    /// a self-contained cross-validation.
    fn upstream(&self, config: &PipelineConfig) -> Vec<&'static str> {
        if config.paths.test_sentences.is_some() {
            vec!["train"]
        } else {
            vec![]
        }
    }

    fn run(&self, ctx: &StageContext<'_>) -> Result<DatasetManifest> {
        let res = ctx.resources()?;
        let manifest = DatasetManifest::new(self.name()).input("ablation", ctx.config.ablation.label());
        let (report, manifest) = match &ctx.config.paths.test_sentences {
            Some(test_path) => {
                let table = ctx.load_table()?;
                let mut test = load_gold_sentences(test_path, &res.lemma_table)?;
                Scorer::new(&res, &table, ctx.config).score_all(&mut test);
                let model = detector_trainer(&ctx.config.detector.classifier)?.load(&ctx.path(MODEL))?;
                let report = evaluate(model.as_ref(), &test);
                let manifest = manifest
                    .input(MODEL, hash_file(&ctx.path(MODEL))?)
                    .input("test_sentences", hash_file(test_path)?)
                    .count("test", test.len());
                (report, manifest)
            }
            None => {
                let corpus = std::fs::read(&res.corpus_path).map_err(|e| Error::io(&res.corpus_path, e))?;
                let cv = cross_validate(&res, &corpus, ctx.config, ctx.config.eval.repeats, ctx.workers)?;
                let mut manifest = manifest
                    .count("folds", ctx.config.eval.folds)
                    .count("repeats", ctx.config.eval.repeats);
                for fold in &cv.folds {
                    for m in &fold.manifests {
                        let name = format!("seed{}/fold{}/{}", fold.seed, fold.fold, m.stage);
                        manifest = manifest.input(&name, m.output_hash.clone());
                    }
                }
                (cv.report, manifest)
            }
        };
        let path = ctx.path(REPORT);
        let mut w = create_writer(&path)?;
        serde_json::to_writer_pretty(&mut w, &report)?;
        std::io::Write::flush(&mut w).map_err(|e| Error::io(&path, e))?;
        log::info!("P {:.4} R {:.4} F1 {:.4}", report.precision, report.recall, report.f1);
        Ok(manifest
            .output(REPORT, hash_file(&path)?)
            .count("tp", report.confusion.tp as usize)
            .count("fp", report.confusion.fp as usize)
            .count("fn", report.confusion.fn_ as usize)
            .count("tn", report.confusion.tn as usize))
    }
}

impl Stage for AuditSample {
    fn name(&self) -> &'static str {
        "audit-sample"
    }

    fn upstream(&self, _: &PipelineConfig) -> Vec<&'static str> {
        vec!["filter"]
    }

    fn run(&self, ctx: &StageContext<'_>) -> Result<DatasetManifest> {
        let d_r: Vec<LabeledSentence> = ctx.read_records(DR)?;
        let sample = audit_sample(&d_r, ctx.config.eval.audit_n, ctx.config.seed)?;
        let path = ctx.path(AUDIT);
        std::fs::write(&path, render_audit(&sample)).map_err(|e| Error::io(&path, e))?;
        Ok(DatasetManifest::new(self.name())
            .output(AUDIT, hash_file(&path)?)
            .count("population", d_r.len())
            .count("sampled", sample.len()))
    }
}

/// Stage names in pipeline order.
pub const STAGES: &[&str] = &[
    "expand",
    "train-embed",
    "annotate",
    "build-cs",
    "filter",
    "relabel",
    "train",
    "evaluate",
    "audit-sample",
];

pub fn stage(name: &str) -> Result<Box<dyn Stage>> {
    let s: Box<dyn Stage> = match name {
        "expand" => Box::new(Expand),
        "train-embed" => Box::new(TrainEmbed),
        "annotate" => Box::new(Annotate),
        "build-cs" => Box::new(BuildCs),
        "filter" => Box::new(Filter),
        "relabel" => Box::new(Relabel),
        "train" => Box::new(Train),
        "evaluate" => Box::new(Evaluate),
        "audit-sample" => Box::new(AuditSample),
        other => {
            return Err(Error::Config(format!("unknown stage {other:?}; expected one of {STAGES:?}")));
        }
    };
    Ok(s)
}

/// Checks upstream manifests and their files, runs the stage and writes its
/// manifest next to its outputs.
pub fn run_stage(name: &str, ctx: &StageContext<'_>) -> Result<DatasetManifest> {
    let stage = stage(name)?;
    let mut upstream_hashes = Vec::new();
    for up in stage.upstream(ctx.config) {
        let missing = || Error::Dependency {
            stage: name.to_string(),
            missing: up.to_string(),
        };
        let manifest = ctx.upstream_manifest(up).map_err(|_| missing())?;
        if manifest.outputs.keys().any(|f| !ctx.path(f).is_file()) {
            return Err(missing());
        }
        upstream_hashes.push((up, manifest.output_hash));
    }
    std::fs::create_dir_all(&ctx.config.paths.output_dir)
        .map_err(|e| Error::io(&ctx.config.paths.output_dir, e))?;
    log::info!("running stage {name}");
    let mut manifest = stage.run(ctx)?;
    for (up, hash) in upstream_hashes {
        manifest = manifest.input(&format!("stage:{up}"), hash);
    }
    let manifest = manifest.config(&ctx.config.source_text);
    manifest.save(&ctx.path(&manifest_file(name)))?;
    Ok(manifest)
}

/// Runs the training chain from expansion to the final model.
pub fn run_all(ctx: &StageContext<'_>) -> Result<Vec<DatasetManifest>> {
    ["expand", "train-embed", "annotate", "build-cs", "filter", "relabel", "train"]
        .iter()
        .map(|s| run_stage(s, ctx))
        .collect()
}

/// Loads the evaluation report written by the `evaluate` stage.
pub fn load_report(config: &PipelineConfig) -> Result<EvalReport> {
    let path = config.output(REPORT);
    Ok(serde_json::from_reader(crate::util::open_reader(&path)?)?)
}

/// Loads an embedding written by `train-embed`.
pub fn load_embedding(config: &PipelineConfig) -> Result<EmbeddingSpace> {
    EmbeddingSpace::load(&config.output(EMBEDDING))
}
