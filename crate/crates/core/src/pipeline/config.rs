use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::commonsense::{CSParams, KeepFractions};
use crate::detector::TrainConfig;
use crate::embedding::MarginConfig;
use crate::util::check_fraction;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    #[serde(default)]
    pub gold_pairs: Option<PathBuf>,
    pub gold_sentences: PathBuf,
    #[serde(default)]
    pub test_sentences: Option<PathBuf>,
    #[serde(default)]
    pub dev_sentences: Option<PathBuf>,
    pub corpus: PathBuf,
    pub synsets: PathBuf,
    pub verb_classes: PathBuf,
    #[serde(default)]
    pub lemma_table: Option<PathBuf>,
    pub copa: PathBuf,
    #[serde(default)]
    pub connectives: Option<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub pair_keep_fraction: f64,
    pub corpus_fraction: f64,
    pub keep_c: f64,
    pub keep_nc: f64,
    pub max_sentence_tokens: usize,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            pair_keep_fraction: 0.10,
            corpus_fraction: 0.05,
            keep_c: 0.50,
            keep_nc: 0.10,
            max_sentence_tokens: 128,
        }
    }
}

impl AugmentConfig {
    pub fn keep_fractions(&self) -> KeepFractions {
        KeepFractions {
            with_connective: self.keep_c,
            without_connective: self.keep_nc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub folds: usize,
    pub repeats: usize,
    pub audit_n: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            folds: 5,
            repeats: 1,
            audit_n: 100,
        }
    }
}

/// Switches that disable one component each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ablation {
    /// Use distant data at all.
    pub augment: bool,
    /// Expand gold pairs through the lexicons and embedding filter.
    pub extracted_pairs: bool,
    /// Partition by connective presence and split spans at connectives.
    pub connectives: bool,
    /// Rank by causal strength; when off, ranking uses a seeded hash.
    pub cs_scoring: bool,
    /// Apply the partition-and-keep filter at all.
    pub filter: bool,
    pub relabel: bool,
    pub anneal: bool,
}

impl Default for Ablation {
    fn default() -> Self {
        Ablation {
            augment: true,
            extracted_pairs: true,
            connectives: true,
            cs_scoring: true,
            filter: true,
            relabel: true,
            anneal: true,
        }
    }
}

impl Ablation {
    pub fn gold_only() -> Self {
        Ablation { augment: false, ..Default::default() }
    }

    /// Distant data used as labeled, without filtering or self-training.
    pub fn unfiltered() -> Self {
        Ablation {
            filter: false,
            relabel: false,
            anneal: false,
            ..Default::default()
        }
    }

    /// Short label, `full` when nothing is disabled.
    pub fn label(&self) -> String {
        if !self.augment {
            return "gold_only".into();
        }
        let off: Vec<&str> = [
            (self.extracted_pairs, "extracted_pairs"),
            (self.connectives, "connectives"),
            (self.cs_scoring, "cs_scoring"),
            (self.filter, "filter"),
            (self.relabel, "relabel"),
            (self.anneal, "anneal"),
        ]
        .iter()
        .filter(|(on, _)| !on)
        .map(|(_, n)| *n)
        .collect();
        if off.is_empty() {
            "full".into()
        } else {
            format!("no_{}", off.join("+no_"))
        }
    }
}

/// Everything the stages need, read from one TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    pub paths: Paths,
    #[serde(default)]
    pub augment: AugmentConfig,
    #[serde(default)]
    pub strength: CSParams,
    #[serde(default)]
    pub embedding: MarginConfig,
    #[serde(default)]
    pub detector: TrainConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub ablation: Ablation,
    /// Verbatim file contents, echoed into manifests.
    #[serde(skip)]
    pub source_text: String,
}

impl PipelineConfig {
    /// Parses `text`; relative paths resolve against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.source_text = text.to_string();
        cfg.resolve_paths(base_dir);
        cfg.set_seed(cfg.seed);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml(&text, base)
    }

    /// Sets the master seed and the seeds derived from it.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.embedding.seed = seed;
        self.detector.seed = seed;
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let p = &mut self.paths;
        for path in [
            &mut p.gold_sentences,
            &mut p.corpus,
            &mut p.synsets,
            &mut p.verb_classes,
            &mut p.copa,
            &mut p.output_dir,
        ] {
            fix(path);
        }
        for path in [
            &mut p.gold_pairs,
            &mut p.test_sentences,
            &mut p.dev_sentences,
            &mut p.lemma_table,
            &mut p.connectives,
        ]
        .into_iter()
        .flatten()
        {
            fix(path);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.augment;
        check_fraction("augment.pair_keep_fraction", a.pair_keep_fraction)?;
        check_fraction("augment.corpus_fraction", a.corpus_fraction)?;
        check_fraction("augment.keep_c", a.keep_c)?;
        check_fraction("augment.keep_nc", a.keep_nc)?;
        if a.max_sentence_tokens == 0 {
            return Err(Error::Config("augment.max_sentence_tokens must be positive".into()));
        }
        self.strength.validate()?;
        self.embedding.validate()?;
        self.detector.validate()?;
        if self.eval.folds < 2 {
            return Err(Error::Config("eval.folds must be at least 2".into()));
        }
        if self.eval.repeats == 0 {
            return Err(Error::Config("eval.repeats must be at least 1".into()));
        }
        Ok(())
    }

    pub fn output(&self, file: &str) -> PathBuf {
        self.paths.output_dir.join(file)
    }
}
