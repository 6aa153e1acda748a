//! Configuration, stage registry and evaluation.
//!
//! Each stage reads its inputs from the output directory, writes its
//! outputs there and records a `<stage>.manifest.json` with content hashes.
//! [`run_chain`] runs the same steps in memory, which is what
//! cross-validation uses.

mod audit;
mod augment;
mod config;
mod eval;
mod stages;

pub use audit::{audit_sample, highlight, render_audit};
pub use augment::{
    expand_candidates, gold_pairs, labeling_pairs, load_gold_sentences, pair_keys, refine, relabel_step,
    run_chain, select_pairs, strength_table, train_final, ChainOutput, PairSelection, Resources, Scorer,
};
pub use config::{Ablation, AugmentConfig, EvalConfig, Paths, PipelineConfig};
pub use eval::{
    cross_validate, evaluate, kfold_split, Confusion, CrossValidation, EvalReport, Fold, FoldOutcome,
    DECISION_THRESHOLD,
};
pub use stages::{
    load_embedding, load_report, manifest_file, run_all, run_stage, stage, RankedPair, Stage, StageContext,
    STAGES,
};
