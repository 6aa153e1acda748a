use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::annotate::{annotate, PairIndex};
use super::sample::keep_sentence;
use super::sentence::{sort_canonical, CorpusLine, LabeledSentence, PairSource, SentenceRecord};
use super::tokenize::LemmaTable;
use crate::lexicon::EventPair;
use crate::manifest::{hash_records, DatasetManifest};
use crate::util::{check_fraction, numbered_lines, open_reader};
use crate::{Error, Result};

const BATCH: usize = 4096;

/// Settings for one distant-annotation pass.
#[derive(Debug, Clone, Copy)]
pub struct AnnotateOptions {
    pub fraction: f64,
    pub seed: u64,
    /// Longer sentences are skipped.
    pub max_tokens: usize,
    pub workers: usize,
}

impl Default for AnnotateOptions {
    fn default() -> Self {
        AnnotateOptions {
            fraction: 0.05,
            seed: 0,
            max_tokens: 128,
            workers: 1,
        }
    }
}

/// Distantly labeled data in canonical order, with its manifest.
#[derive(Debug, Clone)]
pub struct DistantDataset {
    pub instances: Vec<LabeledSentence>,
    pub manifest: DatasetManifest,
}

#[derive(Debug, Default, Clone, Copy)]
struct ScanCounts {
    read: usize,
    sampled: usize,
    too_long: usize,
}

fn process_line(
    line: CorpusLine,
    pairs: &PairIndex,
    table: &LemmaTable,
    opts: &AnnotateOptions,
    counts: &mut ScanCounts,
) -> Vec<LabeledSentence> {
    counts.read += 1;
    if !keep_sentence(opts.seed, &line.doc_id, line.sent_id, opts.fraction) {
        return Vec::new();
    }
    counts.sampled += 1;
    match SentenceRecord::from_line(line, table) {
        Some(s) if s.len() > opts.max_tokens => {
            counts.too_long += 1;
            Vec::new()
        }
        Some(s) => annotate(&s, pairs),
        None => Vec::new(),
    }
}

/// Samples, tokenizes and annotates a JSON-lines corpus.
///
/// Sentences are processed in batches on `opts.workers` threads. The result
/// is sorted canonically, so it does not depend on the worker count.
pub fn build_dn<R: BufRead>(
    corpus: R,
    corpus_name: &Path,
    pairs: &[EventPair],
    table: &LemmaTable,
    opts: &AnnotateOptions,
) -> Result<DistantDataset> {
    check_fraction("corpus fraction", opts.fraction)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let index = PairIndex::new(pairs);
    let name = corpus_name.display().to_string();

    let mut corpus_hash = Sha256::new();
    let mut instances = Vec::new();
    let mut counts = ScanCounts::default();
    let mut batch: Vec<(usize, String)> = Vec::with_capacity(BATCH);

    let mut flush = |batch: &mut Vec<(usize, String)>, instances: &mut Vec<LabeledSentence>| -> Result<()> {
        let results: Vec<(Vec<LabeledSentence>, ScanCounts)> = pool.install(|| {
            batch
                .par_iter()
                .map(|(lineno, text)| {
                    let line: CorpusLine = serde_json::from_str(text)
                        .map_err(|e| Error::parse(&name, *lineno, e.to_string()))?;
                    let mut c = ScanCounts::default();
                    let out = process_line(line, &index, table, opts, &mut c);
                    Ok((out, c))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for (out, c) in results {
            counts.read += c.read;
            counts.sampled += c.sampled;
            counts.too_long += c.too_long;
            instances.extend(out);
        }
        batch.clear();
        Ok(())
    };

    for item in numbered_lines(corpus, corpus_name) {
        let (lineno, line) = item?;
        corpus_hash.update(line.as_bytes());
        corpus_hash.update(b"\n");
        if line.trim().is_empty() {
            continue;
        }
        batch.push((lineno, line));
        if batch.len() == BATCH {
            flush(&mut batch, &mut instances)?;
        }
    }
    flush(&mut batch, &mut instances)?;

    sort_canonical(&mut instances);
    let mut by_source: BTreeMap<PairSource, usize> = BTreeMap::new();
    for inst in &instances {
        *by_source.entry(inst.pair_source).or_default() += 1;
    }
    let manifest = DatasetManifest::new("annotate")
        .input("corpus", hex::encode(corpus_hash.finalize()))
        .input("pairs", hash_records(pairs)?)
        .output("dn.jsonl", hash_records(&instances)?)
        .count("sentences_read", counts.read)
        .count("sentences_sampled", counts.sampled)
        .count("sentences_too_long", counts.too_long)
        .count("instances", instances.len())
        .count("gold", by_source.get(&PairSource::Gold).copied().unwrap_or(0))
        .count("extracted", by_source.get(&PairSource::Extracted).copied().unwrap_or(0));
    Ok(DistantDataset { instances, manifest })
}

pub fn build_dn_from_path(
    path: &Path,
    pairs: &[EventPair],
    table: &LemmaTable,
    opts: &AnnotateOptions,
) -> Result<DistantDataset> {
    build_dn(open_reader(path)?, path, pairs, table, opts)
}
