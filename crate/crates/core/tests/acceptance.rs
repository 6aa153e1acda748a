//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use knowdis::annotator::{GoldSentence, LabeledSentence, LemmaTable};
use knowdis::commonsense::{
    build_table, cs, partition_and_keep, score_sentence, CSParams, CausePairText, ConnectiveLexicon,
    KeepFractions, TextSource,
};
use knowdis::detector::{anneal_count, gradient, objective, DetectorModel, FeatureSpace, FeatureVector};
use knowdis::embedding::{
    filter_top, margin_gradient, margin_loss, rank_candidates, train, MarginConfig, PairVectors,
};
use knowdis::lexicon::{
    expand_all, load_gold_pairs, load_synset_index, load_verbclass_index, read_synset_index,
    read_verbclass_index, EventPair, Lemma, PairLabel, Provenance,
};
use knowdis::manifest::DatasetManifest;
use knowdis::pipeline::{
    cross_validate, load_report, run_stage, Ablation, PipelineConfig, Resources, StageContext, STAGES,
};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn l(s: &str) -> Lemma {
    Lemma::new(s).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- 1

/// Causal strength computed straight from the raw texts.
fn oracle_cs(texts: &[(Vec<Lemma>, Vec<Lemma>)], i: &Lemma, j: &Lemma, p: &CSParams) -> f64 {
    let (mut f, mut row, mut col, mut m) = (0u64, 0u64, 0u64, 0u64);
    for (causes, effects) in texts {
        for c in causes {
            for e in effects {
                m += 1;
                row += (c == i) as u64;
                col += (e == j) as u64;
                f += (c == i && e == j) as u64;
            }
        }
    }
    if f == 0 {
        return 0.0;
    }
    let n = texts.len() as f64;
    let p_ij = f as f64 / n;
    let p_i = row as f64 / m as f64;
    let p_j = col as f64 / m as f64;
    let nec = p_ij / (p_i.powf(p.alpha) * p_j);
    let suf = p_ij / (p_i * p_j.powf(p.alpha));
    nec.powf(p.lambda_interp) * suf.powf(1.0 - p.lambda_interp)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let two = build_table(&[
        CausePairText::new(vec![l("attack")], vec![l("killed")], TextSource::Copa).unwrap(),
        CausePairText::new(vec![l("rain")], vec![l("flood")], TextSource::Copa).unwrap(),
    ]);
    let hand = cs(&l("attack"), &l("killed"), &two, &CSParams::default());
    ensure((hand - 2f64.sqrt()).abs() < 1e-12, || format!("CS(attack, killed) = {hand}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let table_words = LemmaTable::new();
    let connectives = ConnectiveLexicon::default_lexicon(&table_words);
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for _ in 0..200 {
        let v = rng.gen_range(2..=20);
        let vocab: Vec<Lemma> = (0..v).map(|k| l(&format!("w{k}"))).collect();
        let draw = |rng: &mut ChaCha8Rng| -> Vec<Lemma> {
            (0..rng.gen_range(1..=4)).map(|_| vocab.choose(rng).unwrap().clone()).collect()
        };
        let texts: Vec<(Vec<Lemma>, Vec<Lemma>)> =
            (0..rng.gen_range(1..=8)).map(|_| (draw(&mut rng), draw(&mut rng))).collect();
        let table = build_table(
            &texts
                .iter()
                .map(|(c, e)| CausePairText::new(c.clone(), e.clone(), TextSource::Copa).unwrap())
                .collect::<Vec<_>>(),
        );
        let params = CSParams {
            alpha: rng.gen_range(0.05..=1.0),
            lambda_interp: rng.gen_range(0.0..=1.0),
            epsilon: 0.0,
        };
        for i in &vocab {
            for j in &vocab {
                let got = cs(i, j, &table, &params);
                let want = oracle_cs(&texts, i, j, &params);
                worst = worst.max((got - want).abs());
                checked += 1;
            }
        }

        // A sentence over the same vocabulary, sometimes with a connective
        // between the events.
        let len = rng.gen_range(4..=12);
        let mut words: Vec<String> = (0..len).map(|_| vocab.choose(&mut rng).unwrap().to_string()).collect();
        let a = rng.gen_range(0..len);
        let mut b = rng.gen_range(0..len - 1);
        if b >= a {
            b += 1;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let mut conn: Option<(usize, usize)> = None;
        if hi - lo >= 3 && rng.gen_bool(0.5) {
            let at = rng.gen_range(lo + 1..hi - 1);
            words[at] = "due".into();
            words[at + 1] = "to".into();
            conn = Some((at, at + 2));
        } else if hi - lo >= 2 && rng.gen_bool(0.5) {
            let at = rng.gen_range(lo + 1..hi);
            words[at] = "because".into();
            conn = Some((at, at + 1));
        }
        let mut inst = GoldSentence {
            doc_id: "d".into(),
            sent_id: 0,
            text: words.join(" "),
            cause_idx: a,
            effect_idx: b,
            label: PairLabel::Causal,
        }
        .to_labeled(&table_words)
        .unwrap();
        let got = score_sentence(&mut inst, &table, &params, Some(&connectives));
        let (left, right) = match conn {
            Some((s, e)) => (0..s, e..len),
            None => {
                let m = lo + (hi - lo) / 2 + 1;
                (0..m, m..len)
            }
        };
        let (sp1, sp2) = if left.contains(&a) { (left, right) } else { (right, left) };
        let lemmas: Vec<Lemma> = words.iter().map(|w| l(w)).collect();
        let mut sum = 0.0;
        for i in sp1.clone() {
            for j in sp2.clone() {
                sum += oracle_cs(&texts, &lemmas[i], &lemmas[j], &params);
            }
        }
        let want = sum / (sp1.len() + sp2.len()) as f64;
        worst = worst.max((got - want).abs());
        checked += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= 1e-12, || format!("max abs deviation {worst:e}"))?;
    ensure(secs < 5.0, || format!("took {secs:.2}s"))?;
    Ok(format!(
        "CS(attack,killed)=sqrt2; {checked} values over 200 tables, max |diff| {worst:.1e}, {secs:.2}s"
    ))
}

// ---------------------------------------------------------------- 2

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: Vec<f64> = analytic.iter().zip(numeric).map(|(a, b)| a - b).collect();
    let scale = norm(analytic).max(norm(numeric));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = 1e-6;
    let mut worst_hinge: f64 = 0.0;
    let mut done = 0;
    while done < 50 {
        let dim = rng.gen_range(1..=8);
        let mut vecs: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let margin = rng.gen_range(0.5..2.0);
        let loss = |v: &[Vec<f64>]| {
            margin_loss(
                PairVectors { cause: &v[0], effect: &v[1] },
                PairVectors { cause: &v[2], effect: &v[3] },
                &v[4],
                margin,
            )
        };
        if loss(&vecs) < 1e-3 {
            continue;
        }
        let g = margin_gradient(
            PairVectors { cause: &vecs[0], effect: &vecs[1] },
            PairVectors { cause: &vecs[2], effect: &vecs[3] },
            &vecs[4],
            margin,
        );
        let analytic: Vec<f64> = [&g.pos_cause, &g.pos_effect, &g.neg_cause, &g.neg_effect, &g.relation]
            .iter()
            .flat_map(|v| v.iter().copied())
            .collect();
        let mut numeric = Vec::with_capacity(analytic.len());
        for v in 0..5 {
            for k in 0..dim {
                let x = vecs[v][k];
                vecs[v][k] = x + h;
                let up = loss(&vecs);
                vecs[v][k] = x - h;
                let down = loss(&vecs);
                vecs[v][k] = x;
                numeric.push((up - down) / (2.0 * h));
            }
        }
        worst_hinge = worst_hinge.max(rel_err(&analytic, &numeric));
        done += 1;
    }

    let mut worst_log: f64 = 0.0;
    for _ in 0..50 {
        let space = FeatureSpace {
            hash_seed: 0,
            hash_bits: 5,
            cs_bucket_edges: None,
        };
        let mut model = DetectorModel::zeros(space);
        model.weights.iter_mut().for_each(|w| *w = rng.gen_range(-0.5..0.5));
        model.bias = rng.gen_range(-0.5..0.5);
        let l2 = rng.gen_range(0.0..0.01);
        let data: Vec<(FeatureVector, bool)> = (0..rng.gen_range(1..=10))
            .map(|_| {
                let entries = (0..rng.gen_range(1..=20))
                    .map(|_| (rng.gen_range(0..32u32), rng.gen_range(-1.0..1.0)))
                    .collect();
                (FeatureVector::from_entries(entries), rng.gen_bool(0.5))
            })
            .collect();
        let (gw, gb) = gradient(&model, &data, l2);
        let mut analytic = gw;
        analytic.push(gb);
        let mut numeric = Vec::with_capacity(analytic.len());
        for k in 0..model.weights.len() {
            let x = model.weights[k];
            model.weights[k] = x + h;
            let up = objective(&model, &data, l2);
            model.weights[k] = x - h;
            let down = objective(&model, &data, l2);
            model.weights[k] = x;
            numeric.push((up - down) / (2.0 * h));
        }
        let b = model.bias;
        model.bias = b + h;
        let up = objective(&model, &data, l2);
        model.bias = b - h;
        let down = objective(&model, &data, l2);
        model.bias = b;
        numeric.push((up - down) / (2.0 * h));
        worst_log = worst_log.max(rel_err(&analytic, &numeric));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst_hinge < 1e-5, || format!("hinge rel err {worst_hinge:e}"))?;
    ensure(worst_log < 1e-5, || format!("log-loss rel err {worst_log:e}"))?;
    ensure(secs < 5.0, || format!("took {secs:.2}s"))?;
    Ok(format!(
        "hinge max rel err {worst_hinge:.1e}, log-loss max rel err {worst_log:.1e} (50 each), {secs:.2}s"
    ))
}

// ---------------------------------------------------------------- 3

const TENTHS: [u64; 3] = [1, 5, 10];

fn brute_ceil(tenths: u64, n: u64) -> u64 {
    (0..=n).find(|k| 10 * k >= tenths * n).unwrap()
}

fn brute_floor(tenths: u64, n: u64) -> u64 {
    (0..=n).rev().find(|k| 10 * k <= tenths * n).unwrap()
}

fn instance(id: u64, score: f64, connective: bool) -> LabeledSentence {
    let mut x = GoldSentence {
        doc_id: "d".into(),
        sent_id: id,
        text: "storm flood".into(),
        cause_idx: 0,
        effect_idx: 1,
        label: PairLabel::Causal,
    }
    .to_labeled(&LemmaTable::new())
    .unwrap();
    x.cs_score = Some(score);
    x.connective = connective.then(|| "because".to_string());
    x
}

fn criterion_3() -> Outcome {
    let mut cases = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for &t in &TENTHS {
        let f = t as f64 / 10.0;
        for n in 0..=12u64 {
            let ranked: Vec<(EventPair, f64)> = (0..n)
                .map(|i| (EventPair::gold(&format!("c{i}"), "e", PairLabel::Causal).unwrap(), i as f64))
                .collect();
            let kept = filter_top(&ranked, f).map_err(|e| e.to_string())?;
            ensure(kept.len() as u64 == brute_ceil(t, n), || format!("filter_top({f}, {n}) = {}", kept.len()))?;
            ensure(kept.iter().zip(&ranked).all(|(a, (b, _))| a == b), || "filter_top not a prefix".into())?;
            cases += 1;
        }
    }
    for &tc in &TENTHS {
        for &tn in &TENTHS {
            for n_c in 0..=12u64 {
                for n_nc in 0..=12u64 {
                    let mut scores: Vec<f64> = (0..n_c + n_nc).map(|_| rng.gen_range(0.0..1.0)).collect();
                    scores.shuffle(&mut rng);
                    let data: Vec<LabeledSentence> = scores
                        .iter()
                        .enumerate()
                        .map(|(i, s)| instance(i as u64, *s, (i as u64) < n_c))
                        .collect();
                    let keep = KeepFractions {
                        with_connective: tc as f64 / 10.0,
                        without_connective: tn as f64 / 10.0,
                    };
                    let out = partition_and_keep(data.clone(), keep).map_err(|e| e.to_string())?;
                    let expect = |conn: bool, tenths: u64, n: u64| -> BTreeSet<u64> {
                        let mut part: Vec<&LabeledSentence> =
                            data.iter().filter(|x| x.connective.is_some() == conn).collect();
                        part.sort_by(|a, b| b.cs_score.partial_cmp(&a.cs_score).unwrap());
                        part.iter().take(brute_ceil(tenths, n) as usize).map(|x| x.sentence.sent_id).collect()
                    };
                    let mut want = expect(true, tc, n_c);
                    want.extend(expect(false, tn, n_nc));
                    let got: BTreeSet<u64> = out.instances.iter().map(|x| x.sentence.sent_id).collect();
                    ensure(got == want, || format!("partition_and_keep({tc}/10, {tn}/10, {n_c}, {n_nc})"))?;
                    cases += 1;
                }
            }
        }
    }
    for &t in &TENTHS {
        let beta = t as f64 / 10.0;
        for total in 0..=12u64 {
            for epoch in 1..=12u64 {
                let share = ((epoch - 1) * t).min(10);
                let want = brute_floor(share, total);
                let got = anneal_count(epoch as usize, beta, total as usize) as u64;
                ensure(got == want, || format!("anneal_count({epoch}, {beta}, {total}) = {got}, want {want}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} exhaustive cases match integer brute force"))
}

// ---------------------------------------------------------------- 4

/// Cross-product closure computed from raw fixture lists.
fn brute_closure(
    gold: &[(usize, usize, bool)],
    synsets: &BTreeMap<usize, BTreeSet<usize>>,
    classes: &[BTreeSet<usize>],
) -> BTreeMap<(usize, usize), (bool, bool)> {
    let wn_group = |x: usize| {
        let mut g: BTreeSet<usize> = synsets.get(&x).cloned().unwrap_or_default();
        g.insert(x);
        g
    };
    let vn_group = |x: usize| {
        let mut g: BTreeSet<usize> = classes.iter().filter(|c| c.contains(&x)).flatten().copied().collect();
        g.insert(x);
        g
    };
    let gold_keys: BTreeSet<(usize, usize)> = gold.iter().map(|(c, e, _)| (*c, *e)).collect();
    let mut out: BTreeMap<(usize, usize), (bool, bool)> = BTreeMap::new();
    for &(c, e, causal) in gold {
        if !causal {
            continue;
        }
        for (wn, group) in [(true, &wn_group as &dyn Fn(usize) -> BTreeSet<usize>), (false, &vn_group)] {
            for a in group(c) {
                for b in group(e) {
                    if gold_keys.contains(&(a, b)) {
                        continue;
                    }
                    let slot = out.entry((a, b)).or_default();
                    if wn {
                        slot.0 = true;
                    } else {
                        slot.1 = true;
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
struct LexFixture {
    gold: Vec<(usize, usize, bool)>,
    synsets: BTreeMap<usize, BTreeSet<usize>>,
    classes: Vec<BTreeSet<usize>>,
}

fn lex_fixture() -> impl Strategy<Value = LexFixture> {
    let v = 10usize;
    (
        prop::collection::vec((0..v, 0..v, any::<bool>()), 1..6),
        prop::collection::btree_map(0..v, prop::collection::btree_set(0..v, 0..4), 0..8),
        prop::collection::vec(prop::collection::btree_set(0..v, 1..5), 0..4),
    )
        .prop_map(|(gold, synsets, classes)| {
            let gold = gold.into_iter().filter(|(c, e, _)| c != e).collect();
            let synsets = synsets
                .into_iter()
                .map(|(k, mut s)| {
                    s.remove(&k);
                    (k, s)
                })
                .collect();
            LexFixture { gold, synsets, classes }
        })
}

fn w(i: usize) -> String {
    format!("w{i}")
}

fn run_expansion(fx: &LexFixture) -> BTreeSet<EventPair> {
    let mut syn_text = String::new();
    for (k, s) in &fx.synsets {
        let list: Vec<String> = s.iter().map(|i| w(*i)).collect();
        syn_text.push_str(&format!("{}\tsyn:{}\thyp:\n", w(*k), list.join(",")));
    }
    let mut vn_text = String::new();
    for (i, c) in fx.classes.iter().enumerate() {
        let list: Vec<String> = c.iter().map(|i| w(*i)).collect();
        vn_text.push_str(&format!("class-{i}\t{}\n", list.join(",")));
    }
    let syn = read_synset_index(syn_text.as_bytes(), Path::new("syn")).unwrap();
    let vn = read_verbclass_index(vn_text.as_bytes(), Path::new("vn")).unwrap();
    let gold: BTreeSet<EventPair> = fx
        .gold
        .iter()
        .map(|(c, e, causal)| {
            let label = if *causal { PairLabel::Causal } else { PairLabel::Noncausal };
            EventPair::gold(&w(*c), &w(*e), label).unwrap()
        })
        .collect();
    expand_all(&gold, &syn, &vn)
}

fn keyed(out: &BTreeSet<EventPair>) -> BTreeMap<(String, String), Provenance> {
    out.iter()
        .map(|p| ((p.cause.to_string(), p.effect.to_string()), p.provenance))
        .collect()
}

fn criterion_4() -> Outcome {
    let dir = fixtures().join("lexicon");
    let syn = load_synset_index(&dir.join("synsets.tsv")).map_err(|e| e.to_string())?;
    let vn = load_verbclass_index(&dir.join("verb_classes.tsv")).map_err(|e| e.to_string())?;
    let gold = load_gold_pairs(&dir.join("gold_pairs.tsv")).map_err(|e| e.to_string())?;
    let got = keyed(&expand_all(&gold, &syn, &vn));
    use Provenance::{Both, Verbnet, Wordnet};
    let expected: BTreeMap<(String, String), Provenance> = [
        ("assault", "kill", Both),
        ("assault", "murder", Both),
        ("assault", "slay", Wordnet),
        ("attack", "murder", Both),
        ("attack", "slay", Wordnet),
        ("operation", "kill", Wordnet),
        ("operation", "murder", Wordnet),
        ("operation", "slay", Wordnet),
        ("attack", "slaughter", Verbnet),
        ("assault", "slaughter", Verbnet),
        ("bombard", "kill", Verbnet),
        ("bombard", "murder", Verbnet),
        ("bombard", "slaughter", Verbnet),
        ("rain", "inundate", Wordnet),
        ("shower", "flood", Wordnet),
        ("shower", "inundate", Wordnet),
        ("precipitation", "flood", Wordnet),
        ("precipitation", "inundate", Wordnet),
    ]
    .iter()
    .map(|(c, e, p)| ((c.to_string(), e.to_string()), *p))
    .collect();
    ensure(got == expected, || format!("fixture closure mismatch: {got:?}"))?;

    let mut runner = TestRunner::new(PropConfig {
        cases: 500,
        failure_persistence: None,
        ..PropConfig::default()
    });
    runner
        .run(&(lex_fixture(), 0usize..10, 0usize..10), |(fx, extra_c, extra_e)| {
            let out = run_expansion(&fx);
            let gold_keys: BTreeSet<(String, String)> =
                fx.gold.iter().map(|(c, e, _)| (w(*c), w(*e))).collect();
            // Originals never come back.
            for p in &out {
                prop_assert!(!gold_keys.contains(&(p.cause.to_string(), p.effect.to_string())));
                prop_assert!(p.label.is_causal());
            }
            // Exactly the brute-force closure, with matching provenance.
            let brute = brute_closure(&fx.gold, &fx.synsets, &fx.classes);
            prop_assert_eq!(out.len(), brute.len());
            let got = keyed(&out);
            for ((c, e), (wn, vn)) in &brute {
                let want = match (wn, vn) {
                    (true, true) => Provenance::Both,
                    (true, false) => Provenance::Wordnet,
                    _ => Provenance::Verbnet,
                };
                prop_assert_eq!(got.get(&(w(*c), w(*e))), Some(&want));
            }
            // Cardinality bound: at most |G(c)|·|G(e)| − 1 per source and pair.
            let bound: usize = fx
                .gold
                .iter()
                .filter(|g| g.2)
                .map(|(c, e, _)| {
                    let wn = |x: &usize| fx.synsets.get(x).map_or(1, |s| s.len() + 1);
                    let vn = |x: &usize| {
                        fx.classes.iter().filter(|k| k.contains(x)).flatten().collect::<BTreeSet<_>>().len().max(1)
                    };
                    wn(c) * wn(e) - 1 + vn(c) * vn(e) - 1
                })
                .sum();
            prop_assert!(out.len() <= bound);
            // Monotone: another synonym entry only adds pairs.
            let mut more = fx.clone();
            if extra_c != extra_e {
                more.synsets.entry(extra_c).or_default().insert(extra_e);
            }
            let bigger: BTreeSet<(String, String)> =
                run_expansion(&more).iter().map(|p| (p.cause.to_string(), p.effect.to_string())).collect();
            for p in &out {
                prop_assert!(bigger.contains(&(p.cause.to_string(), p.effect.to_string())));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!(
        "fixture closure has {} pairs as enumerated by hand; 500 random fixtures pass exclusion, closure, cardinality and monotonicity",
        expected.len()
    ))
}

// ---------------------------------------------------------------- 5

fn fixture_config(output_dir: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::load(&fixtures().join("synthetic/knowdis.toml")).unwrap();
    cfg.paths.output_dir = output_dir.to_path_buf();
    cfg
}

fn run_chain_stages(cfg: &PipelineConfig, workers: usize) -> Result<BTreeMap<String, DatasetManifest>, String> {
    let ctx = StageContext { config: cfg, workers };
    STAGES
        .iter()
        .map(|s| run_stage(s, &ctx).map(|m| (s.to_string(), m)).map_err(|e| format!("{s}: {e}")))
        .collect()
}

fn criterion_5() -> Outcome {
    let fx = fixtures().join("synthetic");
    let corpus_lines = std::fs::read_to_string(fx.join("corpus.jsonl")).unwrap().lines().count();
    let gold_pairs = std::fs::read_to_string(fx.join("gold_pairs.tsv")).unwrap().lines().count();
    let copa = std::fs::read_to_string(fx.join("copa.jsonl")).unwrap().lines().count();
    ensure(corpus_lines >= 1000 && gold_pairs >= 20 && copa >= 50, || {
        format!("fixture too small: {corpus_lines} corpus, {gold_pairs} pairs, {copa} copa")
    })?;
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let runs: Vec<BTreeMap<String, DatasetManifest>> = [1usize, 1, 4]
        .iter()
        .zip(&dirs)
        .map(|(workers, dir)| run_chain_stages(&fixture_config(dir.path()), *workers))
        .collect::<Result<_, _>>()?;
    for stage in STAGES {
        let prints: Vec<String> = runs.iter().map(|r| r[*stage].fingerprint()).collect();
        ensure(prints[0] == prints[1], || format!("{stage}: run 1 and run 2 differ"))?;
        ensure(prints[0] == prints[2], || format!("{stage}: 1 and 4 workers differ"))?;
    }
    let dn = runs[0]["annotate"].counts["instances"];
    Ok(format!(
        "{} stage manifests identical across 2 runs and 1 vs 4 workers ({corpus_lines} corpus sentences, {gold_pairs} gold pairs, {copa} COPA records, |D_n| = {dn})",
        STAGES.len()
    ))
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let causes: Vec<String> = (0..10).map(|i| format!("cause{i}")).collect();
    let effects: Vec<String> = (0..10).map(|i| format!("effect{i}")).collect();
    let noise: Vec<String> = (0..10).map(|i| format!("noise{i}")).collect();
    let pair = |c: &str, e: &str, label| EventPair::gold(c, e, label).unwrap();
    let planted: BTreeSet<(usize, usize)> = (0..10).map(|i| (i, (i * 3 + 1) % 10)).collect();

    let mut recalls = Vec::new();
    let mut gaps = Vec::new();
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let mut pos = BTreeSet::new();
        for (i, c) in causes.iter().enumerate() {
            for (j, e) in effects.iter().enumerate() {
                if !planted.contains(&(i, j)) {
                    pos.insert(pair(c, e, PairLabel::Causal));
                }
            }
        }
        let mut neg = BTreeSet::new();
        for k in 0..10 {
            for _ in 0..4 {
                neg.insert(pair(&noise[k], &effects[rng.gen_range(0..10)], PairLabel::Noncausal));
                neg.insert(pair(&causes[rng.gen_range(0..10)], &noise[k], PairLabel::Noncausal));
            }
            neg.insert(pair(&effects[k], &causes[rng.gen_range(0..10)], PairLabel::Noncausal));
        }
        let mut candidates: BTreeSet<EventPair> =
            planted.iter().map(|(i, j)| pair(&causes[*i], &effects[*j], PairLabel::Causal)).collect();
        let keys: BTreeSet<(String, String)> = neg.iter().map(|p| (p.cause.to_string(), p.effect.to_string())).collect();
        while candidates.len() < 100 {
            let (c, e) = match rng.gen_range(0..3) {
                0 => (noise.choose(&mut rng).unwrap(), effects.choose(&mut rng).unwrap()),
                1 => (causes.choose(&mut rng).unwrap(), noise.choose(&mut rng).unwrap()),
                _ => (effects.choose(&mut rng).unwrap(), causes.choose(&mut rng).unwrap()),
            };
            if !keys.contains(&(c.clone(), e.clone())) {
                candidates.insert(pair(c, e, PairLabel::Causal));
            }
        }
        let config = MarginConfig {
            dim: 16,
            epochs: 200,
            seed,
            ..MarginConfig::default()
        };
        let space = train(&pos, &neg, &config).map_err(|e| e.to_string())?;
        let mean = |set: &BTreeSet<EventPair>| {
            set.iter().map(|p| space.distance(p).unwrap()).sum::<f64>() / set.len() as f64
        };
        let (dp, dn) = (mean(&pos), mean(&neg));
        ensure(dp < dn, || format!("seed {seed}: mean causal distance {dp:.3} >= non-causal {dn:.3}"))?;
        gaps.push(dn - dp);
        let ranking = rank_candidates(&space, &candidates);
        let top = filter_top(&ranking.ranked, 0.10).map_err(|e| e.to_string())?;
        let hits = top
            .iter()
            .filter(|p| {
                let c = causes.iter().position(|x| x == p.cause.as_str());
                let e = effects.iter().position(|x| x == p.effect.as_str());
                matches!((c, e), (Some(c), Some(e)) if planted.contains(&(c, e)))
            })
            .count();
        recalls.push(hits as f64 / planted.len() as f64);
    }
    let mean_recall = recalls.iter().sum::<f64>() / recalls.len() as f64;
    ensure(mean_recall >= 0.8, || format!("recall per seed {recalls:?}"))?;
    Ok(format!(
        "mean causal distance below non-causal on all 5 seeds (min gap {:.3}); top-10% recall {recalls:?}, mean {mean_recall:.2}",
        gaps.iter().cloned().fold(f64::INFINITY, f64::min)
    ))
}

// ---------------------------------------------------------------- 7

fn mean_f1(res: &Resources, corpus: &[u8], base: &PipelineConfig, ablation: Ablation) -> Result<(f64, Vec<f64>), String> {
    let mut scores = Vec::new();
    for seed in 0..3u64 {
        let mut cfg = base.clone();
        cfg.ablation = ablation;
        cfg.set_seed(seed);
        let cv = cross_validate(res, corpus, &cfg, 1, 2).map_err(|e| e.to_string())?;
        scores.push(cv.report.f1);
    }
    Ok((scores.iter().sum::<f64>() / scores.len() as f64, scores))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let base = fixture_config(dir.path());
    let res = Resources::load(&base).map_err(|e| e.to_string())?;
    let corpus = std::fs::read(&res.corpus_path).unwrap();
    let (full, full_s) = mean_f1(&res, &corpus, &base, Ablation::default())?;
    let (gold, gold_s) = mean_f1(&res, &corpus, &base, Ablation::gold_only())?;
    let (unf, unf_s) = mean_f1(&res, &corpus, &base, Ablation::unfiltered())?;
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "mean F1 over 3 seeds: augmented {full:.4} {full_s:.3?}, gold-only {gold:.4} {gold_s:.3?}, unfiltered D_n {unf:.4} {unf_s:.3?}; {secs:.1}s"
    );
    ensure(full >= gold, || format!("augmented below gold-only: {detail}"))?;
    ensure(full >= unf, || format!("full below unfiltered: {detail}"))?;
    ensure(secs < 120.0, || format!("too slow: {detail}"))?;
    Ok(detail)
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let variants: Vec<(&str, Ablation)> = vec![
        ("full", Ablation::default()),
        ("no connectives", Ablation { connectives: false, ..Default::default() }),
        ("no cs scoring", Ablation { cs_scoring: false, ..Default::default() }),
        ("no relabel", Ablation { relabel: false, ..Default::default() }),
        ("no anneal", Ablation { anneal: false, ..Default::default() }),
    ];
    let mut prints: BTreeMap<String, &str> = BTreeMap::new();
    let mut parts = Vec::new();
    for (name, ablation) in &variants {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = fixture_config(dir.path());
        cfg.ablation = *ablation;
        let ctx = StageContext { config: &cfg, workers: 2 };
        let mut manifest = run_stage("evaluate", &ctx).map_err(|e| format!("{name}: {e}"))?;
        let report = load_report(&cfg).map_err(|e| e.to_string())?;
        ensure(report.f1.is_finite() && (0.0..=1.0).contains(&report.f1), || format!("{name}: F1 {}", report.f1))?;
        // Distinct on content alone, not on the recorded ablation label.
        manifest.inputs.remove("ablation");
        if let Some(other) = prints.insert(manifest.fingerprint(), name) {
            return Err(format!("{name} and {other} produced the same manifest"));
        }
        parts.push(format!("{name} F1 {:.4}", report.f1));
    }
    Ok(format!("{} distinct evaluate manifests; {}", variants.len(), parts.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("formula oracle equivalence", criterion_1),
        ("gradient checks", criterion_2),
        ("threshold arithmetic", criterion_3),
        ("expansion correctness", criterion_4),
        ("pipeline determinism", criterion_5),
        ("ranking separation", criterion_6),
        ("end-to-end augmentation benefit", criterion_7),
        ("ablation switches", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
