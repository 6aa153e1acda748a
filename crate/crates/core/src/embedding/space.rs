use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::lexicon::{EventPair, Lemma};
use crate::util::{create_writer, numbered_lines, open_reader};
use crate::{Error, Result};

pub const RELATION_KEY: &str = "__relation__";
const HEADER: &str = "#knowdis-embedding\tv1";

/// Entity vectors plus a single causal translation vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    dim: usize,
    pub(crate) entity: BTreeMap<Lemma, Vec<f64>>,
    pub(crate) relation: Vec<f64>,
}

impl EmbeddingSpace {
    pub fn new(dim: usize) -> Self {
        EmbeddingSpace {
            dim,
            entity: BTreeMap::new(),
            relation: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn relation(&self) -> &[f64] {
        &self.relation
    }

    pub fn set_relation(&mut self, v: Vec<f64>) -> Result<()> {
        self.check_vector("relation", &v)?;
        self.relation = v;
        Ok(())
    }

    pub fn insert(&mut self, lemma: Lemma, v: Vec<f64>) -> Result<()> {
        self.check_vector(lemma.as_str(), &v)?;
        self.entity.insert(lemma, v);
        Ok(())
    }

    pub fn vector(&self, lemma: &Lemma) -> Option<&[f64]> {
        self.entity.get(lemma).map(Vec::as_slice)
    }

    pub fn contains(&self, lemma: &Lemma) -> bool {
        self.entity.contains_key(lemma)
    }

    pub fn len(&self) -> usize {
        self.entity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entity.is_empty()
    }

    /// Multiplies every vector, relation included, by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for v in self.entity.values_mut().chain(std::iter::once(&mut self.relation)) {
            v.iter_mut().for_each(|x| *x *= factor);
        }
    }

    fn check_vector(&self, what: &str, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Config(format!(
                "vector for {what} has length {}, expected {}",
                v.len(),
                self.dim
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!("vector for {what} is not finite")));
        }
        Ok(())
    }

    /// `‖v(cause) + relation − v(effect)‖₂`.
    pub fn distance(&self, pair: &EventPair) -> Result<f64> {
        let h = self
            .vector(&pair.cause)
            .ok_or_else(|| Error::MissingEmbedding(pair.cause.to_string()))?;
        let t = self
            .vector(&pair.effect)
            .ok_or_else(|| Error::MissingEmbedding(pair.effect.to_string()))?;
        Ok(translation_distance(h, &self.relation, t))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = create_writer(path)?;
        let io = |e| Error::io(path, e);
        writeln!(w, "{HEADER}\tdim={}", self.dim).map_err(io)?;
        writeln!(w, "{RELATION_KEY}\t{}", join(&self.relation)).map_err(io)?;
        for (lemma, v) in &self.entity {
            writeln!(w, "{lemma}\t{}", join(v)).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(open_reader(path)?, path)
    }

    pub fn read<R: BufRead>(reader: R, path: &Path) -> Result<Self> {
        let name = path.display().to_string();
        let mut lines = numbered_lines(reader, path);
        let (_, header) = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::parse(&name, 1, "missing header"))?;
        let dim = header
            .strip_prefix(HEADER)
            .and_then(|rest| rest.trim().strip_prefix("dim="))
            .and_then(|d| d.parse::<usize>().ok())
            .ok_or_else(|| Error::parse(&name, 1, "bad embedding header"))?;
        let mut space = EmbeddingSpace::new(dim);
        let mut saw_relation = false;
        for item in lines {
            let (lineno, line) = item?;
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::parse(&name, lineno, m);
            let (key, values) = line
                .split_once('\t')
                .ok_or_else(|| err("expected key<TAB>values".into()))?;
            let v = values
                .split(',')
                .map(|x| x.parse::<f64>().map_err(|e| err(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            if key == RELATION_KEY {
                space.set_relation(v).map_err(|e| err(e.to_string()))?;
                saw_relation = true;
            } else {
                let lemma = Lemma::new(key).map_err(|e| err(e.to_string()))?;
                space.insert(lemma, v).map_err(|e| err(e.to_string()))?;
            }
        }
        if !saw_relation {
            return Err(Error::parse(&name, 1, "missing __relation__ row"));
        }
        Ok(space)
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub(crate) fn translation_distance(head: &[f64], relation: &[f64], tail: &[f64]) -> f64 {
    head.iter()
        .zip(relation)
        .zip(tail)
        .map(|((h, r), t)| {
            let d = h + r - t;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::PairLabel;

    fn l(s: &str) -> Lemma {
        Lemma::new(s).unwrap()
    }

    fn pair(c: &str, e: &str) -> EventPair {
        EventPair::gold(c, e, PairLabel::Causal).unwrap()
    }

    #[test]
    fn identity_distance_is_zero() {
        let mut s = EmbeddingSpace::new(2);
        s.insert(l("a"), vec![0.3, 0.4]).unwrap();
        s.insert(l("b"), vec![0.3, 0.4]).unwrap();
        assert_eq!(s.distance(&pair("a", "b")).unwrap(), 0.0);
    }

    #[test]
    fn unit_distance() {
        let mut s = EmbeddingSpace::new(2);
        s.insert(l("a"), vec![1.0, 0.0]).unwrap();
        s.insert(l("b"), vec![0.0, 0.0]).unwrap();
        assert_eq!(s.distance(&pair("a", "b")).unwrap(), 1.0);
    }

    #[test]
    fn five_dim_matches_hand_norm() {
        let h = [0.25, -1.5, 2.0, 0.0, 0.75];
        let r = [0.5, 0.5, -0.25, 1.0, 0.0];
        let t = [1.0, 0.0, 1.0, -1.0, 0.25];
        // h + r - t = (-0.25, -1.0, 0.75, 2.0, 0.5); squares sum to 5.875
        let mut s = EmbeddingSpace::new(5);
        s.insert(l("h"), h.to_vec()).unwrap();
        s.insert(l("t"), t.to_vec()).unwrap();
        s.set_relation(r.to_vec()).unwrap();
        assert!((s.distance(&pair("h", "t")).unwrap() - 5.875f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unknown_lemma_is_named() {
        let mut s = EmbeddingSpace::new(1);
        s.insert(l("a"), vec![1.0]).unwrap();
        match s.distance(&pair("a", "zebra")) {
            Err(Error::MissingEmbedding(name)) => assert_eq!(name, "zebra"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        let mut s = EmbeddingSpace::new(2);
        assert!(s.insert(l("a"), vec![1.0]).is_err());
        assert!(s.insert(l("a"), vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn file_round_trip_is_exact() {
        let mut s = EmbeddingSpace::new(3);
        s.insert(l("a"), vec![0.1, -1.0 / 3.0, 1e-300]).unwrap();
        s.insert(l("b"), vec![std::f64::consts::PI, 0.0, -2.5]).unwrap();
        s.set_relation(vec![0.7, 0.2, -0.123456789012345]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.tsv");
        s.save(&path).unwrap();
        assert_eq!(EmbeddingSpace::load(&path).unwrap(), s);
    }
}
