use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use super::synset::csv_lemmas;
use super::Lemma;
use crate::util::{numbered_lines, open_reader};
use crate::{Error, Result};

pub type ClassId = String;

/// Verb classes and their member lemmas, indexed both ways.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerbClassIndex {
    classes: BTreeMap<Lemma, BTreeSet<ClassId>>,
    members: BTreeMap<ClassId, BTreeSet<Lemma>>,
}

static NO_CLASSES: BTreeSet<ClassId> = BTreeSet::new();
static NO_MEMBERS: BTreeSet<Lemma> = BTreeSet::new();

impl VerbClassIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_class(&mut self, class: &str, members: impl IntoIterator<Item = Lemma>) {
        let set = self.members.entry(class.to_string()).or_default();
        for m in members {
            self.classes
                .entry(m.clone())
                .or_default()
                .insert(class.to_string());
            set.insert(m);
        }
    }

    pub fn classes(&self, lemma: &Lemma) -> &BTreeSet<ClassId> {
        self.classes.get(lemma).unwrap_or(&NO_CLASSES)
    }

    pub fn members(&self, class: &str) -> &BTreeSet<Lemma> {
        self.members.get(class).unwrap_or(&NO_MEMBERS)
    }

    pub fn class_count(&self) -> usize {
        self.members.len()
    }

    /// Every lemma sharing a class with `lemma`, plus `lemma` itself.
    pub fn class_mates(&self, lemma: &Lemma) -> BTreeSet<Lemma> {
        let mut out: BTreeSet<Lemma> = self
            .classes(lemma)
            .iter()
            .flat_map(|c| self.members(c).iter().cloned())
            .collect();
        out.insert(lemma.clone());
        out
    }

    /// `l ∈ members(c) ⇔ c ∈ classes(l)`.
    pub fn is_consistent(&self) -> bool {
        let forward = self
            .members
            .iter()
            .all(|(c, ms)| ms.iter().all(|m| self.classes(m).contains(c)));
        let backward = self
            .classes
            .iter()
            .all(|(l, cs)| cs.iter().all(|c| self.members(c).contains(l)));
        forward && backward
    }
}

/// Loads `classid<TAB>member1,member2,…` records.
pub fn load_verbclass_index(path: &Path) -> Result<VerbClassIndex> {
    read_verbclass_index(open_reader(path)?, path)
}

pub fn read_verbclass_index<R: BufRead>(reader: R, path: &Path) -> Result<VerbClassIndex> {
    let name = path.display().to_string();
    let mut index = VerbClassIndex::new();
    for item in numbered_lines(reader, path) {
        let (lineno, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let (class, members) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(&name, lineno, "expected classid<TAB>members"))?;
        let class = class.trim();
        if class.is_empty() || members.contains('\t') {
            return Err(Error::parse(&name, lineno, "expected classid<TAB>members"));
        }
        let members = csv_lemmas(members).map_err(|m| Error::parse(&name, lineno, m))?;
        index.add_class(class, members);
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<VerbClassIndex> {
        read_verbclass_index(s.as_bytes(), Path::new("vn.tsv"))
    }

    fn l(s: &str) -> Lemma {
        Lemma::new(s).unwrap()
    }

    #[test]
    fn bidirectional_mapping() {
        let idx = parse("murder-42.1\tkill,murder\n").unwrap();
        assert_eq!(idx.classes(&l("kill")), &BTreeSet::from(["murder-42.1".to_string()]));
        assert_eq!(idx.members("murder-42.1"), &BTreeSet::from([l("kill"), l("murder")]));
        assert!(idx.is_consistent());
    }

    #[test]
    fn lemma_in_two_classes() {
        let idx = parse("murder-42.1\tkill,murder\ndestroy-44\tkill,ruin\n").unwrap();
        assert_eq!(idx.classes(&l("kill")).len(), 2);
        assert_eq!(idx.class_mates(&l("kill")), BTreeSet::from([l("kill"), l("murder"), l("ruin")]));
    }

    #[test]
    fn empty_member_list() {
        let idx = parse("lonely-1\t\n").unwrap();
        assert_eq!(idx.class_count(), 1);
        assert!(idx.members("lonely-1").is_empty());
        assert!(idx.is_consistent());
    }

    #[test]
    fn malformed() {
        let err = parse("a-1\tx\nno tab here\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse("a-1\tx\ty\n").is_err());
    }
}
