use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;

use super::copa::CausePairText;
use crate::lexicon::Lemma;
use crate::util::{create_writer, numbered_lines, open_reader};
use crate::{Error, Result};

/// Cause-side × effect-side word co-occurrence counts.
///
/// `f(i, j)` counts how often cause-side lemma `i` and effect-side lemma `j`
/// appear together in one (cause text, effect text) pair, per occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CooccurrenceTable {
    counts: HashMap<Lemma, HashMap<Lemma, u64>>,
    row_sum: HashMap<Lemma, u64>,
    col_sum: HashMap<Lemma, u64>,
    total: u64,
    pairs: u64,
}

impl CooccurrenceTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn bump(&mut self, cause: &Lemma, effect: &Lemma, by: u64) {
        if by == 0 {
            return;
        }
        *self
            .counts
            .entry(cause.clone())
            .or_default()
            .entry(effect.clone())
            .or_default() += by;
        *self.row_sum.entry(cause.clone()).or_default() += by;
        *self.col_sum.entry(effect.clone()).or_default() += by;
        self.total += by;
    }

    pub fn ingest(&mut self, pair: &CausePairText) {
        for c in &pair.cause_tokens {
            for e in &pair.effect_tokens {
                self.bump(c, e, 1);
            }
        }
        self.pairs += 1;
    }

    /// Adds another partial table.
    pub fn merge(&mut self, other: &CooccurrenceTable) {
        for (c, e, n) in other.cells() {
            self.bump(c, e, n);
        }
        self.pairs += other.pairs;
    }

    /// `f(i, j)`.
    pub fn count(&self, cause: &Lemma, effect: &Lemma) -> u64 {
        self.counts
            .get(cause)
            .and_then(|row| row.get(effect))
            .copied()
            .unwrap_or(0)
    }

    /// `Σ_w f(i, w)`.
    pub fn row_sum(&self, cause: &Lemma) -> u64 {
        self.row_sum.get(cause).copied().unwrap_or(0)
    }

    /// `Σ_w f(w, j)`.
    pub fn col_sum(&self, effect: &Lemma) -> u64 {
        self.col_sum.get(effect).copied().unwrap_or(0)
    }

    /// `M`, the total co-occurrence count.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// `N`, the number of text pairs ingested.
    pub fn pair_count(&self) -> u64 {
        self.pairs
    }

    pub fn vocabulary(&self) -> BTreeSet<&Lemma> {
        self.cells().flat_map(|(c, e, _)| [c, e]).collect()
    }

    fn cells(&self) -> impl Iterator<Item = (&Lemma, &Lemma, u64)> {
        self.counts
            .iter()
            .flat_map(|(c, row)| row.iter().map(move |(e, n)| (c, e, *n)))
    }

    pub fn nonzero_cells(&self) -> usize {
        self.counts.values().map(HashMap::len).sum()
    }

    pub fn is_consistent(&self) -> bool {
        self.row_sum.values().sum::<u64>() == self.total
            && self.col_sum.values().sum::<u64>() == self.total
            && self.cells().map(|(_, _, n)| n).sum::<u64>() == self.total
    }

    /// Cells in (cause, effect) order.
    pub fn sorted_cells(&self) -> Vec<(&Lemma, &Lemma, u64)> {
        let mut cells: Vec<_> = self.cells().collect();
        cells.sort();
        cells
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = create_writer(path)?;
        let io = |e| Error::io(path, e);
        writeln!(w, "#N\t{}", self.pairs).map_err(io)?;
        for (c, e, n) in self.sorted_cells() {
            writeln!(w, "{c}\t{e}\t{n}").map_err(io)?;
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
            .ok_or_else(|| Error::parse(&name, 1, "missing #N header"))?;
        let pairs = header
            .strip_prefix("#N\t")
            .and_then(|n| n.trim().parse::<u64>().ok())
            .ok_or_else(|| Error::parse(&name, 1, "expected #N<TAB>count header"))?;
        let mut table = CooccurrenceTable { pairs, ..Default::default() };
        for item in lines {
            let (lineno, line) = item?;
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::parse(&name, lineno, m);
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(err("expected lemma_c<TAB>lemma_e<TAB>count".into()));
            }
            let c = Lemma::new(fields[0]).map_err(|e| err(e.to_string()))?;
            let e = Lemma::new(fields[1]).map_err(|e| err(e.to_string()))?;
            let n = fields[2].parse::<u64>().map_err(|e| err(e.to_string()))?;
            table.bump(&c, &e, n);
        }
        Ok(table)
    }
}

/// Counts every (cause token, effect token) combination of every pair.
pub fn build_table(pairs: &[CausePairText]) -> CooccurrenceTable {
    let mut table = CooccurrenceTable::new();
    for p in pairs {
        table.ingest(p);
    }
    table
}
