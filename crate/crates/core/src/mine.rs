//! Mining the NPN classes that occur as 5-leaf cut functions in a corpus,
//! and reading and writing the resulting class lists.

use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::aig::{Aig, NodeId};
use crate::cut::{cut_truth, enumerate_cuts};
use crate::truth::{canonicalize, is_canonical, TruthTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassListError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Occurrence counts of canonical classes over the 5-leaf cuts seen so far.
#[derive(Clone, Debug, Default)]
pub struct ClassCounts {
    counts: FxHashMap<TruthTable, u64>,
    cache: FxHashMap<TruthTable, TruthTable>,
    pub cuts: u64,
}

impl ClassCounts {
    pub fn add_aig(&mut self, aig: &Aig, cut_cap: usize) {
        let cuts = enumerate_cuts(aig, 5, cut_cap).expect("valid cut size");
        for i in 0..aig.num_nodes() {
            let id = NodeId(i as u32);
            if !aig.is_and(id) {
                continue;
            }
            for c in cuts.of(id).iter().filter(|c| c.len() == 5) {
                let tt = cut_truth(aig, id, c).expect("enumerated cut is valid");
                let canon = *self.cache.entry(tt).or_insert_with(|| canonicalize(tt).0);
                *self.counts.entry(canon).or_insert(0) += 1;
                self.cuts += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &ClassCounts) {
        for (&k, &v) in &other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self.cuts += other.cuts;
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, canon: TruthTable) -> u64 {
        self.counts.get(&canon).copied().unwrap_or(0)
    }

    /// Classes seen at least `min_occurrences` times, most frequent first,
    /// ties by truth table.
    pub fn select(&self, min_occurrences: u64) -> Vec<(TruthTable, u64)> {
        let mut v: Vec<(TruthTable, u64)> = self
            .counts
            .iter()
            .filter(|(_, &c)| c >= min_occurrences)
            .map(|(&t, &c)| (t, c))
            .collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }
}

pub fn mine_practical_classes<'a>(
    corpus: impl IntoIterator<Item = &'a Aig>,
    min_occurrences: u64,
    cut_cap: usize,
) -> Vec<(TruthTable, u64)> {
    let mut counts = ClassCounts::default();
    for aig in corpus {
        counts.add_aig(aig, cut_cap);
    }
    counts.select(min_occurrences)
}

pub fn format_class_list(classes: &[(TruthTable, u64)]) -> String {
    let mut s = String::new();
    for (t, c) in classes {
        let _ = writeln!(s, "{t} {c}");
    }
    s
}

/// Parses `<tt_hex8> <count>` lines; `#` starts a comment. Every table must
/// be a canonical representative.
pub fn parse_class_list(text: &str) -> Result<Vec<(TruthTable, u64)>, ClassListError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ClassListError::Parse { line: i + 1, msg };
        let f: Vec<&str> = line.split_whitespace().collect();
        let [tt, count] = f.as_slice() else {
            return Err(err(format!("expected `<tt_hex8> <count>`, got `{line}`")));
        };
        let tt: TruthTable = tt.parse().map_err(|e| err(format!("{e}")))?;
        let count: u64 = count.parse().map_err(|_| err(format!("bad count `{count}`")))?;
        if !is_canonical(tt) {
            return Err(err(format!("{tt} is not a canonical representative")));
        }
        out.push((tt, count));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::DEFAULT_CUT_CAP;
    use crate::synthetic::{random_aig, Template};
    use crate::truth::canonical_form;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_corpus() {
        assert!(mine_practical_classes([], 1, DEFAULT_CUT_CAP).is_empty());
    }

    #[test]
    fn single_and5_cone() {
        let mut aig = Aig::new(5);
        let mut acc = aig.input(0);
        for i in 1..5 {
            acc = aig.add_and(acc, aig.input(i)).unwrap();
        }
        aig.add_output(acc).unwrap();
        let classes = mine_practical_classes([&aig], 1, DEFAULT_CUT_CAP);
        assert_eq!(classes, vec![(canonical_form(Template::And5.function()), 1)]);
    }

    #[test]
    fn threshold_is_monotone_and_sorted() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let corpus: Vec<Aig> = (0..5).map(|_| random_aig(&mut rng, 10, 150)).collect();
        let all = mine_practical_classes(&corpus, 1, DEFAULT_CUT_CAP);
        let some = mine_practical_classes(&corpus, 20, DEFAULT_CUT_CAP);
        assert!(!all.is_empty());
        for x in &some {
            assert!(all.contains(x));
            assert!(x.1 >= 20);
        }
        assert!(all
            .windows(2)
            .all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0)));
        assert!(all.iter().all(|&(t, _)| is_canonical(t)));
    }

    #[test]
    fn class_list_round_trip() {
        let list = vec![(TruthTable(0x0000_00ff), 30), (TruthTable(0x0000_ffff), 2)];
        let text = format_class_list(&list);
        assert_eq!(text, "000000ff 30\n0000ffff 2\n");
        let with_comments = format!("# mined\n\n{text}  # trailing\n");
        assert_eq!(parse_class_list(&with_comments).unwrap(), list);
        assert!(parse_class_list("aaaaaaaa 3\n").is_err());
        assert!(parse_class_list("0000ffff\n").is_err());
        assert!(parse_class_list("0000ffff x\n").is_err());
        assert!(matches!(
            parse_class_list("# hi\nzz 1\n"),
            Err(ClassListError::Parse { line: 2, .. })
        ));
    }
}
