//! Candidate circuits for NPN classes of 5-input functions.
//!
//! The forest is a flat list of AND/XOR nodes over five variables; the
//! circuit table maps each covered canonical truth table to the cheapest
//! forest literals found for it. Generation grows the forest pair by pair,
//! admitting a node only when it is the cheapest known realization of its
//! exact function and not beaten by the stored candidates of its class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::truth::{canonicalize, is_canonical, TruthTable, NUM_VARS};

/// Number of seed nodes: the constant and one per variable.
pub const NUM_SEEDS: usize = 1 + NUM_VARS;

pub const DEFAULT_U: usize = 60;
pub const DEFAULT_N_MAX: usize = 10_000_000;

const DB_MAGIC: &str = "AIGRW5DB";
const DB_VERSION: u32 = 1;

/// Node reference plus complement bit, encoded as `2 * id + c`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ForestLit(pub u32);

impl ForestLit {
    pub const FALSE: ForestLit = ForestLit(0);

    pub fn new(node: usize, complement: bool) -> ForestLit {
        ForestLit(((node as u32) << 1) | complement as u32)
    }

    pub fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn var(i: usize) -> ForestLit {
        ForestLit::new(1 + i, false)
    }
}

impl std::ops::Not for ForestLit {
    type Output = ForestLit;
    fn not(self) -> ForestLit {
        ForestLit(self.0 ^ 1)
    }
}

impl fmt::Display for ForestLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ForestKind {
    Const0,
    Var(u8),
    And,
    Xor,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GateKind {
    And,
    Xor,
}

impl GateKind {
    fn weight(self) -> u32 {
        match self {
            GateKind::And => 1,
            GateKind::Xor => 2,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ForestNode {
    pub kind: ForestKind,
    pub fanins: [ForestLit; 2],
    pub tt: TruthTable,
    pub cost: u32,
}

#[derive(Debug, Error)]
pub enum ForestError {
    #[error("practical class {0} is not a canonical truth table")]
    NonCanonical(TruthTable),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported database version {0}")]
    Version(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> ForestError {
    ForestError::Parse { line, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    nodes: Vec<ForestNode>,
}

impl Default for Forest {
    fn default() -> Self {
        Forest::new()
    }
}

impl Forest {
    /// The seeded forest: constant zero at id 0, variable `i` at id `1 + i`.
    pub fn new() -> Forest {
        let mut nodes = Vec::with_capacity(NUM_SEEDS);
        nodes.push(ForestNode {
            kind: ForestKind::Const0,
            fanins: [ForestLit::FALSE; 2],
            tt: TruthTable::ZERO,
            cost: 0,
        });
        for i in 0..NUM_VARS {
            nodes.push(ForestNode {
                kind: ForestKind::Var(i as u8),
                fanins: [ForestLit::FALSE; 2],
                tt: TruthTable::var(i),
                cost: 0,
            });
        }
        Forest { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &ForestNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[ForestNode] {
        &self.nodes
    }

    pub fn lit_tt(&self, l: ForestLit) -> TruthTable {
        let tt = self.nodes[l.node()].tt;
        if l.is_complemented() {
            !tt
        } else {
            tt
        }
    }

    pub fn lit_cost(&self, l: ForestLit) -> u32 {
        self.nodes[l.node()].cost
    }

    fn gate_tt(&self, kind: GateKind, a: ForestLit, b: ForestLit) -> TruthTable {
        match kind {
            GateKind::And => self.lit_tt(a) & self.lit_tt(b),
            GateKind::Xor => self.lit_tt(a) ^ self.lit_tt(b),
        }
    }

    /// Appends a gate whose cost is already known. Fanins must exist.
    fn push(&mut self, kind: GateKind, a: ForestLit, b: ForestLit, cost: u32) -> usize {
        let tt = self.gate_tt(kind, a, b);
        self.nodes.push(ForestNode {
            kind: match kind {
                GateKind::And => ForestKind::And,
                GateKind::Xor => ForestKind::Xor,
            },
            fanins: [a, b],
            tt,
            cost,
        });
        self.nodes.len() - 1
    }

    /// Gate ids in the cone of `l`, ascending. Seeds are not included.
    pub fn cone(&self, l: ForestLit) -> Vec<u32> {
        let mut out = BTreeSet::new();
        let mut stack = vec![l.node()];
        while let Some(id) = stack.pop() {
            if id >= NUM_SEEDS && out.insert(id as u32) {
                stack.extend(self.nodes[id].fanins.iter().map(|f| f.node()));
            }
        }
        out.into_iter().collect()
    }

    fn cone_cost(&self, l: ForestLit) -> u32 {
        let gates = self.cone(l);
        gates
            .iter()
            .map(|&g| {
                if self.nodes[g as usize].kind == ForestKind::Xor {
                    2
                } else {
                    1
                }
            })
            .sum()
    }
}

/// Canonical truth table to candidate root literals, in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CircuitTable {
    entries: BTreeMap<TruthTable, Vec<ForestLit>>,
}

impl CircuitTable {
    pub fn get(&self, canon: TruthTable) -> Option<&[ForestLit]> {
        self.entries.get(&canon).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TruthTable, &[ForestLit])> {
        self.entries.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    pub fn num_candidates(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }
}

#[derive(Clone, Debug)]
pub struct GenOptions {
    /// Stop once at most this many practical classes are uncovered.
    pub u: usize,
    /// Forest size that triggers a reduction.
    pub n_max: usize,
    pub max_pairs: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            u: DEFAULT_U,
            n_max: DEFAULT_N_MAX,
            max_pairs: None,
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenOutcome {
    Covered,
    BudgetExhausted,
    /// Every pair was tried without reaching the coverage target.
    Saturated,
    /// A reduction could not bring the forest below `n_max`.
    NodeLimit,
}

#[derive(Clone, Debug)]
pub struct GenReport {
    pub outcome: GenOutcome,
    pub requested: usize,
    pub covered: usize,
    pub pairs: u64,
    pub reductions: usize,
    pub forest_size: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Admission {
    /// A cheaper or equal realization of the same function exists.
    FunctionKnown,
    /// The class already has strictly cheaper candidates.
    ClassBeaten,
    /// Added to the forest only.
    Stored(usize),
    /// Added to the forest and to the table.
    Candidate(usize),
}

/// Generation state: forest, table and the per-function minimum costs.
#[derive(Clone, Debug)]
pub struct Generator {
    forest: Forest,
    table: CircuitTable,
    cost_map: FxHashMap<TruthTable, u32>,
    practical: rustc_hash::FxHashSet<TruthTable>,
    uncovered: usize,
    stamp: Vec<u32>,
    epoch: u32,
    stack: Vec<usize>,
    reductions: usize,
}

impl Generator {
    pub fn new(practical: &[TruthTable]) -> Result<Generator, ForestError> {
        for &p in practical {
            if !is_canonical(p) {
                return Err(ForestError::NonCanonical(p));
            }
        }
        let forest = Forest::new();
        let mut cost_map = FxHashMap::default();
        for n in forest.nodes() {
            cost_map.insert(n.tt, 0);
        }
        let mut table = CircuitTable::default();
        table.entries.insert(TruthTable::ZERO, vec![ForestLit::FALSE]);
        // All variables share one class; store the literal that equals its
        // canonical form.
        let (var_canon, _) = canonicalize(TruthTable::var(0));
        let var_lit = (0..NUM_VARS)
            .flat_map(|i| [ForestLit::var(i), !ForestLit::var(i)])
            .find(|&l| forest.lit_tt(l) == var_canon)
            .expect("variable class representative");
        table.entries.insert(var_canon, vec![var_lit]);
        let practical: rustc_hash::FxHashSet<TruthTable> = practical.iter().copied().collect();
        let uncovered = practical.iter().filter(|p| !table.entries.contains_key(p)).count();
        Ok(Generator {
            forest,
            table,
            cost_map,
            practical,
            uncovered,
            stamp: Vec::new(),
            epoch: 0,
            stack: Vec::new(),
            reductions: 0,
        })
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn table(&self) -> &CircuitTable {
        &self.table
    }

    pub fn uncovered(&self) -> usize {
        self.uncovered
    }

    pub fn min_cost(&self, tt: TruthTable) -> Option<u32> {
        self.cost_map.get(&tt).copied()
    }

    pub fn into_parts(self) -> (Forest, CircuitTable) {
        (self.forest, self.table)
    }

    /// Weighted size of the union of the cones of two nodes.
    fn union_cost(&mut self, a: usize, b: usize) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        if self.stamp.len() < self.forest.len() {
            self.stamp.resize(self.forest.len(), 0);
        }
        let mut cost = 0;
        self.stack.clear();
        self.stack.push(a);
        self.stack.push(b);
        while let Some(id) = self.stack.pop() {
            if id < NUM_SEEDS || self.stamp[id] == self.epoch {
                continue;
            }
            self.stamp[id] = self.epoch;
            let n = &self.forest.nodes[id];
            cost += if n.kind == ForestKind::Xor { 2 } else { 1 };
            self.stack.push(n.fanins[0].node());
            self.stack.push(n.fanins[1].node());
        }
        cost
    }

    pub fn try_node(&mut self, kind: GateKind, a: ForestLit, b: ForestLit) -> Admission {
        let mut pair = None;
        self.try_node_cached(kind, a, b, &mut pair)
    }

    /// `pair` caches the union cost of the two fanin cones across the gate
    /// variants tried on one pair.
    fn try_node_cached(&mut self, kind: GateKind, a: ForestLit, b: ForestLit, pair: &mut Option<u32>) -> Admission {
        let t = self.forest.gate_tt(kind, a, b);
        let known = self.cost_map.get(&t).copied();
        if let Some(m) = known {
            let lower = self.forest.lit_cost(a).max(self.forest.lit_cost(b)) + kind.weight();
            if m <= lower {
                return Admission::FunctionKnown;
            }
        }
        let base = match *pair {
            Some(c) => c,
            None => {
                let c = self.union_cost(a.node(), b.node());
                *pair = Some(c);
                c
            }
        };
        let cost = base + kind.weight();
        if known.is_some_and(|m| m <= cost) {
            return Admission::FunctionKnown;
        }
        self.cost_map.insert(t, cost);
        let (canon, _) = canonicalize(t);
        let existing = self
            .table
            .entries
            .get(&canon)
            .and_then(|v| v.first())
            .map(|&l| self.forest.lit_cost(l));
        if existing.is_some_and(|c| c < cost) {
            return Admission::ClassBeaten;
        }
        let id = self.forest.push(kind, a, b, cost);
        if t != canon && t != !canon {
            return Admission::Stored(id);
        }
        let entry = self.table.entries.entry(canon).or_default();
        if existing.is_some_and(|c| c > cost) {
            entry.clear();
        }
        if existing.is_none() && self.practical.contains(&canon) {
            self.uncovered -= 1;
        }
        entry.push(ForestLit::new(id, t != canon));
        Admission::Candidate(id)
    }

    /// Drops every node outside the cones of the table literals and
    /// renumbers the rest in order. The cost map is kept.
    pub fn reduce(&mut self) {
        let mut keep = vec![false; self.forest.len()];
        keep[..NUM_SEEDS].iter_mut().for_each(|k| *k = true);
        let mut stack: Vec<usize> = self.table.entries.values().flatten().map(|l| l.node()).collect();
        while let Some(id) = stack.pop() {
            if !keep[id] {
                keep[id] = true;
                stack.extend(self.forest.nodes[id].fanins.iter().map(|f| f.node()));
            }
        }
        let mut map = vec![u32::MAX; self.forest.len()];
        let mut nodes = Vec::new();
        for (id, node) in self.forest.nodes.iter().enumerate() {
            if keep[id] {
                map[id] = nodes.len() as u32;
                let mut n = *node;
                if id >= NUM_SEEDS {
                    n.fanins = n
                        .fanins
                        .map(|f| ForestLit::new(map[f.node()] as usize, f.is_complemented()));
                }
                nodes.push(n);
            }
        }
        for lits in self.table.entries.values_mut() {
            for l in lits.iter_mut() {
                *l = ForestLit::new(map[l.node()] as usize, l.is_complemented());
            }
        }
        self.forest.nodes = nodes;
        self.stamp.clear();
        self.reductions += 1;
    }

    /// Runs the pair scan until a stopping condition holds.
    pub fn run(&mut self, opts: &GenOptions) -> GenReport {
        let start = Instant::now();
        let mut pairs = 0u64;
        let report = |g: &Generator, outcome, pairs| GenReport {
            outcome,
            requested: g.practical.len(),
            covered: g.practical.len() - g.uncovered,
            pairs,
            reductions: g.reductions,
            forest_size: g.forest.len(),
            elapsed: start.elapsed(),
        };
        if self.uncovered <= opts.u {
            return report(self, GenOutcome::Covered, pairs);
        }
        let mut i = 1;
        while i < self.forest.len() {
            let mut restart = false;
            for j in 0..i {
                let out_of_pairs = opts.max_pairs.is_some_and(|m| pairs >= m);
                let out_of_time = opts.time_limit.is_some_and(|t| start.elapsed() >= t);
                if out_of_pairs || out_of_time {
                    return report(self, GenOutcome::BudgetExhausted, pairs);
                }
                pairs += 1;
                let a = ForestLit::new(i, false);
                let b = ForestLit::new(j, false);
                let mut pair = None;
                self.try_node_cached(GateKind::And, a, b, &mut pair);
                self.try_node_cached(GateKind::And, !a, b, &mut pair);
                self.try_node_cached(GateKind::And, a, !b, &mut pair);
                self.try_node_cached(GateKind::And, !a, !b, &mut pair);
                self.try_node_cached(GateKind::Xor, a, b, &mut pair);
                if self.uncovered <= opts.u {
                    return report(self, GenOutcome::Covered, pairs);
                }
                if self.forest.len() > opts.n_max {
                    self.reduce();
                    log::debug!("reduced forest to {} nodes", self.forest.len());
                    if self.forest.len() > opts.n_max {
                        return report(self, GenOutcome::NodeLimit, pairs);
                    }
                    restart = true;
                    break;
                }
            }
            i = if restart { 1 } else { i + 1 };
        }
        report(self, GenOutcome::Saturated, pairs)
    }
}

/// Builds candidate circuits until at most `opts.u` of the given canonical
/// classes lack a candidate, or another stopping condition holds.
pub fn generate_best_circuits(
    practical: &[TruthTable],
    opts: &GenOptions,
) -> Result<(Forest, CircuitTable, GenReport), ForestError> {
    let mut g = Generator::new(practical)?;
    let report = g.run(opts);
    let (forest, table) = g.into_parts();
    Ok((forest, table, report))
}

/// A forest and table ready for rewriting, with the instantiation order of
/// every candidate precomputed.
#[derive(Clone, Debug)]
pub struct CandidateDb {
    forest: Forest,
    table: CircuitTable,
    cones: FxHashMap<ForestLit, Vec<u32>>,
}

impl PartialEq for CandidateDb {
    fn eq(&self, other: &Self) -> bool {
        self.forest == other.forest && self.table == other.table
    }
}

impl CandidateDb {
    pub fn new(forest: Forest, table: CircuitTable) -> CandidateDb {
        let mut cones = FxHashMap::default();
        for (_, lits) in table.iter() {
            for &l in lits {
                cones.entry(l.regular()).or_insert_with(|| forest.cone(l));
            }
        }
        CandidateDb { forest, table, cones }
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn table(&self) -> &CircuitTable {
        &self.table
    }

    pub fn candidates(&self, canon: TruthTable) -> &[ForestLit] {
        self.table.get(canon).unwrap_or(&[])
    }

    /// Gate ids of the candidate's cone in ascending (topological) order.
    pub fn cone(&self, l: ForestLit) -> &[u32] {
        self.cones.get(&l.regular()).map_or(&[], |v| v.as_slice())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{DB_MAGIC} {DB_VERSION}\nvars {NUM_VARS}\n");
        for (id, n) in self.forest.nodes.iter().enumerate().skip(NUM_SEEDS) {
            let k = if n.kind == ForestKind::Xor { "XOR" } else { "AND" };
            let _ = writeln!(s, "n {id} {k} {} {}", n.fanins[0], n.fanins[1]);
        }
        for (tt, lits) in self.table.iter() {
            let lits: Vec<String> = lits.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(s, "e {tt} {}", lits.join(","));
        }
        s
    }

    pub fn parse(text: &str) -> Result<CandidateDb, ForestError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l.split_whitespace().next() == Some(DB_MAGIC) => {
                let v = l.split_whitespace().nth(1).unwrap_or("");
                if v != DB_VERSION.to_string() || l.split_whitespace().count() != 2 {
                    return Err(ForestError::Version(v.to_string()));
                }
            }
            _ => return Err(parse_err(1, format!("expected `{DB_MAGIC} {DB_VERSION}` header"))),
        }
        match lines.next() {
            Some((_, l)) if l.trim() == format!("vars {NUM_VARS}") => {}
            _ => return Err(parse_err(2, format!("expected `vars {NUM_VARS}`"))),
        }
        let mut forest = Forest::new();
        let mut table = CircuitTable::default();
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                [] => {}
                ["n", id, kind, a, b] => {
                    if !table.is_empty() {
                        return Err(parse_err(ln, "node line after entry lines"));
                    }
                    let id: usize = id.parse().map_err(|_| parse_err(ln, "bad node id"))?;
                    if id != forest.len() {
                        return Err(parse_err(ln, format!("expected node id {}", forest.len())));
                    }
                    let kind = match *kind {
                        "AND" => GateKind::And,
                        "XOR" => GateKind::Xor,
                        k => return Err(parse_err(ln, format!("unknown gate kind `{k}`"))),
                    };
                    let a = parse_lit(ln, a, id)?;
                    let b = parse_lit(ln, b, id)?;
                    forest.push(kind, a, b, 0);
                    forest.nodes[id].cost = forest.cone_cost(ForestLit::new(id, false));
                }
                ["e", tt, lits] => {
                    let tt: TruthTable = tt.parse().map_err(|e| parse_err(ln, format!("{e}")))?;
                    if !is_canonical(tt) {
                        return Err(parse_err(ln, format!("entry key {tt} is not canonical")));
                    }
                    let mut v = Vec::new();
                    for s in lits.split(',') {
                        let l = parse_lit(ln, s, forest.len())?;
                        if forest.lit_tt(l) != tt {
                            return Err(parse_err(ln, format!("literal {l} does not realize {tt}")));
                        }
                        v.push(l);
                    }
                    if table.entries.insert(tt, v).is_some() {
                        return Err(parse_err(ln, format!("duplicate entry {tt}")));
                    }
                }
                _ => return Err(parse_err(ln, format!("unrecognized line `{line}`"))),
            }
        }
        Ok(CandidateDb::new(forest, table))
    }

    pub fn save(&self, path: &Path) -> Result<(), ForestError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<CandidateDb, ForestError> {
        CandidateDb::parse(&std::fs::read_to_string(path)?)
    }
}

impl ForestLit {
    pub fn regular(self) -> ForestLit {
        ForestLit(self.0 & !1)
    }
}

fn parse_lit(ln: usize, s: &str, bound: usize) -> Result<ForestLit, ForestError> {
    let v: u32 = s.parse().map_err(|_| parse_err(ln, format!("bad literal `{s}`")))?;
    let l = ForestLit(v);
    if l.node() >= bound {
        return Err(parse_err(ln, format!("literal {v} references an undefined node")));
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truth::{canonical_form, tt_op, TtOp};

    /// Cost by explicit reachability, independent of the generator.
    fn recount(forest: &Forest, l: ForestLit) -> u32 {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![l.node()];
        let mut cost = 0;
        while let Some(id) = stack.pop() {
            let n = forest.node(id);
            if !seen.insert(id) {
                continue;
            }
            match n.kind {
                ForestKind::And => cost += 1,
                ForestKind::Xor => cost += 2,
                _ => continue,
            }
            stack.push(n.fanins[0].node());
            stack.push(n.fanins[1].node());
        }
        cost
    }

    fn eval(forest: &Forest, l: ForestLit) -> TruthTable {
        let n = forest.node(l.node());
        let v = match n.kind {
            ForestKind::Const0 => TruthTable::ZERO,
            ForestKind::Var(i) => TruthTable::elementary(i as usize).unwrap(),
            ForestKind::And => eval(forest, n.fanins[0]) & eval(forest, n.fanins[1]),
            ForestKind::Xor => eval(forest, n.fanins[0]) ^ eval(forest, n.fanins[1]),
        };
        if l.is_complemented() {
            !v
        } else {
            v
        }
    }

    fn check_sound(forest: &Forest, table: &CircuitTable) {
        for (id, n) in forest.nodes().iter().enumerate() {
            let l = ForestLit::new(id, false);
            assert_eq!(n.tt, eval(forest, l));
            assert_eq!(n.cost, recount(forest, l));
            assert!(n.fanins.iter().all(|f| id < NUM_SEEDS || f.node() < id));
        }
        for (tt, lits) in table.iter() {
            assert_eq!(canonical_form(tt), tt);
            assert!(!lits.is_empty());
            let c = forest.lit_cost(lits[0]);
            for &l in lits {
                assert_eq!(eval(forest, l), tt);
                assert_eq!(forest.lit_cost(l), c);
            }
        }
    }

    fn x(i: usize) -> TruthTable {
        TruthTable::elementary(i).unwrap()
    }

    #[test]
    fn seeding_covers_variable_class() {
        let var = canonical_form(x(0));
        assert_eq!(var, TruthTable(0x0000_ffff));
        let (forest, table, report) = generate_best_circuits(
            &[var],
            &GenOptions {
                u: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(report.outcome, GenOutcome::Covered);
        assert_eq!(report.pairs, 0);
        assert_eq!(forest.len(), NUM_SEEDS);
        assert_eq!(table.len(), 2);
        check_sound(&forest, &table);
    }

    #[test]
    fn two_input_and_class() {
        let target = canonical_form(x(0) & x(1));
        let (forest, table, report) = generate_best_circuits(
            &[target],
            &GenOptions {
                u: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(report.outcome, GenOutcome::Covered);
        let lits = table.get(target).unwrap();
        assert_eq!(forest.lit_cost(lits[0]), 1);
        assert_eq!(forest.lit_tt(lits[0]), target);
        check_sound(&forest, &table);
    }

    #[test]
    fn rejects_non_canonical_practical() {
        assert!(matches!(Generator::new(&[x(0)]), Err(ForestError::NonCanonical(_))));
    }

    #[test]
    fn try_node_rules() {
        let mut g = Generator::new(&[]).unwrap();
        let v0 = ForestLit::var(0);
        let v1 = ForestLit::var(1);
        assert_eq!(g.try_node(GateKind::And, v0, v0), Admission::FunctionKnown);
        let id = admitted(g.try_node(GateKind::Xor, v0, v1)).node();
        assert_eq!(g.forest().node(id).cost, 2);
        assert_eq!(g.forest().node(id).tt, tt_op(TtOp::Xor, x(0), Some(x(1))));
        // Same function again, no cheaper.
        assert_eq!(g.try_node(GateKind::Xor, v1, v0), Admission::FunctionKnown);
    }

    fn admitted(a: Admission) -> ForestLit {
        match a {
            Admission::Stored(id) | Admission::Candidate(id) => ForestLit::new(id, false),
            other => panic!("rejected: {other:?}"),
        }
    }

    #[test]
    fn equal_cost_structures_share_an_entry() {
        let mut g = Generator::new(&[]).unwrap();
        let v = ForestLit::var;
        let xor_canon = canonical_form(x(0) ^ x(1));
        assert_eq!(xor_canon, x(3) ^ x(4));
        let p = admitted(g.try_node(GateKind::Xor, v(3), v(4)));
        assert_eq!(g.table().get(xor_canon).unwrap(), &[p]);
        // The complement realized directly, at the same cost.
        let q = admitted(g.try_node(GateKind::Xor, !v(3), v(4)));
        assert_eq!(g.table().get(xor_canon).unwrap(), &[p, !q]);
        let (forest, table) = g.into_parts();
        check_sound(&forest, &table);
    }

    #[test]
    fn cheaper_arrival_clears_entry() {
        let mut g = Generator::new(&[]).unwrap();
        let v = ForestLit::var;
        let and_canon = canonical_form(x(0) & x(1));
        assert_eq!(and_canon, TruthTable(0x0000_00ff));
        let p = admitted(g.try_node(GateKind::Xor, v(3), v(4)));
        // !(x3 ^ x4) & !x4 = !x3 & !x4, at cost 3.
        let slow = admitted(g.try_node(GateKind::And, !p, !v(4)));
        assert_eq!(g.table().get(and_canon).unwrap(), &[slow]);
        let fast = admitted(g.try_node(GateKind::And, !v(3), !v(4)));
        assert_eq!(g.table().get(and_canon).unwrap(), &[fast]);
        assert_eq!(g.min_cost(and_canon), Some(1));
        // An equally cheap structure for the same function is refused.
        assert_eq!(g.try_node(GateKind::And, !v(4), !v(3)), Admission::FunctionKnown);
        // A costlier member of the class is refused outright.
        let r = g.try_node(GateKind::And, p, !v(4));
        assert_eq!(r, Admission::ClassBeaten);
        let (forest, table) = g.into_parts();
        check_sound(&forest, &table);
    }

    #[test]
    fn reduce_keeps_table_cones_only() {
        let mut g = Generator::new(&[]).unwrap();
        for i in 1..8 {
            for j in 0..i {
                g.try_node(GateKind::And, ForestLit::new(i, false), ForestLit::new(j, true));
                g.try_node(GateKind::Xor, ForestLit::new(i, false), ForestLit::new(j, false));
            }
        }
        let before = g.forest().len();
        let snapshot = |g: &Generator| -> Vec<(TruthTable, Vec<TruthTable>)> {
            g.table()
                .iter()
                .map(|(k, v)| (k, v.iter().map(|&l| g.forest().lit_tt(l)).collect()))
                .collect()
        };
        let table_before = snapshot(&g);
        g.reduce();
        let forest = g.forest();
        let mut reachable = vec![false; forest.len()];
        for (_, lits) in g.table().iter() {
            for &l in lits {
                for id in forest.cone(l) {
                    reachable[id as usize] = true;
                }
            }
        }
        assert!(forest.len() < before);
        assert!((NUM_SEEDS..forest.len()).all(|id| reachable[id]));
        assert_eq!(table_before, snapshot(&g));
        let (forest, table) = g.into_parts();
        check_sound(&forest, &table);

        let mut seeds_only = Generator::new(&[]).unwrap();
        seeds_only.reduce();
        assert_eq!(seeds_only.forest().len(), NUM_SEEDS);
    }

    #[test]
    fn replay_after_reduction_admits_nothing_old() {
        let practical: Vec<TruthTable> = [x(0) & x(1) & x(2), (x(0) ^ x(1)) & x(2), x(0) & x(1) | x(2) & x(3)]
            .into_iter()
            .map(canonical_form)
            .collect();
        let mut g = Generator::new(&practical).unwrap();
        let opts = GenOptions {
            u: 0,
            max_pairs: Some(2000),
            ..Default::default()
        };
        g.run(&opts);
        let rejected_before: std::collections::HashSet<TruthTable> = g.cost_map.keys().copied().collect();
        let costs_before = g.cost_map.clone();
        g.reduce();
        let n = g.forest().len();
        for i in 1..n {
            for j in 0..i {
                for kind in [GateKind::And, GateKind::Xor] {
                    let a = ForestLit::new(i, false);
                    let b = ForestLit::new(j, false);
                    match g.try_node(kind, a, b) {
                        Admission::Stored(id) | Admission::Candidate(id) => {
                            let node = g.forest().node(id);
                            if rejected_before.contains(&node.tt) {
                                assert!(node.cost < costs_before[&node.tt]);
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
        for (tt, c) in &costs_before {
            assert!(g.min_cost(*tt).unwrap() <= *c);
        }
    }

    #[test]
    fn budget_zero_is_partial() {
        let target = canonical_form(x(0) & x(1));
        let opts = GenOptions {
            u: 0,
            max_pairs: Some(0),
            ..Default::default()
        };
        let (_, _, r) = generate_best_circuits(&[target], &opts).unwrap();
        assert_eq!(r.outcome, GenOutcome::BudgetExhausted);
        let opts = GenOptions {
            u: 0,
            time_limit: Some(Duration::ZERO),
            ..Default::default()
        };
        let (_, _, r) = generate_best_circuits(&[target], &opts).unwrap();
        assert_eq!(r.outcome, GenOutcome::BudgetExhausted);
        // u above the class count: done after seeding.
        let (_, _, r) = generate_best_circuits(
            &[target],
            &GenOptions {
                u: 1,
                max_pairs: Some(0),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.outcome, GenOutcome::Covered);
    }

    #[test]
    fn node_limit_when_reduction_cannot_shrink() {
        let practical: Vec<TruthTable> = vec![canonical_form(x(0) & x(1) & x(2) & x(3) & x(4))];
        let opts = GenOptions {
            u: 0,
            n_max: 6,
            ..Default::default()
        };
        let (_, _, r) = generate_best_circuits(&practical, &opts).unwrap();
        assert!(matches!(r.outcome, GenOutcome::NodeLimit | GenOutcome::Covered));
    }

    #[test]
    fn db_round_trip() {
        let empty = CandidateDb::new(Forest::new(), CircuitTable::default());
        let text = empty.to_text();
        assert_eq!(text, "AIGRW5DB 1\nvars 5\n");
        assert_eq!(CandidateDb::parse(&text).unwrap(), empty);

        let practical: Vec<TruthTable> = [x(0) & x(1), x(0) ^ x(1) ^ x(2), (x(0) | x(1)) & x(2)]
            .into_iter()
            .map(canonical_form)
            .collect();
        let mut g = Generator::new(&practical).unwrap();
        g.run(&GenOptions {
            u: 0,
            ..Default::default()
        });
        g.reduce();
        let (forest, table) = g.into_parts();
        let db = CandidateDb::new(forest, table);
        let text = db.to_text();
        let back = CandidateDb::parse(&text).unwrap();
        assert_eq!(back, db);
        assert_eq!(back.to_text(), text);
        check_sound(back.forest(), back.table());
    }

    #[test]
    fn db_parse_errors() {
        let bad = [
            "",
            "AIGRW5DB 2\nvars 5\n",
            "AIGRW5DB 1\nvars 4\n",
            "AIGRW5DB 1\nvars 5\nn 7 AND 2 4\n",
            "AIGRW5DB 1\nvars 5\nn 6 OR 2 4\n",
            "AIGRW5DB 1\nvars 5\nn 6 AND 2 14\n",
            "AIGRW5DB 1\nvars 5\ne 0000ffff 2\n",
            "AIGRW5DB 1\nvars 5\ne aaaaaaaa 2\n",
            "AIGRW5DB 1\nvars 5\nfoo\n",
        ];
        for b in bad {
            assert!(CandidateDb::parse(b).is_err(), "{b:?}");
        }
        assert!(matches!(
            CandidateDb::parse("AIGRW5DB 2\nvars 5\n"),
            Err(ForestError::Version(_))
        ));
        assert!(CandidateDb::parse("AIGRW5DB 1\nvars 5\ne 0000ffff 11\n").is_ok());
    }
}
