//! Cut-based rewriting with precomputed candidate circuits.
//!
//! Each AND node is visited once per pass. For every 5-leaf cut the cut
//! function is canonicalized, every candidate of its class is trial-built on
//! the cut leaves, and the replacement saving the most nodes is committed.

use std::time::{Duration, Instant};

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::aig::{fold, normalize, Aig, AigError, Lit, NodeId, NodeKind};
use crate::cut::{cut_truth, enumerate_cuts, Cut, CutError, DEFAULT_CUT_CAP};
use crate::forest::{CandidateDb, ForestKind, ForestLit};
use crate::truth::{canonicalize, NpnTransform, TruthTable, NUM_VARS};

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Aig(#[from] AigError),
    #[error("cut of {root} with leaves {leaves:?} is not valid")]
    InvalidCut { root: NodeId, leaves: Vec<u32> },
    #[error("candidate {candidate} does not match cut function {func} under the class transform")]
    TransformMismatch { candidate: ForestLit, func: TruthTable },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteOptions {
    pub zero_gain: bool,
    pub exact_five_leaves: bool,
    pub preserve_depth: bool,
    pub cut_cap: usize,
    pub passes: usize,
}

impl Default for RewriteOptions {
    fn default() -> Self {
        RewriteOptions {
            zero_gain: true,
            exact_five_leaves: true,
            preserve_depth: false,
            cut_cap: DEFAULT_CUT_CAP,
            passes: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PassStats {
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub replacements: usize,
    pub zero_gain_replacements: usize,
    /// Sum of the gains predicted when the replacements were chosen.
    pub predicted_gain: i64,
    /// Sum of the node-count drops measured at each commit. At least the
    /// predicted gain: rewiring can make fanouts fold or merge further up.
    pub observed_gain: i64,
    pub cuts_evaluated: usize,
    pub candidates_evaluated: usize,
    pub elapsed: Duration,
}

impl PassStats {
    pub fn gain(&self) -> usize {
        self.nodes_before - self.nodes_after
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteStats {
    /// Dangling nodes removed before the first pass.
    pub swept: usize,
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub replacements: usize,
    pub zero_gain_replacements: usize,
    pub passes: Vec<PassStats>,
}

/// Outcome of trial-building one candidate on a cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trial {
    /// The candidate would reuse the root inside its own cone.
    Infeasible,
    /// The candidate resolves to the root itself.
    NoOp,
    Feasible {
        gain: i64,
        level: u32,
    },
}

/// Number of AND nodes freed by removing `root`, given that the nodes of
/// `cut` stay. The root itself always counts.
pub fn mffc_size(aig: &Aig, root: NodeId, cut: &Cut) -> Result<usize, RewriteError> {
    Ok(mffc(aig, root, cut)?.len())
}

fn mffc(aig: &Aig, root: NodeId, cut: &Cut) -> Result<FxHashSet<NodeId>, RewriteError> {
    let invalid = || RewriteError::InvalidCut {
        root,
        leaves: cut.leaf_ids().to_vec(),
    };
    if !aig.is_and(root) || cut.contains(root) {
        return Err(invalid());
    }
    let mut derefs: FxHashMap<NodeId, u32> = FxHashMap::default();
    let mut set = FxHashSet::default();
    set.insert(root);
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        for f in aig.fanins(id) {
            let n = f.node();
            if cut.contains(n) {
                continue;
            }
            match aig.kind(n) {
                NodeKind::And => {}
                NodeKind::Const0 => continue,
                _ => return Err(invalid()),
            }
            let d = derefs.entry(n).or_insert(0);
            *d += 1;
            if *d == aig.refs(n) {
                set.insert(n);
                stack.push(n);
            }
        }
    }
    Ok(set)
}

/// How candidate inputs attach to the cut: forest variable `i` reads
/// `bind[i]`, and the candidate output is complemented when the flag is set.
/// Variables the cut function does not use are tied to constant false.
pub fn connect_to_leaves(leaves: &[Lit], t: &NpnTransform) -> ([Lit; NUM_VARS], bool) {
    let perm = t.perm();
    let phase = t.input_phase();
    let mut bind = [Lit::FALSE; NUM_VARS];
    for (i, b) in bind.iter_mut().enumerate() {
        let p = perm[i] as usize;
        if p < leaves.len() {
            *b = leaves[p] ^ ((phase >> i) & 1 == 1);
        }
    }
    (bind, t.output_phase())
}

/// Builds the candidate's cone bottom-up through `and`, returning the
/// literal of its root.
fn build(db: &CandidateDb, cand: ForestLit, bind: &[Lit; NUM_VARS], mut and: impl FnMut(Lit, Lit) -> Lit) -> Lit {
    let forest = db.forest();
    let mut map: FxHashMap<u32, Lit> = FxHashMap::default();
    let get = |map: &FxHashMap<u32, Lit>, l: ForestLit| -> Lit {
        let base = match forest.node(l.node()).kind {
            ForestKind::Const0 => Lit::FALSE,
            ForestKind::Var(i) => bind[i as usize],
            _ => map[&(l.node() as u32)],
        };
        base ^ l.is_complemented()
    };
    for &g in db.cone(cand) {
        let node = forest.node(g as usize);
        let a = get(&map, node.fanins[0]);
        let b = get(&map, node.fanins[1]);
        let out = match node.kind {
            ForestKind::Xor => {
                let p = and(a, !b);
                let q = and(!a, b);
                !and(!p, !q)
            }
            _ => and(a, b),
        };
        map.insert(g, out);
    }
    get(&map, cand)
}

/// Counts what committing `cand` on `cut` of `root` would cost and save,
/// without touching the graph. `func` is the cut function and `t` the
/// transform taking it to the candidate's class representative.
pub fn eval_candidate(
    aig: &Aig,
    db: &CandidateDb,
    root: NodeId,
    cut: &Cut,
    func: TruthTable,
    cand: ForestLit,
    t: &NpnTransform,
) -> Result<Trial, RewriteError> {
    if t.inverse().apply(db.forest().lit_tt(cand)) != func {
        return Err(RewriteError::TransformMismatch { candidate: cand, func });
    }
    let saved = mffc(aig, root, cut)?;
    let leaves: Vec<Lit> = cut.leaves().map(|n| Lit::new(n, false)).collect();
    let (bind, out_phase) = connect_to_leaves(&leaves, t);

    // Nodes not yet in the graph get ids past the arena.
    let base = aig.num_nodes() as u32;
    let mut virt: Vec<([Lit; 2], u32)> = Vec::new();
    let mut local: FxHashMap<(Lit, Lit), Lit> = FxHashMap::default();
    let level = |virt: &[([Lit; 2], u32)], l: Lit| {
        let id = l.node().0;
        if id >= base {
            virt[(id - base) as usize].1
        } else {
            aig.level(l.node())
        }
    };
    let out = build(db, cand, &bind, |a, b| {
        if let Some(l) = fold(a, b) {
            return l;
        }
        if a.node().0 < base && b.node().0 < base {
            if let Some(l) = aig.lookup_and(a, b) {
                return l;
            }
        }
        let key = normalize(a, b);
        if let Some(&l) = local.get(&key) {
            return l;
        }
        let lv = 1 + level(&virt, a).max(level(&virt, b));
        let l = Lit::new(NodeId(base + virt.len() as u32), false);
        virt.push(([key.0, key.1], lv));
        local.insert(key, l);
        l
    }) ^ out_phase;

    if out.node() == root {
        return Ok(Trial::NoOp);
    }
    // Count what the new cone actually keeps alive: fresh nodes, plus nodes
    // of the freed cone it reuses (with everything below them in that cone).
    let mut added = 0i64;
    let mut seen = FxHashSet::default();
    let mut stack = vec![out.node()];
    while let Some(id) = stack.pop() {
        if !seen.insert(id) {
            continue;
        }
        if id.0 >= base {
            added += 1;
            let [a, b] = virt[(id.0 - base) as usize].0;
            stack.push(a.node());
            stack.push(b.node());
        } else if id == root {
            return Ok(Trial::Infeasible);
        } else if saved.contains(&id) {
            added += 1;
            stack.extend(aig.fanins(id).iter().map(|l| l.node()));
        }
    }
    Ok(Trial::Feasible {
        gain: saved.len() as i64 - added,
        level: level(&virt, out),
    })
}

/// Builds `cand` on the cut for real and redirects `root` to it. Returns
/// the observed change in AND count.
fn commit(
    aig: &mut Aig,
    db: &CandidateDb,
    root: NodeId,
    cut: &Cut,
    cand: ForestLit,
    t: &NpnTransform,
) -> Result<i64, RewriteError> {
    let before = aig.num_ands();
    let first_new = aig.num_nodes();
    let leaves: Vec<Lit> = cut.leaves().map(|n| Lit::new(n, false)).collect();
    let (bind, out_phase) = connect_to_leaves(&leaves, t);
    let out = build(db, cand, &bind, |a, b| aig.and(a, b)) ^ out_phase;
    aig.replace_node(root, out)?;
    for i in (first_new..aig.num_nodes()).rev() {
        aig.remove_if_unreferenced(NodeId(i as u32));
    }
    Ok(before as i64 - aig.num_ands() as i64)
}

type CanonCache = FxHashMap<TruthTable, (TruthTable, NpnTransform)>;

fn rewrite_pass(
    aig: &mut Aig,
    db: &CandidateDb,
    opts: &RewriteOptions,
    cache: &mut CanonCache,
) -> Result<PassStats, RewriteError> {
    let start = Instant::now();
    let mut stats = PassStats {
        nodes_before: aig.num_ands(),
        ..Default::default()
    };
    let cuts = enumerate_cuts(aig, 5, opts.cut_cap)?;
    let end = aig.num_nodes();
    for i in 0..end {
        let root = NodeId(i as u32);
        if !aig.is_and(root) {
            continue;
        }
        let mut best: Option<(i64, Cut, ForestLit, NpnTransform)> = None;
        let mut best_gain = if opts.zero_gain { -1 } else { 0 };
        for cut in cuts.of(root) {
            if cut.contains(root) || (opts.exact_five_leaves && cut.len() != 5) {
                continue;
            }
            // Earlier commits in this pass may have invalidated the cut.
            let Ok(func) = cut_truth(aig, root, cut) else { continue };
            if cut.leaves().any(|n| !aig.is_live(n)) {
                continue;
            }
            let (canon, t) = *cache.entry(func).or_insert_with(|| canonicalize(func));
            let cands = db.candidates(canon);
            if cands.is_empty() {
                continue;
            }
            stats.cuts_evaluated += 1;
            for &cand in cands {
                stats.candidates_evaluated += 1;
                let Trial::Feasible { gain, level } = eval_candidate(aig, db, root, cut, func, cand, &t)? else {
                    continue;
                };
                if opts.preserve_depth && level > aig.level(root) {
                    continue;
                }
                if gain >= 0 && gain > best_gain {
                    best_gain = gain;
                    best = Some((gain, *cut, cand, t));
                }
            }
        }
        if let Some((gain, cut, cand, t)) = best {
            let observed = commit(aig, db, root, &cut, cand, &t)?;
            debug_assert!(observed >= gain, "predicted {gain}, observed {observed}");
            stats.replacements += 1;
            stats.predicted_gain += gain;
            stats.observed_gain += observed;
            if gain == 0 {
                stats.zero_gain_replacements += 1;
            }
        }
    }
    stats.nodes_after = aig.num_ands();
    stats.elapsed = start.elapsed();
    Ok(stats)
}

/// Runs `opts.passes` rewriting passes over `aig`.
pub fn rewrite_network(aig: &mut Aig, db: &CandidateDb, opts: &RewriteOptions) -> Result<RewriteStats, RewriteError> {
    run_passes(aig, db, opts, false)
}

/// Runs passes until one of them reduces nothing, or `opts.passes` passes
/// have run.
pub fn rewrite_to_fixpoint(
    aig: &mut Aig,
    db: &CandidateDb,
    opts: &RewriteOptions,
) -> Result<RewriteStats, RewriteError> {
    run_passes(aig, db, opts, true)
}

fn run_passes(
    aig: &mut Aig,
    db: &CandidateDb,
    opts: &RewriteOptions,
    stop_early: bool,
) -> Result<RewriteStats, RewriteError> {
    let mut stats = RewriteStats {
        swept: aig.sweep_dangling(),
        nodes_before: aig.num_ands(),
        ..Default::default()
    };
    let mut cache = CanonCache::default();
    for _ in 0..opts.passes.max(1) {
        let pass = rewrite_pass(aig, db, opts, &mut cache)?;
        log::debug!(
            "pass: {} -> {} nodes, {} replacements",
            pass.nodes_before,
            pass.nodes_after,
            pass.replacements
        );
        stats.replacements += pass.replacements;
        stats.zero_gain_replacements += pass.zero_gain_replacements;
        let done = stop_early && pass.gain() == 0;
        stats.passes.push(pass);
        if done {
            break;
        }
    }
    stats.nodes_after = aig.num_ands();
    Ok(stats)
}
