//! K-feasible cut enumeration and cut functions.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::aig::{Aig, Lit, NodeId, NodeKind};
use crate::truth::TruthTable;

pub const MAX_CUT_SIZE: usize = 6;
pub const DEFAULT_CUT_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("cut size {0} outside 2..=6")]
    BadK(usize),
    #[error("cut functions support at most 5 leaves, got {0}")]
    TooManyLeaves(usize),
    #[error("leaves do not form a cut of {0}")]
    NotACut(NodeId),
    #[error("node {0} is not live")]
    DeadNode(NodeId),
}

/// Sorted, duplicate-free leaf set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Cut {
    leaves: [u32; MAX_CUT_SIZE],
    len: u8,
    sig: u64,
}

#[inline]
fn sig_bit(id: u32) -> u64 {
    1u64 << (id.wrapping_mul(0x9e37_79b9) >> 26)
}

impl Cut {
    pub fn trivial(id: NodeId) -> Cut {
        let mut leaves = [0; MAX_CUT_SIZE];
        leaves[0] = id.0;
        Cut {
            leaves,
            len: 1,
            sig: sig_bit(id.0),
        }
    }

    /// Builds a cut from arbitrary ids; they are sorted and deduplicated.
    pub fn from_leaves(ids: &[NodeId]) -> Option<Cut> {
        let mut v: Vec<u32> = ids.iter().map(|n| n.0).collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() || v.len() > MAX_CUT_SIZE {
            return None;
        }
        let mut leaves = [0; MAX_CUT_SIZE];
        leaves[..v.len()].copy_from_slice(&v);
        let sig = v.iter().fold(0, |s, &x| s | sig_bit(x));
        Some(Cut {
            leaves,
            len: v.len() as u8,
            sig,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn leaf_ids(&self) -> &[u32] {
        &self.leaves[..self.len()]
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.leaf_ids().iter().map(|&x| NodeId(x))
    }

    pub fn signature(&self) -> u64 {
        self.sig
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.leaf_ids().binary_search(&id.0).is_ok()
    }

    /// Whether every leaf of `self` is a leaf of `other`.
    pub fn is_subset_of(&self, other: &Cut) -> bool {
        if self.len > other.len || self.sig & !other.sig != 0 {
            return false;
        }
        let b = other.leaf_ids();
        let mut j = 0;
        for &x in self.leaf_ids() {
            while j < b.len() && b[j] < x {
                j += 1;
            }
            if j == b.len() || b[j] != x {
                return false;
            }
            j += 1;
        }
        true
    }

    fn merge(&self, other: &Cut, k: usize) -> Option<Cut> {
        if (self.sig | other.sig).count_ones() as usize > k {
            return None;
        }
        let (a, b) = (self.leaf_ids(), other.leaf_ids());
        let mut leaves = [0; MAX_CUT_SIZE];
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() || j < b.len() {
            let x = if j == b.len() || (i < a.len() && a[i] < b[j]) {
                i += 1;
                a[i - 1]
            } else if i == a.len() || b[j] < a[i] {
                j += 1;
                b[j - 1]
            } else {
                i += 1;
                j += 1;
                a[i - 1]
            };
            if n == k {
                return None;
            }
            leaves[n] = x;
            n += 1;
        }
        Some(Cut {
            leaves,
            len: n as u8,
            sig: self.sig | other.sig,
        })
    }
}

/// Cut sets indexed by node id. Dead nodes have an empty set.
#[derive(Clone, Debug)]
pub struct CutSets {
    sets: Vec<Vec<Cut>>,
}

impl CutSets {
    pub fn of(&self, id: NodeId) -> &[Cut] {
        self.sets.get(id.index()).map_or(&[], |v| v.as_slice())
    }

    pub fn total(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }
}

/// Enumerates up to `cap` cuts of at most `k` leaves for every live node.
pub fn enumerate_cuts(aig: &Aig, k: usize, cap: usize) -> Result<CutSets, CutError> {
    if !(2..=MAX_CUT_SIZE).contains(&k) {
        return Err(CutError::BadK(k));
    }
    let mut sets: Vec<Vec<Cut>> = vec![Vec::new(); aig.num_nodes()];
    let mut scratch: Vec<Cut> = Vec::new();
    for i in 0..aig.num_nodes() {
        let id = NodeId(i as u32);
        match aig.kind(id) {
            NodeKind::Dead => continue,
            NodeKind::Const0 | NodeKind::Input => sets[i] = vec![Cut::trivial(id)],
            NodeKind::And => {
                let [a, b] = aig.fanins(id);
                scratch.clear();
                for ca in &sets[a.node().index()] {
                    for cb in &sets[b.node().index()] {
                        let Some(c) = ca.merge(cb, k) else { continue };
                        if scratch.iter().any(|s| s.is_subset_of(&c)) {
                            continue;
                        }
                        scratch.retain(|s| !c.is_subset_of(s));
                        scratch.push(c);
                    }
                }
                scratch.sort_unstable_by(|x, y| (x.len, x.leaf_ids()).cmp(&(y.len, y.leaf_ids())));
                let mut set = Vec::with_capacity(scratch.len().min(cap) + 1);
                set.push(Cut::trivial(id));
                set.extend(scratch.iter().take(cap.saturating_sub(1)).copied());
                sets[i] = set;
            }
        }
    }
    Ok(CutSets { sets })
}

/// Function of `root` over the leaves of `cut`, leaf `i` (in sorted order)
/// being variable `x_i`.
pub fn cut_truth(aig: &Aig, root: NodeId, cut: &Cut) -> Result<TruthTable, CutError> {
    if cut.len() > 5 {
        return Err(CutError::TooManyLeaves(cut.len()));
    }
    let mut memo: FxHashMap<u32, u32> = FxHashMap::default();
    for (i, &leaf) in cut.leaf_ids().iter().enumerate() {
        if !aig.is_live(NodeId(leaf)) {
            return Err(CutError::DeadNode(NodeId(leaf)));
        }
        memo.insert(leaf, TruthTable::var(i).bits());
    }
    if !aig.is_live(root) {
        return Err(CutError::DeadNode(root));
    }
    let bits = eval(aig, root, &mut memo).ok_or(CutError::NotACut(root))?;
    Ok(TruthTable(bits))
}

fn eval(aig: &Aig, root: NodeId, memo: &mut FxHashMap<u32, u32>) -> Option<u32> {
    let lit =
        |memo: &FxHashMap<u32, u32>, l: Lit| memo.get(&l.node().0).map(|&v| if l.is_complemented() { !v } else { v });
    let mut stack = vec![root];
    while let Some(&id) = stack.last() {
        if memo.contains_key(&id.0) {
            stack.pop();
            continue;
        }
        match aig.kind(id) {
            NodeKind::Const0 => {
                memo.insert(0, 0);
                stack.pop();
            }
            NodeKind::Input | NodeKind::Dead => return None,
            NodeKind::And => {
                let [a, b] = aig.fanins(id);
                match (lit(memo, a), lit(memo, b)) {
                    (Some(x), Some(y)) => {
                        memo.insert(id.0, x & y);
                        stack.pop();
                    }
                    (x, y) => {
                        if x.is_none() {
                            stack.push(a.node());
                        }
                        if y.is_none() {
                            stack.push(b.node());
                        }
                    }
                }
            }
        }
    }
    memo.get(&root.0).copied()
}
