//! Structurally hashed And-Inverter graphs.
//!
//! Nodes live in an arena whose order is topological: both fanins of an AND
//! node have smaller ids than the node itself. Deleted nodes stay in the
//! arena as tombstones so ids remain stable during a rewriting pass; use
//! [`Aig::compact`] to renumber.

use std::fmt;
use std::ops::{BitXor, Not};

use rustc_hash::FxHashMap;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const CONST: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// An edge: a node plus a complement flag, encoded as `2 * node + complement`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Lit(u32);

impl Lit {
    pub const FALSE: Lit = Lit(0);
    pub const TRUE: Lit = Lit(1);

    #[inline]
    pub fn new(node: NodeId, complement: bool) -> Lit {
        Lit((node.0 << 1) | complement as u32)
    }

    #[inline]
    pub fn from_code(code: u32) -> Lit {
        Lit(code)
    }

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn node(self) -> NodeId {
        NodeId(self.0 >> 1)
    }

    #[inline]
    pub fn is_complemented(self) -> bool {
        self.0 & 1 != 0
    }

    /// The uncomplemented literal of the same node.
    #[inline]
    pub fn regular(self) -> Lit {
        Lit(self.0 & !1)
    }

    #[inline]
    pub fn is_const(self) -> bool {
        self.0 < 2
    }
}

impl Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// `lit ^ true` complements, `lit ^ false` is a no-op.
impl BitXor<bool> for Lit {
    type Output = Lit;
    #[inline]
    fn bitxor(self, c: bool) -> Lit {
        Lit(self.0 ^ c as u32)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.is_complemented() { "!" } else { "" }, self.node())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeKind {
    Const0,
    Input,
    And,
    /// Tombstone left behind by a deleted AND node.
    Dead,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    kind: NodeKind,
    fanins: [Lit; 2],
    level: u32,
    refs: u32,
    fanouts: Vec<NodeId>,
}

impl Node {
    fn leaf(kind: NodeKind) -> Node {
        Node {
            kind,
            fanins: [Lit::FALSE; 2],
            level: 0,
            refs: 0,
            fanouts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AigError {
    #[error("literal {0:?} does not reference a live node")]
    InvalidLit(Lit),
    #[error("node {0} is not a live AND node")]
    NotAnd(NodeId),
    #[error("replacing {old} by {new:?} would create a cycle")]
    Cycle { old: NodeId, new: Lit },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Aig {
    nodes: Vec<Node>,
    inputs: Vec<NodeId>,
    outputs: Vec<Lit>,
    strash: FxHashMap<(Lit, Lit), NodeId>,
    num_ands: usize,
    split_latches: usize,
}

#[inline]
pub(crate) fn normalize(a: Lit, b: Lit) -> (Lit, Lit) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// One-level folding applied before hashing.
#[inline]
pub(crate) fn fold(a: Lit, b: Lit) -> Option<Lit> {
    if a == Lit::FALSE || b == Lit::FALSE || a == !b {
        Some(Lit::FALSE)
    } else if a == Lit::TRUE || a == b {
        Some(b)
    } else if b == Lit::TRUE {
        Some(a)
    } else {
        None
    }
}

impl Aig {
    pub fn new(num_inputs: usize) -> Aig {
        let mut aig = Aig {
            nodes: vec![Node::leaf(NodeKind::Const0)],
            ..Default::default()
        };
        for _ in 0..num_inputs {
            aig.add_input();
        }
        aig
    }

    pub fn add_input(&mut self) -> Lit {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node::leaf(NodeKind::Input));
        self.inputs.push(id);
        Lit::new(id, false)
    }

    pub fn input(&self, i: usize) -> Lit {
        Lit::new(self.inputs[i], false)
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Lit] {
        &self.outputs
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Arena size, tombstones included.
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Number of live AND nodes.
    pub fn num_ands(&self) -> usize {
        self.num_ands
    }

    /// Number of trailing input/output pairs that came from split latches.
    pub fn split_latches(&self) -> usize {
        self.split_latches
    }

    pub fn set_split_latches(&mut self, n: usize) {
        assert!(n <= self.inputs.len() && n <= self.outputs.len());
        self.split_latches = n;
    }

    #[inline]
    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id.index()].kind
    }

    #[inline]
    pub fn is_and(&self, id: NodeId) -> bool {
        self.nodes[id.index()].kind == NodeKind::And
    }

    #[inline]
    pub fn is_live(&self, id: NodeId) -> bool {
        id.index() < self.nodes.len() && self.nodes[id.index()].kind != NodeKind::Dead
    }

    #[inline]
    pub fn fanins(&self, id: NodeId) -> [Lit; 2] {
        debug_assert!(self.is_and(id));
        self.nodes[id.index()].fanins
    }

    #[inline]
    pub fn level(&self, id: NodeId) -> u32 {
        self.nodes[id.index()].level
    }

    #[inline]
    pub fn refs(&self, id: NodeId) -> u32 {
        self.nodes[id.index()].refs
    }

    pub fn fanouts(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.index()].fanouts
    }

    fn check_lit(&self, l: Lit) -> Result<(), AigError> {
        if self.is_live(l.node()) {
            Ok(())
        } else {
            Err(AigError::InvalidLit(l))
        }
    }

    /// `a & b`, folding trivial cases and reusing a structurally identical
    /// node when one exists.
    pub fn add_and(&mut self, a: Lit, b: Lit) -> Result<Lit, AigError> {
        self.check_lit(a)?;
        self.check_lit(b)?;
        Ok(self.and(a, b))
    }

    pub fn add_or(&mut self, a: Lit, b: Lit) -> Result<Lit, AigError> {
        Ok(!self.add_and(!a, !b)?)
    }

    /// Three-node XOR: `!(!(a & !b) & !(!a & b))`.
    pub fn add_xor(&mut self, a: Lit, b: Lit) -> Result<Lit, AigError> {
        self.check_lit(a)?;
        self.check_lit(b)?;
        Ok(self.xor(a, b))
    }

    pub(crate) fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        let p = self.and(a, !b);
        let q = self.and(!a, b);
        !self.and(!p, !q)
    }

    /// What `add_and(a, b)` would return without creating a node, or `None`
    /// when it would have to allocate one.
    pub fn lookup_and(&self, a: Lit, b: Lit) -> Option<Lit> {
        if let Some(l) = fold(a, b) {
            return Some(l);
        }
        self.strash.get(&normalize(a, b)).map(|&id| Lit::new(id, false))
    }

    pub(crate) fn and(&mut self, a: Lit, b: Lit) -> Lit {
        if let Some(l) = fold(a, b) {
            return l;
        }
        let key = normalize(a, b);
        if let Some(&id) = self.strash.get(&key) {
            return Lit::new(id, false);
        }
        let id = NodeId(self.nodes.len() as u32);
        let level = 1 + self.level(a.node()).max(self.level(b.node()));
        self.nodes.push(Node {
            kind: NodeKind::And,
            fanins: [key.0, key.1],
            level,
            refs: 0,
            fanouts: Vec::new(),
        });
        for f in [key.0, key.1] {
            let n = &mut self.nodes[f.node().index()];
            n.refs += 1;
            n.fanouts.push(id);
        }
        self.strash.insert(key, id);
        self.num_ands += 1;
        Lit::new(id, false)
    }

    pub fn add_output(&mut self, l: Lit) -> Result<(), AigError> {
        self.check_lit(l)?;
        self.nodes[l.node().index()].refs += 1;
        self.outputs.push(l);
        Ok(())
    }

    /// Live nodes with every AND after both of its fanins.
    pub fn topo_order(&self) -> Vec<NodeId> {
        (0..self.nodes.len() as u32)
            .map(NodeId)
            .filter(|&id| self.is_live(id))
            .collect()
    }

    /// Largest level among nodes driving outputs.
    pub fn depth(&self) -> u32 {
        self.outputs.iter().map(|l| self.level(l.node())).max().unwrap_or(0)
    }

    /// Redirects every reference to `old` onto `new` and deletes whatever
    /// part of `old`'s cone becomes unreferenced. Fanouts that become
    /// trivial or duplicate an existing node are merged, transitively.
    pub fn replace_node(&mut self, old: NodeId, new: Lit) -> Result<(), AigError> {
        if !self.is_live(old) || !self.is_and(old) {
            return Err(AigError::NotAnd(old));
        }
        self.check_lit(new)?;
        if new.node() == old {
            if new.is_complemented() {
                return Err(AigError::Cycle { old, new });
            }
            return Ok(());
        }
        if self.cone_contains(new.node(), old) {
            return Err(AigError::Cycle { old, new });
        }
        self.replace_inner(old, new);
        Ok(())
    }

    /// Whether `target` lies in the transitive fanin of `from` (inclusive).
    fn cone_contains(&self, from: NodeId, target: NodeId) -> bool {
        if from < target {
            return false;
        }
        let mut stack = vec![from];
        let mut seen = rustc_hash::FxHashSet::default();
        while let Some(id) = stack.pop() {
            if id == target {
                return true;
            }
            if id < target || !self.is_and(id) || !seen.insert(id) {
                continue;
            }
            for f in self.fanins(id) {
                stack.push(f.node());
            }
        }
        false
    }

    fn replace_inner(&mut self, old: NodeId, new: Lit) {
        let new_id = new.node();
        self.nodes[new_id.index()].refs += 1;
        self.nodes[old.index()].refs += 1;
        for i in 0..self.outputs.len() {
            let o = self.outputs[i];
            if o.node() == old {
                self.outputs[i] = new ^ o.is_complemented();
                self.nodes[new_id.index()].refs += 1;
                self.nodes[old.index()].refs -= 1;
            }
        }
        while let Some(&f) = self.nodes[old.index()].fanouts.last() {
            self.rewire_fanout(f, old, new);
        }
        self.release(old);
        self.release(new_id);
    }

    fn rewire_fanout(&mut self, f: NodeId, old: NodeId, new: Lit) {
        let [a, b] = self.nodes[f.index()].fanins;
        let swap = |l: Lit| if l.node() == old { new ^ l.is_complemented() } else { l };
        let (a2, b2) = (swap(a), swap(b));
        if self.strash.get(&(a, b)) == Some(&f) {
            self.strash.remove(&(a, b));
        }
        let key = normalize(a2, b2);
        let in_place =
            fold(a2, b2).is_none() && !self.strash.contains_key(&key) && key.0.node() < f && key.1.node() < f;
        if in_place {
            let fo = &mut self.nodes[old.index()].fanouts;
            let pos = fo.iter().position(|&x| x == f).unwrap();
            fo.swap_remove(pos);
            self.nodes[old.index()].refs -= 1;
            let nn = &mut self.nodes[new.node().index()];
            nn.refs += 1;
            nn.fanouts.push(f);
            self.nodes[f.index()].fanins = [key.0, key.1];
            self.strash.insert(key, f);
            self.update_levels_from(f);
        } else {
            let g = self.and(a2, b2);
            self.replace_inner(f, g);
        }
    }

    fn update_levels_from(&mut self, start: NodeId) {
        let mut stack = vec![start];
        while let Some(id) = stack.pop() {
            let [a, b] = self.nodes[id.index()].fanins;
            let level = 1 + self.level(a.node()).max(self.level(b.node()));
            if level != self.nodes[id.index()].level {
                self.nodes[id.index()].level = level;
                stack.extend(self.nodes[id.index()].fanouts.iter().copied());
            }
        }
    }

    fn release(&mut self, id: NodeId) {
        let n = &mut self.nodes[id.index()];
        n.refs -= 1;
        if n.refs == 0 && n.kind == NodeKind::And {
            self.delete(id);
        }
    }

    /// Deletes an unreferenced AND node and, recursively, fanins that
    /// become unreferenced.
    fn delete(&mut self, id: NodeId) {
        let mut stack = vec![id];
        while let Some(id) = stack.pop() {
            let node = &mut self.nodes[id.index()];
            debug_assert_eq!(node.refs, 0);
            debug_assert!(node.fanouts.is_empty());
            node.kind = NodeKind::Dead;
            let [a, b] = node.fanins;
            if self.strash.get(&(a, b)) == Some(&id) {
                self.strash.remove(&(a, b));
            }
            self.num_ands -= 1;
            for f in [a, b] {
                let fanin = &mut self.nodes[f.node().index()];
                let pos = fanin.fanouts.iter().position(|&x| x == id).unwrap();
                fanin.fanouts.swap_remove(pos);
                fanin.refs -= 1;
                if fanin.refs == 0 && fanin.kind == NodeKind::And {
                    stack.push(f.node());
                }
            }
        }
    }

    /// Deletes `id` (and whatever it alone kept alive) if it is an
    /// unreferenced AND node.
    pub(crate) fn remove_if_unreferenced(&mut self, id: NodeId) -> bool {
        if self.is_and(id) && self.refs(id) == 0 {
            self.delete(id);
            true
        } else {
            false
        }
    }

    /// Deletes AND nodes that nothing references. Returns the number removed.
    pub fn sweep_dangling(&mut self) -> usize {
        let before = self.num_ands;
        for i in (0..self.nodes.len()).rev() {
            let id = NodeId(i as u32);
            if self.is_and(id) && self.refs(id) == 0 {
                self.delete(id);
            }
        }
        before - self.num_ands
    }

    /// Copy without tombstones, ids renumbered densely in arena order.
    /// Returns the copy and, for each old node, its literal in the copy.
    pub fn compact(&self) -> (Aig, Vec<Option<Lit>>) {
        let mut out = Aig::new(0);
        let mut map: Vec<Option<Lit>> = vec![None; self.nodes.len()];
        map[0] = Some(Lit::FALSE);
        for &pi in &self.inputs {
            map[pi.index()] = Some(out.add_input());
        }
        let tr = |map: &[Option<Lit>], l: Lit| map[l.node().index()].unwrap() ^ l.is_complemented();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.kind == NodeKind::And {
                let a = tr(&map, node.fanins[0]);
                let b = tr(&map, node.fanins[1]);
                map[i] = Some(out.and(a, b));
            }
        }
        for &o in &self.outputs {
            let l = tr(&map, o);
            out.add_output(l).unwrap();
        }
        out.split_latches = self.split_latches;
        (out, map)
    }

    /// Number of live AND nodes in the transitive fanin of the outputs.
    pub fn reachable_ands(&self) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = self.outputs.iter().map(|l| l.node()).collect();
        let mut count = 0;
        while let Some(id) = stack.pop() {
            if seen[id.index()] || !self.is_and(id) {
                continue;
            }
            seen[id.index()] = true;
            count += 1;
            stack.extend(self.fanins(id).iter().map(|l| l.node()));
        }
        count
    }

    /// Full consistency scan: arena order, fanin normalization, hash table
    /// contents, reference counts, fanout lists and levels.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut refs = vec![0u32; self.nodes.len()];
        let mut fanouts: Vec<Vec<NodeId>> = vec![Vec::new(); self.nodes.len()];
        let mut ands = 0;
        for (i, node) in self.nodes.iter().enumerate() {
            let id = NodeId(i as u32);
            match node.kind {
                NodeKind::Const0 if i != 0 => return Err(format!("{id}: stray constant")),
                NodeKind::Const0 | NodeKind::Input => {
                    if node.level != 0 {
                        return Err(format!("{id}: leaf with level {}", node.level));
                    }
                }
                NodeKind::Dead => {}
                NodeKind::And => {
                    ands += 1;
                    let [a, b] = node.fanins;
                    if a > b {
                        return Err(format!("{id}: fanins not normalized"));
                    }
                    if fold(a, b).is_some() {
                        return Err(format!("{id}: foldable fanins {a:?} {b:?}"));
                    }
                    for f in [a, b] {
                        if f.node() >= id {
                            return Err(format!("{id}: fanin {f:?} breaks arena order"));
                        }
                        if !self.is_live(f.node()) {
                            return Err(format!("{id}: dead fanin {f:?}"));
                        }
                        refs[f.node().index()] += 1;
                        fanouts[f.node().index()].push(id);
                    }
                    if self.strash.get(&(a, b)) != Some(&id) {
                        return Err(format!("{id}: missing from structural hash"));
                    }
                    let level = 1 + self.level(a.node()).max(self.level(b.node()));
                    if level != node.level {
                        return Err(format!("{id}: level {} expected {level}", node.level));
                    }
                }
            }
        }
        if self.strash.len() != ands || ands != self.num_ands {
            return Err(format!(
                "hash holds {} entries for {ands} live ANDs (counter {})",
                self.strash.len(),
                self.num_ands
            ));
        }
        for o in &self.outputs {
            if !self.is_live(o.node()) {
                return Err(format!("output {o:?} is dead"));
            }
            refs[o.node().index()] += 1;
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.kind == NodeKind::Dead {
                if node.refs != 0 || !node.fanouts.is_empty() {
                    return Err(format!("n{i}: tombstone still referenced"));
                }
                continue;
            }
            if node.refs != refs[i] {
                return Err(format!("n{i}: refs {} but counted {}", node.refs, refs[i]));
            }
            let mut a = node.fanouts.clone();
            let mut b = std::mem::take(&mut fanouts[i]);
            a.sort();
            b.sort();
            if a != b {
                return Err(format!("n{i}: fanout list {a:?} expected {b:?}"));
            }
        }
        Ok(())
    }
}
