//! Truth tables of 5-variable Boolean functions and exact NPN canonicalization.
//!
//! A function `f(x0, .., x4)` is stored as a `u32` where bit `m` holds the
//! value of `f` on the assignment `x_i = (m >> i) & 1`. `x0` is the fastest
//! toggling variable, so its table is `0xaaaaaaaa`.
//!
//! The canonical representative of an NPN class is the smallest table (as an
//! unsigned integer) among all 7680 variants produced by input permutation,
//! input negation and output negation.

use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};
use std::str::FromStr;
use std::sync::OnceLock;

use rustc_hash::FxHashSet;
use thiserror::Error;

pub const NUM_VARS: usize = 5;
pub const NUM_MINTERMS: usize = 1 << NUM_VARS;
pub const NUM_PERMS: usize = 120;
pub const NUM_TRANSFORMS: usize = NUM_PERMS * NUM_MINTERMS * 2;

const VAR_MASKS: [u32; NUM_VARS] = [0xaaaa_aaaa, 0xcccc_cccc, 0xf0f0_f0f0, 0xff00_ff00, 0xffff_0000];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TruthError {
    #[error("variable index {0} out of range (expected 0..=4)")]
    VarOutOfRange(usize),
    #[error("invalid truth table literal `{0}` (expected 8 hex digits)")]
    Parse(String),
    #[error("invalid permutation {0:?}")]
    BadPermutation([u8; NUM_VARS]),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TruthTable(pub u32);

impl TruthTable {
    pub const ZERO: TruthTable = TruthTable(0);
    pub const ONE: TruthTable = TruthTable(u32::MAX);

    /// Table of the projection onto variable `i`.
    pub fn elementary(i: usize) -> Result<Self, TruthError> {
        VAR_MASKS
            .get(i)
            .map(|&m| TruthTable(m))
            .ok_or(TruthError::VarOutOfRange(i))
    }

    #[inline]
    pub(crate) const fn var(i: usize) -> Self {
        TruthTable(VAR_MASKS[i])
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn bit(self, minterm: usize) -> bool {
        debug_assert!(minterm < NUM_MINTERMS);
        (self.0 >> minterm) & 1 != 0
    }

    /// Whether the function depends on variable `i`.
    pub fn depends_on(self, i: usize) -> bool {
        let shift = 1u32 << i;
        let neg = self.0 & !VAR_MASKS[i];
        let pos = (self.0 & VAR_MASKS[i]) >> shift;
        neg != pos
    }

    pub fn support_size(self) -> usize {
        (0..NUM_VARS).filter(|&i| self.depends_on(i)).count()
    }

    /// `g(x) = f(x ^ e_i)`.
    #[inline]
    pub fn flip(self, i: usize) -> Self {
        let shift = 1u32 << i;
        let m = VAR_MASKS[i];
        TruthTable(((self.0 & m) >> shift) | ((self.0 & !m) << shift))
    }

    /// Replicates the low `2^num_vars` bits over the whole word so the
    /// function reads as a 5-variable function independent of the
    /// variables at and above `num_vars`.
    pub fn lift(bits: u32, num_vars: usize) -> Self {
        assert!(num_vars <= NUM_VARS);
        let mut width = 1u32 << num_vars;
        let mut t = if width == 32 {
            bits
        } else {
            bits & ((1u32 << width) - 1)
        };
        while width < 32 {
            t |= t << width;
            width *= 2;
        }
        TruthTable(t)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({:08x})", self.0)
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08x}", self.0)
    }
}

impl FromStr for TruthTable {
    type Err = TruthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 8 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(TruthError::Parse(s.to_string()));
        }
        u32::from_str_radix(s, 16)
            .map(TruthTable)
            .map_err(|_| TruthError::Parse(s.to_string()))
    }
}

impl Not for TruthTable {
    type Output = TruthTable;
    #[inline]
    fn not(self) -> TruthTable {
        TruthTable(!self.0)
    }
}

impl BitAnd for TruthTable {
    type Output = TruthTable;
    #[inline]
    fn bitand(self, rhs: TruthTable) -> TruthTable {
        TruthTable(self.0 & rhs.0)
    }
}

impl BitOr for TruthTable {
    type Output = TruthTable;
    #[inline]
    fn bitor(self, rhs: TruthTable) -> TruthTable {
        TruthTable(self.0 | rhs.0)
    }
}

impl BitXor for TruthTable {
    type Output = TruthTable;
    #[inline]
    fn bitxor(self, rhs: TruthTable) -> TruthTable {
        TruthTable(self.0 ^ rhs.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TtOp {
    And,
    Xor,
    Not,
}

/// Bitwise operation on tables. `Not` ignores `b`; the binary operations
/// treat a missing `b` as the constant-false table.
pub fn tt_op(op: TtOp, a: TruthTable, b: Option<TruthTable>) -> TruthTable {
    let b = b.unwrap_or(TruthTable::ZERO);
    match op {
        TtOp::And => a & b,
        TtOp::Xor => a ^ b,
        TtOp::Not => !a,
    }
}

/// An element of the NPN group acting on 5-variable functions.
///
/// `apply(f)` is the function `g` with
/// `g(x) = f(y) ^ output_phase` where `y[perm[i]] = x[i] ^ input_phase[i]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NpnTransform {
    perm: [u8; NUM_VARS],
    input_phase: u8,
    output_phase: bool,
}

impl fmt::Debug for NpnTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "NpnTransform(perm={:?}, phase={:05b}, out={})",
            self.perm, self.input_phase, self.output_phase as u8
        )
    }
}

impl Default for NpnTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl NpnTransform {
    pub const IDENTITY: NpnTransform = NpnTransform {
        perm: [0, 1, 2, 3, 4],
        input_phase: 0,
        output_phase: false,
    };

    pub fn new(perm: [u8; NUM_VARS], input_phase: u8, output_phase: bool) -> Result<Self, TruthError> {
        let mut seen = 0u8;
        for &p in &perm {
            if p as usize >= NUM_VARS || seen & (1 << p) != 0 {
                return Err(TruthError::BadPermutation(perm));
            }
            seen |= 1 << p;
        }
        Ok(NpnTransform {
            perm,
            input_phase: input_phase & 0x1f,
            output_phase,
        })
    }

    /// Transform number `index` in the canonical enumeration order
    /// (lexicographic permutation, then input phase, then output phase).
    pub fn from_index(index: usize) -> Self {
        assert!(index < NUM_TRANSFORMS);
        let perm = perm_table().perms[index / (NUM_MINTERMS * 2)];
        let rest = index % (NUM_MINTERMS * 2);
        NpnTransform {
            perm,
            input_phase: (rest / 2) as u8,
            output_phase: rest % 2 == 1,
        }
    }

    pub fn perm(&self) -> [u8; NUM_VARS] {
        self.perm
    }

    pub fn input_phase(&self) -> u8 {
        self.input_phase
    }

    pub fn output_phase(&self) -> bool {
        self.output_phase
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn apply(&self, f: TruthTable) -> TruthTable {
        let mut g = 0u32;
        for m in 0..NUM_MINTERMS {
            let mut y = 0usize;
            for i in 0..NUM_VARS {
                let bit = ((m >> i) & 1) ^ ((self.input_phase as usize >> i) & 1);
                y |= bit << self.perm[i];
            }
            g |= (f.bit(y) as u32) << m;
        }
        if self.output_phase {
            g = !g;
        }
        TruthTable(g)
    }

    pub fn inverse(&self) -> NpnTransform {
        let mut perm = [0u8; NUM_VARS];
        let mut phase = 0u8;
        for i in 0..NUM_VARS {
            let j = self.perm[i] as usize;
            perm[j] = i as u8;
            if self.input_phase & (1 << i) != 0 {
                phase |= 1 << j;
            }
        }
        NpnTransform {
            perm,
            input_phase: phase,
            output_phase: self.output_phase,
        }
    }

    /// The transform equivalent to applying `self` first and then `next`.
    pub fn then(&self, next: &NpnTransform) -> NpnTransform {
        // next(self(f))(x) = f(z) ^ o1 ^ o2 with y[p2[i]] = x[i] ^ c2[i] and
        // z[p1[j]] = y[j] ^ c1[j].
        let mut perm = [0u8; NUM_VARS];
        let mut phase = 0u8;
        for (i, p) in perm.iter_mut().enumerate() {
            let j = next.perm[i] as usize;
            *p = self.perm[j];
            let bit = ((next.input_phase >> i) & 1) ^ ((self.input_phase >> j) & 1);
            phase |= bit << i;
        }
        NpnTransform {
            perm,
            input_phase: phase,
            output_phase: self.output_phase ^ next.output_phase,
        }
    }

    fn tie_key(&self, perm_index: usize) -> (usize, u8, bool) {
        (perm_index, self.input_phase, self.output_phase)
    }
}

struct PermTable {
    /// All permutations in lexicographic order.
    perms: Vec<[u8; NUM_VARS]>,
    /// Walk over all permutations where each step swaps two adjacent
    /// positions: `(position swapped to reach this step, lexicographic index)`.
    walk: Vec<(u8, u8)>,
}

fn perm_table() -> &'static PermTable {
    static TABLE: OnceLock<PermTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut perms = Vec::with_capacity(NUM_PERMS);
        let mut p = [0u8, 1, 2, 3, 4];
        loop {
            perms.push(p);
            if !next_permutation(&mut p) {
                break;
            }
        }
        let walk = adjacent_swap_walk()
            .into_iter()
            .map(|(pos, perm)| (pos, perms.binary_search(&perm).unwrap() as u8))
            .collect();
        PermTable { perms, walk }
    })
}

/// Steinhaus-Johnson-Trotter order over permutations of five elements.
fn adjacent_swap_walk() -> Vec<(u8, [u8; NUM_VARS])> {
    let mut perm = [0u8, 1, 2, 3, 4];
    // false = element looks left.
    let mut right = [false; NUM_VARS];
    let mut walk = vec![(0u8, perm)];
    loop {
        let mobile = (0..NUM_VARS)
            .filter(|&i| {
                let j = if right[perm[i] as usize] {
                    i + 1
                } else {
                    i.wrapping_sub(1)
                };
                j < NUM_VARS && perm[j] < perm[i]
            })
            .max_by_key(|&i| perm[i]);
        let Some(i) = mobile else { break };
        let value = perm[i];
        let j = if right[value as usize] { i + 1 } else { i - 1 };
        perm.swap(i, j);
        for v in (value + 1)..NUM_VARS as u8 {
            right[v as usize] = !right[v as usize];
        }
        walk.push((i.min(j) as u8, perm));
    }
    walk
}

fn next_permutation(p: &mut [u8]) -> bool {
    let n = p.len();
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Exchanges variables `i` and `i + 1`.
#[inline]
fn swap_adjacent(f: u32, i: usize) -> u32 {
    let shift = 1u32 << i;
    let up = VAR_MASKS[i] & !VAR_MASKS[i + 1];
    let keep = !(up | (up << shift));
    (f & keep) | ((f & up) << shift) | ((f >> shift) & up)
}

/// Visits every NPN variant of `f`, reporting the lexicographic index of
/// the permutation, the input phase and the output phase that produce it.
fn for_each_variant(f: TruthTable, mut visit: impl FnMut(u32, usize, u8, bool)) {
    let table = perm_table();
    let mut base = f.0;
    for (step, &(pos, lex)) in table.walk.iter().enumerate() {
        if step > 0 {
            // Swapping positions a, a+1 of the permutation swaps the same
            // variables of the permuted table.
            base = swap_adjacent(base, pos as usize);
        }
        let pi = lex as usize;
        let mut h = TruthTable(base);
        let mut phase = 0u8;
        for k in 0..NUM_MINTERMS {
            if k > 0 {
                let var = k.trailing_zeros() as usize;
                h = h.flip(var);
                phase ^= 1 << var;
            }
            visit(h.0, pi, phase, false);
            visit(!h.0, pi, phase, true);
        }
    }
}

/// Exact NPN canonical form of `f` and a transform `t` with
/// `t.apply(f) == canon`. Among transforms reaching the minimum, the one
/// with the smallest (permutation, input phase, output phase) wins.
pub fn canonicalize(f: TruthTable) -> (TruthTable, NpnTransform) {
    let table = perm_table();
    let mut best = f.0;
    let mut best_key = NpnTransform::IDENTITY.tie_key(0);
    for_each_variant(f, |v, pi, phase, out| {
        if v < best || (v == best && (pi, phase, out) < best_key) {
            best = v;
            best_key = (pi, phase, out);
        }
    });
    let (pi, phase, out) = best_key;
    let t = NpnTransform {
        perm: table.perms[pi],
        input_phase: phase,
        output_phase: out,
    };
    (TruthTable(best), t)
}

/// Canonical form only.
pub fn canonical_form(f: TruthTable) -> TruthTable {
    let mut best = f.0;
    for_each_variant(f, |v, _, _, _| best = best.min(v));
    TruthTable(best)
}

pub fn is_canonical(f: TruthTable) -> bool {
    canonical_form(f) == f
}

/// How to count classes of 5-variable functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassCountMode {
    /// Visit every function. For four or fewer variables this collects the
    /// distinct canonical forms; at five variables it marks whole orbits in
    /// a 2^32-bit set (512 MiB, slow).
    Exhaustive,
    /// Burnside's lemma over the NPN group: averages the number of
    /// functions fixed by each transform. Exact and fast.
    Burnside,
}

/// Number of NPN classes of functions of `num_vars` variables.
pub fn count_npn_classes(num_vars: usize, mode: ClassCountMode) -> u64 {
    assert!((1..=NUM_VARS).contains(&num_vars), "num_vars must be in 1..=5");
    match mode {
        ClassCountMode::Burnside => burnside_count(num_vars),
        ClassCountMode::Exhaustive if num_vars < NUM_VARS => {
            let n_funcs = 1u64 << (1u32 << num_vars);
            let mut classes = FxHashSet::default();
            for bits in 0..n_funcs {
                classes.insert(canonical_form(TruthTable::lift(bits as u32, num_vars)));
            }
            classes.len() as u64
        }
        ClassCountMode::Exhaustive => orbit_count_full(),
    }
}

fn burnside_count(n: usize) -> u64 {
    let minterms = 1usize << n;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut fixed_total: u128 = 0;
    loop {
        for phase in 0..minterms {
            // Cycle structure of x -> y with y[perm[i]] = x[i] ^ phase[i].
            let mut seen = vec![false; minterms];
            let mut cycles = 0u32;
            let mut all_even = true;
            for start in 0..minterms {
                if seen[start] {
                    continue;
                }
                let mut len = 0;
                let mut x = start;
                while !seen[x] {
                    seen[x] = true;
                    len += 1;
                    let mut y = 0;
                    for (i, &p) in perm.iter().enumerate() {
                        y |= (((x >> i) & 1) ^ ((phase >> i) & 1)) << p;
                    }
                    x = y;
                }
                cycles += 1;
                all_even &= len % 2 == 0;
            }
            fixed_total += 1u128 << cycles;
            if all_even {
                fixed_total += 1u128 << cycles;
            }
        }
        let mut p8: Vec<u8> = perm.iter().map(|&x| x as u8).collect();
        if !next_permutation(&mut p8) {
            break;
        }
        perm = p8.into_iter().map(|x| x as usize).collect();
    }
    let group: u128 = (1..=n as u128).product::<u128>() * minterms as u128 * 2;
    debug_assert_eq!(fixed_total % group, 0);
    (fixed_total / group) as u64
}

fn orbit_count_full() -> u64 {
    let mut marked = vec![0u64; 1 << 26];
    let mut classes = 0u64;
    for word in 0..marked.len() {
        while marked[word] != u64::MAX {
            let bit = (!marked[word]).trailing_zeros();
            let f = ((word as u32) << 6) | bit;
            classes += 1;
            for_each_variant(TruthTable(f), |v, _, _, _| {
                marked[(v >> 6) as usize] |= 1u64 << (v & 63);
            });
        }
    }
    classes
}
