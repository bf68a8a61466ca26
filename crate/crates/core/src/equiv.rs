//! Bit-parallel simulation and simulation-based equivalence checking.
//!
//! Exhaustive mode enumerates every input assignment and is a proof for up
//! to [`MAX_EXHAUSTIVE_INPUTS`] inputs. Random mode only ever finds
//! counterexamples; a clean run is reported as inconclusive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::aig::{Aig, Lit, NodeKind};

pub const MAX_EXHAUSTIVE_INPUTS: usize = 16;

/// Word `i` enumerates variable `i` over the 64 assignments of six inputs.
pub const PATTERN_MASKS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("expected {expected} input words, got {got}")]
    WordCount { expected: usize, got: usize },
    #[error("interface mismatch: {a_in}/{a_out} vs {b_in}/{b_out} inputs/outputs")]
    Interface {
        a_in: usize,
        a_out: usize,
        b_in: usize,
        b_out: usize,
    },
    #[error("exhaustive checking supports at most {MAX_EXHAUSTIVE_INPUTS} inputs, got {0}")]
    TooManyInputs(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    /// `words` batches of 64 random patterns each.
    Random {
        words: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    Counterexample { output: usize, inputs: Vec<bool> },
    Inconclusive { patterns: u64 },
}

impl Verdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, Verdict::Counterexample { .. })
    }
}

/// Per-node simulation words, indexed by node id. Tombstones read as zero.
pub fn simulate_nodes(aig: &Aig, input_words: &[u64]) -> Vec<u64> {
    assert_eq!(input_words.len(), aig.num_inputs());
    let mut values = vec![0u64; aig.num_nodes()];
    for (&id, &w) in aig.inputs().iter().zip(input_words) {
        values[id.index()] = w;
    }
    for id in aig.topo_order() {
        if aig.kind(id) == NodeKind::And {
            let [a, b] = aig.fanins(id);
            values[id.index()] = lit_word(&values, a) & lit_word(&values, b);
        }
    }
    values
}

#[inline]
pub fn lit_word(values: &[u64], l: Lit) -> u64 {
    let w = values[l.node().index()];
    if l.is_complemented() {
        !w
    } else {
        w
    }
}

/// One 64-bit word per output for the given input words.
pub fn simulate(aig: &Aig, input_words: &[u64]) -> Result<Vec<u64>, EquivError> {
    if input_words.len() != aig.num_inputs() {
        return Err(EquivError::WordCount {
            expected: aig.num_inputs(),
            got: input_words.len(),
        });
    }
    let values = simulate_nodes(aig, input_words);
    Ok(aig.outputs().iter().map(|&o| lit_word(&values, o)).collect())
}

/// Input words for block `block` of the exhaustive enumeration: the low six
/// inputs follow [`PATTERN_MASKS`], higher inputs are constant per block.
pub fn exhaustive_block(num_inputs: usize, block: usize) -> Vec<u64> {
    (0..num_inputs)
        .map(|i| {
            if i < 6 {
                PATTERN_MASKS[i]
            } else if (block >> (i - 6)) & 1 == 1 {
                u64::MAX
            } else {
                0
            }
        })
        .collect()
}

pub fn num_exhaustive_blocks(num_inputs: usize) -> usize {
    1usize << num_inputs.saturating_sub(6)
}

/// Mask of the meaningful bits of an exhaustive block.
fn block_mask(num_inputs: usize) -> u64 {
    if num_inputs >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << num_inputs)) - 1
    }
}

/// Complete truth tables of every output, as consecutive exhaustive blocks.
pub fn output_tables(aig: &Aig) -> Result<Vec<Vec<u64>>, EquivError> {
    let n = aig.num_inputs();
    if n > MAX_EXHAUSTIVE_INPUTS {
        return Err(EquivError::TooManyInputs(n));
    }
    let mask = block_mask(n);
    let mut tables = vec![Vec::with_capacity(num_exhaustive_blocks(n)); aig.num_outputs()];
    for block in 0..num_exhaustive_blocks(n) {
        let words = simulate(aig, &exhaustive_block(n, block))?;
        for (t, w) in tables.iter_mut().zip(words) {
            t.push(w & mask);
        }
    }
    Ok(tables)
}

fn assignment(num_inputs: usize, words: &[u64], bit: u32) -> Vec<bool> {
    (0..num_inputs).map(|i| (words[i] >> bit) & 1 == 1).collect()
}

pub fn check_equiv(a: &Aig, b: &Aig, mode: CheckMode) -> Result<Verdict, EquivError> {
    if a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs() {
        return Err(EquivError::Interface {
            a_in: a.num_inputs(),
            a_out: a.num_outputs(),
            b_in: b.num_inputs(),
            b_out: b.num_outputs(),
        });
    }
    let n = a.num_inputs();
    let compare = |words: &[u64], mask: u64| -> Result<Option<Verdict>, EquivError> {
        let wa = simulate(a, words)?;
        let wb = simulate(b, words)?;
        for (output, (x, y)) in wa.iter().zip(&wb).enumerate() {
            let diff = (x ^ y) & mask;
            if diff != 0 {
                let inputs = assignment(n, words, diff.trailing_zeros());
                return Ok(Some(Verdict::Counterexample { output, inputs }));
            }
        }
        Ok(None)
    };
    match mode {
        CheckMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_INPUTS {
                return Err(EquivError::TooManyInputs(n));
            }
            let mask = block_mask(n);
            for block in 0..num_exhaustive_blocks(n) {
                if let Some(cex) = compare(&exhaustive_block(n, block), mask)? {
                    return Ok(cex);
                }
            }
            Ok(Verdict::Equivalent)
        }
        CheckMode::Random { words, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..words {
                let block: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
                if let Some(cex) = compare(&block, u64::MAX)? {
                    return Ok(cex);
                }
            }
            Ok(Verdict::Inconclusive {
                patterns: words as u64 * 64,
            })
        }
    }
}
