use std::sync::OnceLock;
use std::time::Duration;

use aigrw5::aiger::{parse_aag, to_aag};
use aigrw5::cut::{cut_truth, enumerate_cuts, Cut};
use aigrw5::equiv::{
    check_equiv, exhaustive_block, num_exhaustive_blocks, output_tables, simulate_nodes, CheckMode, Verdict,
};
use aigrw5::forest::{generate_best_circuits, CandidateDb, GenOptions};
use aigrw5::mine::mine_practical_classes;
use aigrw5::rewrite::{rewrite_network, RewriteOptions};
use aigrw5::synthetic::{planted_redundancy, random_aig};
use aigrw5::truth::{canonicalize, NpnTransform, NUM_TRANSFORMS};
use aigrw5::{Aig, AigError, Lit, NodeId, TruthTable};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn aig_from(seed: u64, pis: usize, ands: usize) -> Aig {
    random_aig(&mut ChaCha8Rng::seed_from_u64(seed), pis, ands)
}

/// Global function of every node, one bit vector per node, over all input
/// patterns.
fn node_functions(aig: &Aig) -> Vec<Vec<u64>> {
    let blocks = num_exhaustive_blocks(aig.num_inputs());
    let mut per_node = vec![Vec::with_capacity(blocks); aig.num_nodes()];
    for b in 0..blocks {
        let vals = simulate_nodes(aig, &exhaustive_block(aig.num_inputs(), b));
        for (n, v) in per_node.iter_mut().zip(vals) {
            n.push(v);
        }
    }
    per_node
}

/// Mux tree over the inputs realizing the function given by `bits`.
fn shannon(aig: &mut Aig, bits: &[u64], var: usize) -> Lit {
    let n = aig.num_inputs();
    if var == n {
        return if bits[0] & 1 == 1 { Lit::TRUE } else { Lit::FALSE };
    }
    let total = 1usize << n;
    let half = 1usize << var;
    let get = |m: usize| (bits[m / 64] >> (m % 64)) & 1 == 1;
    let proj = |set: bool| -> Vec<u64> {
        // Minterms with input `var` fixed, reindexed so the remaining
        // inputs keep their positions.
        let mut out = vec![0u64; bits.len()];
        for m in 0..total {
            let src = if set { m | half } else { m & !half };
            if get(src) {
                out[m / 64] |= 1 << (m % 64);
            }
        }
        out
    };
    let lo = shannon(aig, &proj(false), var + 1);
    let hi = shannon(aig, &proj(true), var + 1);
    let x = aig.input(var);
    let a = aig.add_and(x, hi).unwrap();
    let b = aig.add_and(!x, lo).unwrap();
    aig.add_or(a, b).unwrap()
}

fn small_db() -> &'static CandidateDb {
    static DB: OnceLock<CandidateDb> = OnceLock::new();
    DB.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let mut corpus: Vec<Aig> = (0..10).map(|_| random_aig(&mut rng, 8, 120)).collect();
        corpus.push(planted_redundancy(&mut rng, 4, 0, 0).aig);
        let practical: Vec<TruthTable> = mine_practical_classes(&corpus, 2, 100)
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        let opts = GenOptions {
            u: 0,
            n_max: 1_000_000,
            max_pairs: None,
            time_limit: Some(Duration::from_secs(5)),
        };
        let (forest, table, _) = generate_best_circuits(&practical, &opts).unwrap();
        CandidateDb::new(forest, table)
    })
}

fn transform(idx: usize) -> NpnTransform {
    NpnTransform::from_index(idx % NUM_TRANSFORMS)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_is_class_invariant(f in any::<u32>(), idx in 0..NUM_TRANSFORMS) {
        let f = TruthTable(f);
        let (c, t) = canonicalize(f);
        prop_assert_eq!(t.apply(f), c);
        prop_assert_eq!(canonicalize(transform(idx).apply(f)).0, c);
        prop_assert!(c <= f);
    }

    #[test]
    fn inverse_undoes_apply(f in any::<u32>(), i in 0..NUM_TRANSFORMS, j in 0..NUM_TRANSFORMS) {
        let (f, a, b) = (TruthTable(f), transform(i), transform(j));
        prop_assert_eq!(a.inverse().apply(a.apply(f)), f);
        prop_assert_eq!(a.then(&b).apply(f), b.apply(a.apply(f)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn replace_with_equivalent_preserves_outputs(seed in any::<u64>(), pis in 2usize..8, ands in 1usize..80, pick in any::<u32>()) {
        let mut aig = aig_from(seed, pis, ands);
        let ids: Vec<NodeId> = aig.topo_order().into_iter().filter(|&n| aig.is_and(n)).collect();
        prop_assume!(!ids.is_empty());
        let old = ids[pick as usize % ids.len()];
        let before = output_tables(&aig).unwrap();
        let bits = node_functions(&aig)[old.index()].clone();
        let snapshot = aig.clone();
        let new = shannon(&mut aig, &bits, 0);
        match aig.replace_node(old, new) {
            Ok(()) => {
                aig.check_invariants().unwrap();
                prop_assert_eq!(output_tables(&aig).unwrap(), before);
                prop_assert!(!aig.is_live(old) || new.node() == old);
            }
            Err(AigError::Cycle { .. }) => {
                // The mux tree reused a node above `old`; nothing may change
                // besides the mux tree itself.
                aig.check_invariants().unwrap();
                prop_assert_eq!(output_tables(&aig).unwrap(), before);
                prop_assert!(aig.num_ands() >= snapshot.num_ands());
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn enumerated_cuts_are_cuts(seed in any::<u64>(), pis in 2usize..10, ands in 1usize..120, k in 2usize..=6) {
        let aig = aig_from(seed, pis, ands);
        let cuts = enumerate_cuts(&aig, k, 100).unwrap();
        let funcs = node_functions(&aig);
        for id in aig.topo_order() {
            let list = cuts.of(id);
            prop_assert_eq!(list[0], Cut::trivial(id));
            for c in list {
                prop_assert!(c.len() <= k);
                if !aig.is_and(id) || c.contains(id) || c.len() > 5 {
                    continue;
                }
                // The cut function composed with the leaf functions gives the
                // root's global function.
                let tt = cut_truth(&aig, id, c).unwrap();
                let leaves: Vec<&Vec<u64>> = c.leaves().map(|l| &funcs[l.index()]).collect();
                for (w, root_word) in funcs[id.index()].iter().enumerate() {
                    let mut word = 0u64;
                    for bit in 0..64 {
                        let m = leaves.iter().enumerate().fold(0usize, |m, (i, lw)| m | (((lw[w] >> bit) & 1) as usize) << i);
                        word |= (tt.bit(m) as u64) << bit;
                    }
                    let mask = if aig.num_inputs() < 6 { (1u64 << (1 << aig.num_inputs())) - 1 } else { u64::MAX };
                    prop_assert_eq!(word & mask, root_word & mask);
                }
            }
        }
    }

    #[test]
    fn aag_round_trip(seed in any::<u64>(), pis in 2usize..12, ands in 0usize..200) {
        let aig = aig_from(seed, pis, ands);
        let text = to_aag(&aig);
        let back = parse_aag(&text).unwrap();
        prop_assert_eq!(back.num_ands(), aig.num_ands());
        prop_assert_eq!(check_equiv(&aig, &back, CheckMode::Exhaustive).unwrap(), Verdict::Equivalent);
        prop_assert_eq!(to_aag(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rewriting_preserves_function_and_never_grows(seed in any::<u64>(), pis in 5usize..12, ands in 10usize..200, passes in 1usize..3, zero_gain in any::<bool>(), depth in any::<bool>()) {
        let original = aig_from(seed, pis, ands);
        let mut aig = original.clone();
        let opts = RewriteOptions { passes, zero_gain, preserve_depth: depth, ..Default::default() };
        let stats = rewrite_network(&mut aig, small_db(), &opts).unwrap();
        aig.check_invariants().unwrap();
        prop_assert_eq!(check_equiv(&original, &aig, CheckMode::Exhaustive).unwrap(), Verdict::Equivalent);
        prop_assert!(stats.nodes_after <= stats.nodes_before);
        for p in &stats.passes {
            prop_assert!(p.nodes_after <= p.nodes_before);
            prop_assert!(p.observed_gain >= p.predicted_gain);
            prop_assert_eq!(p.observed_gain, (p.nodes_before - p.nodes_after) as i64);
        }
        if depth {
            prop_assert!(aig.depth() <= original.depth());
        }
    }
}
