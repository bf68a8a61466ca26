//! Generated circuits for tests, benchmarks and demos.

use rand::Rng;

use crate::aig::{Aig, Lit};

/// Random AIG with `num_inputs` inputs and up to `num_ands` AND nodes.
/// Fanins lean toward recent nodes so the graph gets some depth. Every node
/// without fanouts drives an output.
pub fn random_aig(rng: &mut impl Rng, num_inputs: usize, num_ands: usize) -> Aig {
    assert!(num_inputs >= 2);
    let mut aig = Aig::new(num_inputs);
    let mut pool: Vec<Lit> = (0..num_inputs).map(|i| aig.input(i)).collect();
    for _ in 0..num_ands {
        let pick = |rng: &mut dyn rand::RngCore, pool: &[Lit]| {
            let n = pool.len();
            let i = if rng.gen_bool(0.6) {
                n - 1 - rng.gen_range(0..n.min(12))
            } else {
                rng.gen_range(0..n)
            };
            pool[i] ^ rng.gen::<bool>()
        };
        let a = pick(rng, &pool);
        let b = pick(rng, &pool);
        let l = aig.add_and(a, b).unwrap();
        if !l.is_const() && aig.is_and(l.node()) && !pool.contains(&l.regular()) {
            pool.push(l.regular());
        }
    }
    let sinks: Vec<Lit> = aig
        .topo_order()
        .into_iter()
        .filter(|&id| aig.is_and(id) && aig.refs(id) == 0)
        .map(|id| Lit::new(id, false))
        .collect();
    for l in sinks {
        let c = rng.gen::<bool>();
        aig.add_output(l ^ c).unwrap();
    }
    if aig.num_outputs() == 0 {
        aig.add_output(aig.input(0)).unwrap();
    }
    aig
}

/// A redundant 5-input cone that has a 4-node realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Template {
    /// `x0 & x1 & x2 & x3 & x4` built from overlapping pairs, 7 nodes.
    And5,
    /// `x0 & (x1 & x2 | x3 & x4)` distributed over both products, 7 nodes.
    AndOr,
}

impl Template {
    pub const ALL: [Template; 2] = [Template::And5, Template::AndOr];

    pub fn planted_size(self) -> usize {
        7
    }

    /// Four two-input gates are needed for any function of five inputs.
    pub fn optimal_size(self) -> usize {
        4
    }

    /// Builds the cone over `x` (input phases already applied).
    pub fn build(self, aig: &mut Aig, x: [Lit; 5]) -> Lit {
        let mut and = |a, b| aig.add_and(a, b).unwrap();
        match self {
            Template::And5 => {
                let p = and(x[0], x[1]);
                let q = and(x[1], x[2]);
                let r = and(x[2], x[3]);
                let s = and(x[3], x[4]);
                let pq = and(p, q);
                let rs = and(r, s);
                and(pq, rs)
            }
            Template::AndOr => {
                let bc = and(x[1], x[2]);
                let ab = and(x[0], x[1]);
                let abc = and(ab, bc);
                let de = and(x[3], x[4]);
                let ad = and(x[0], x[3]);
                let ade = and(ad, de);
                !and(!abc, !ade)
            }
        }
    }

    /// Truth table of the cone with identity phases, leaves in order.
    pub fn function(self) -> crate::truth::TruthTable {
        use crate::truth::TruthTable;
        let x = |i| TruthTable::elementary(i).unwrap();
        match self {
            Template::And5 => x(0) & x(1) & x(2) & x(3) & x(4),
            Template::AndOr => x(0) & (x(1) & x(2) | x(3) & x(4)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Planted {
    pub aig: Aig,
    pub cones: usize,
    /// Nodes above the optimum, summed over the planted cones.
    pub excess: usize,
}

/// `cones` planted cones on disjoint inputs with random input and output
/// phases, plus random background logic over `background_inputs` further
/// inputs that may read the cone outputs.
pub fn planted_redundancy(
    rng: &mut impl Rng,
    cones: usize,
    background_inputs: usize,
    background_ands: usize,
) -> Planted {
    let mut aig = Aig::new(5 * cones + background_inputs);
    let mut roots = Vec::new();
    let mut excess = 0;
    for c in 0..cones {
        let t = Template::ALL[rng.gen_range(0..Template::ALL.len())];
        let x: [Lit; 5] = std::array::from_fn(|i| aig.input(5 * c + i) ^ rng.gen::<bool>());
        let root = t.build(&mut aig, x) ^ rng.gen::<bool>();
        aig.add_output(root).unwrap();
        roots.push(root);
        excess += t.planted_size() - t.optimal_size();
    }
    if background_inputs >= 2 {
        let mut pool: Vec<Lit> = (0..background_inputs).map(|i| aig.input(5 * cones + i)).collect();
        pool.extend(roots.iter().copied());
        for _ in 0..background_ands {
            let a = pool[rng.gen_range(0..pool.len())] ^ rng.gen::<bool>();
            let b = pool[rng.gen_range(0..pool.len())] ^ rng.gen::<bool>();
            let l = aig.add_and(a, b).unwrap();
            if !l.is_const() && aig.is_and(l.node()) {
                pool.push(l.regular());
            }
        }
        let sinks: Vec<Lit> = aig
            .topo_order()
            .into_iter()
            .filter(|&id| aig.is_and(id) && aig.refs(id) == 0)
            .map(|id| Lit::new(id, false))
            .collect();
        for l in sinks {
            aig.add_output(l).unwrap();
        }
    }
    Planted { aig, cones, excess }
}

/// Ripple-carry adder: inputs `a[0..n]`, `b[0..n]`; outputs sum bits then
/// carry out.
pub fn ripple_adder(bits: usize) -> Aig {
    let mut aig = Aig::new(2 * bits);
    let mut carry = Lit::FALSE;
    let mut sums = Vec::new();
    for i in 0..bits {
        let a = aig.input(i);
        let b = aig.input(bits + i);
        let ab = aig.add_xor(a, b).unwrap();
        sums.push(aig.add_xor(ab, carry).unwrap());
        let g = aig.add_and(a, b).unwrap();
        let p = aig.add_and(ab, carry).unwrap();
        carry = aig.add_or(g, p).unwrap();
    }
    for s in sums {
        aig.add_output(s).unwrap();
    }
    aig.add_output(carry).unwrap();
    aig
}

/// Array multiplier of two `bits`-wide operands, `2 * bits` product bits.
pub fn array_multiplier(bits: usize) -> Aig {
    let mut aig = Aig::new(2 * bits);
    let mut acc: Vec<Lit> = vec![Lit::FALSE; 2 * bits];
    for j in 0..bits {
        let mut carry = Lit::FALSE;
        for i in 0..bits {
            let pp = aig.add_and(aig.input(i), aig.input(bits + j)).unwrap();
            let s = acc[i + j];
            let x = aig.add_xor(s, pp).unwrap();
            let sum = aig.add_xor(x, carry).unwrap();
            let g = aig.add_and(s, pp).unwrap();
            let p = aig.add_and(x, carry).unwrap();
            carry = aig.add_or(g, p).unwrap();
            acc[i + j] = sum;
        }
        acc[j + bits] = carry;
    }
    for l in acc {
        aig.add_output(l).unwrap();
    }
    aig
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::{output_tables, simulate};
    use crate::truth::TruthTable;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn templates_compute_their_functions() {
        for t in Template::ALL {
            let mut aig = Aig::new(5);
            let x = std::array::from_fn(|i| aig.input(i));
            let root = t.build(&mut aig, x);
            aig.add_output(root).unwrap();
            assert_eq!(aig.num_ands(), t.planted_size());
            let tt = output_tables(&aig).unwrap()[0][0] as u32;
            assert_eq!(TruthTable(tt), t.function());
            assert_eq!(t.function().support_size(), 5);
        }
    }

    #[test]
    fn random_aig_has_no_dangling_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let aig = random_aig(&mut rng, 8, 100);
            aig.check_invariants().unwrap();
            assert_eq!(aig.reachable_ands(), aig.num_ands());
        }
    }

    #[test]
    fn planted_excess() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = planted_redundancy(&mut rng, 4, 6, 30);
        assert_eq!(p.excess, 12);
        assert_eq!(p.aig.num_inputs(), 26);
        p.aig.check_invariants().unwrap();
    }

    #[test]
    fn arithmetic_is_correct() {
        let add = ripple_adder(4);
        let mul = array_multiplier(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (a, b) = (rng.gen_range(0..16u64), rng.gen_range(0..16u64));
            let words: Vec<u64> = (0..8)
                .map(|i| if i < 4 { a >> i & 1 } else { b >> (i - 4) & 1 })
                .collect();
            let out = simulate(&add, &words).unwrap();
            let s: u64 = out.iter().enumerate().map(|(i, w)| (w & 1) << i).sum();
            assert_eq!(s, a + b);
            let (a, b) = (a % 8, b % 8);
            let words: Vec<u64> = (0..6)
                .map(|i| if i < 3 { a >> i & 1 } else { b >> (i - 3) & 1 })
                .collect();
            let out = simulate(&mul, &words).unwrap();
            let p: u64 = out.iter().enumerate().map(|(i, w)| (w & 1) << i).sum();
            assert_eq!(p, a * b);
        }
    }
}
