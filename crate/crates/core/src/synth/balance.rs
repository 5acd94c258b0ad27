//! Depth reduction by rebuilding AND trees.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::circuit::AigCircuit;

use super::network::{Lit, Network};

/// Collapses every maximal single-fanout, uncomplemented AND tree into its
/// leaf set and rebuilds it by repeatedly joining the two operands of lowest
/// level. Ties go to the smaller literal. Depth never increases.
pub fn balance_pass(c: &AigCircuit) -> AigCircuit {
    let net = Network::from_circuit(c).compact();
    balance_network(&net).to_circuit()
}

pub(crate) fn balance_network(net: &Network) -> Network {
    let n = net.len();
    let order = net.topo_ands();
    let mut refs = vec![0u32; n];
    let mut boundary = vec![false; n];
    for &id in &order {
        let (a, b) = net.fanin_lits(id).unwrap();
        for l in [a, b] {
            refs[l.node()] += 1;
            if l.is_complemented() {
                boundary[l.node()] = true;
            }
        }
    }
    boundary[net.po().node()] = true;
    for id in 0..n {
        if refs[id] > 1 {
            boundary[id] = true;
        }
    }

    let mut out = Network::new(net.num_inputs());
    let mut level: Vec<u32> = vec![0; out.len()];
    let mut map: Vec<Lit> = vec![Lit::FALSE; n];
    for i in 0..net.num_inputs() {
        map[i + 1] = out.input(i);
    }

    for &root in &order {
        if !boundary[root] {
            continue;
        }
        let mut leaves = Vec::new();
        let mut stack = vec![Lit::new(root, false)];
        while let Some(l) = stack.pop() {
            let id = l.node();
            if l.node() == root || (!l.is_complemented() && net.is_and(id) && !boundary[id]) {
                let (a, b) = net.fanin_lits(id).unwrap();
                stack.push(b);
                stack.push(a);
            } else {
                leaves.push(map[id].xor(l.is_complemented()));
            }
        }
        map[root] = build_tree(&mut out, &mut level, leaves);
    }
    let po = net.po();
    out.set_po(map[po.node()].xor(po.is_complemented()));
    out
}

fn build_tree(out: &mut Network, level: &mut Vec<u32>, mut leaves: Vec<Lit>) -> Lit {
    leaves.sort_unstable();
    leaves.dedup();
    if leaves.contains(&Lit::FALSE) || leaves.windows(2).any(|w| w[1] == !w[0]) {
        return Lit::FALSE;
    }
    leaves.retain(|&l| l != Lit::TRUE);
    if leaves.is_empty() {
        return Lit::TRUE;
    }
    let mut heap: BinaryHeap<Reverse<(u32, Lit)>> =
        leaves.into_iter().map(|l| Reverse((level[l.node()], l))).collect();
    while heap.len() > 1 {
        let Reverse((la, a)) = heap.pop().unwrap();
        let Reverse((lb, b)) = heap.pop().unwrap();
        let r = out.and(a, b);
        if r.node() >= level.len() {
            level.resize(r.node() + 1, 0);
            level[r.node()] = 1 + la.max(lb);
        }
        heap.push(Reverse((level[r.node()], r)));
    }
    heap.pop().unwrap().0 .1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::samples::{and_chain, and_tree, random_circuit};
    use crate::circuit::depth;
    use crate::synth::equivalent_exhaustive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chain_of_eight_becomes_depth_three() {
        let c = and_chain(8);
        assert_eq!(depth(&c), 7);
        let b = balance_pass(&c);
        assert_eq!(depth(&b), 3);
        assert_eq!(b.num_ands(), 7);
        assert!(equivalent_exhaustive(&c, &b));
    }

    #[test]
    fn balanced_tree_is_unchanged() {
        let c = and_tree(4);
        assert_eq!(balance_pass(&c).dump(), c.dump());
    }

    #[test]
    fn never_increases_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let c = random_circuit(&mut rng, 6, 40);
            let b = balance_pass(&c);
            assert!(depth(&b) <= depth(&c));
            assert!(equivalent_exhaustive(&c, &b));
        }
    }
}
