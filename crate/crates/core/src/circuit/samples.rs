//! Small reference circuits and a random circuit generator, shared by tests
//! and examples.

use rand::Rng;

use super::{AigBuilder, AigCircuit, NodeId};

/// Left-deep AND chain over `n` PIs (depth `n - 1`).
pub fn and_chain(n: usize) -> AigCircuit {
    let (mut b, p) = AigBuilder::with_pis(n);
    let root = p[1..].iter().fold(p[0], |acc, &x| b.and(acc, x));
    b.finish(root)
}

/// Balanced AND tree over `n` PIs (depth `ceil(log2 n)`).
pub fn and_tree(n: usize) -> AigCircuit {
    let (mut b, mut layer) = AigBuilder::with_pis(n);
    while layer.len() > 1 {
        layer = layer
            .chunks(2)
            .map(|p| if p.len() == 2 { b.and(p[0], p[1]) } else { p[0] })
            .collect::<Vec<NodeId>>();
    }
    b.finish(layer[0])
}

/// Random AIG with `num_pis` inputs and `num_gates` gates, each AND operand
/// inverted with probability 1/2. The last gate drives the PO; dangling
/// gates are removed.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, num_pis: usize, num_gates: usize) -> AigCircuit {
    assert!(num_pis >= 1);
    let (mut b, pis) = AigBuilder::with_pis(num_pis);
    let mut pool: Vec<NodeId> = pis;
    for _ in 0..num_gates {
        // Bias operand choice towards recent nodes to get deep circuits.
        let pick = |rng: &mut R, len: usize| {
            if rng.random_bool(0.5) {
                rng.random_range(len.saturating_sub(4)..len)
            } else {
                rng.random_range(0..len)
            }
        };
        let x = pool[pick(rng, pool.len())];
        let y = pool[pick(rng, pool.len())];
        let x = if rng.random_bool(0.5) { b.not(x) } else { x };
        let y = if rng.random_bool(0.5) { b.not(y) } else { y };
        pool.push(b.and(x, y));
    }
    let mut po = *pool.last().unwrap();
    if rng.random_bool(0.5) {
        po = b.not(po);
    }
    b.finish(po).cleanup()
}
