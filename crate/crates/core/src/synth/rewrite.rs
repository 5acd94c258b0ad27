//! Cut-based rewriting with a precomputed NPN template library.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::circuit::AigCircuit;

use super::cuts::{cut_function, mffc, Cut, CutCache, DEFAULT_CUT_CAP, MAX_CUT_SIZE};
use super::library::{RewriteLibrary, Template, TemplateLit};
use super::network::{Lit, Network};
use super::truth::{npn_canonical_cached, NpnTransform};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStats {
    pub ands_before: usize,
    pub ands_after: usize,
    pub replacements: usize,
}

/// One rewriting sweep over the gates in topological order.
///
/// For every gate, each non-trivial 4-feasible cut is matched against the
/// library; the gain of a candidate is the size of the cut's MFFC minus the
/// gates the template adds after structural-hash reuse. The best candidate is
/// applied when its gain is strictly positive. The result never has more
/// nodes than the input.
pub fn rewrite_pass(c: &AigCircuit, lib: &RewriteLibrary) -> (AigCircuit, RewriteStats) {
    let net = Network::from_circuit(c).compact();
    let mut stats = RewriteStats {
        ands_before: net.num_ands(),
        ..Default::default()
    };
    let out_net = rewrite_network(&net, lib, &mut stats);
    stats.ands_after = out_net.num_ands();
    let out = out_net.to_circuit();
    if out.len() > c.len() {
        // Inverter bookkeeping can outweigh the AND savings.
        stats.ands_after = stats.ands_before;
        stats.replacements = 0;
        return (c.clone(), stats);
    }
    (out, stats)
}

struct Candidate {
    gain: i64,
    cut: Cut,
    table: u16,
    inputs: [Lit; 4],
    output_neg: bool,
}

impl Candidate {
    /// Higher gain, then fewer leaves, then smaller local table.
    fn better_than(&self, other: &Candidate) -> bool {
        (self.gain, std::cmp::Reverse(self.cut.len()), std::cmp::Reverse(self.table))
            > (other.gain, std::cmp::Reverse(other.cut.len()), std::cmp::Reverse(other.table))
    }
}

pub(crate) fn rewrite_network(net: &Network, lib: &RewriteLibrary, stats: &mut RewriteStats) -> Network {
    let mut net = net.clone();
    let mut cache = CutCache::new(MAX_CUT_SIZE, DEFAULT_CUT_CAP);
    let (mut live, mut refs) = liveness(&net);

    for root in net.topo_ands() {
        if !live[root] {
            continue;
        }
        let mut best: Option<(Candidate, &Template)> = None;
        for cut in cache.cuts(&net, root) {
            if cut.is_trivial() {
                continue;
            }
            let leaves = cut.leaf_vec();
            let Some(table) = cut_function(&net, root, &leaves) else {
                continue;
            };
            let (canon, tr) = npn_canonical_cached(table);
            let Some(template) = lib.get(canon) else {
                continue;
            };
            let inputs = template_inputs(&leaves, tr);
            let cone = mffc(&net, root, &leaves, &refs);
            let Some(added) = count_new_gates(&net, template, inputs, &cone, root) else {
                continue;
            };
            let cand = Candidate {
                gain: cone.len() as i64 - added as i64,
                cut,
                table: table.0,
                inputs,
                output_neg: tr.output_neg,
            };
            if best.as_ref().is_none_or(|(b, _)| cand.better_than(b)) {
                best = Some((cand, template));
            }
        }

        let Some((cand, template)) = best else { continue };
        if cand.gain <= 0 {
            continue;
        }
        let new = template.build(&mut net, cand.inputs).xor(cand.output_neg);
        if new.node() == root {
            continue;
        }
        substitute(&mut net, root, new, &live);
        (live, refs) = liveness(&net);
        for (id, &alive) in live.iter().enumerate().take(net.len()) {
            if net.is_and(id) && !alive {
                net.unhash(id);
            }
        }
        cache.clear();
        stats.replacements += 1;
    }
    net.compact()
}

/// Template input `i` is driven by `leaf[perm[i]]` complemented by `neg_i`;
/// inputs beyond the cut are don't-cares and tied to constant 0. The caller
/// complements the output when the transform says so.
fn template_inputs(leaves: &[usize], tr: NpnTransform) -> [Lit; 4] {
    let mut inputs = [Lit::FALSE; 4];
    for (i, slot) in inputs.iter_mut().enumerate() {
        let src = tr.perm[i] as usize;
        if let Some(&leaf) = leaves.get(src) {
            *slot = Lit::new(leaf, false).xor(tr.input_negated(i));
        }
    }
    inputs
}

/// Gates the template would add, counting reused MFFC gates as added since
/// they would otherwise have been freed. `None` if the template would reuse
/// the root itself.
fn count_new_gates(
    net: &Network,
    template: &Template,
    inputs: [Lit; 4],
    cone: &HashSet<usize>,
    root: usize,
) -> Option<usize> {
    let mut vals: Vec<Option<Lit>> = Vec::with_capacity(template.gates.len());
    let resolve = |vals: &[Option<Lit>], l: TemplateLit| -> Option<Lit> {
        let base = match l >> 1 {
            0 => Some(Lit::FALSE),
            v @ 1..=4 => Some(inputs[v as usize - 1]),
            v => vals[v as usize - 5],
        };
        base.map(|b| b.xor(l & 1 == 1))
    };
    let mut added = 0;
    for &(a, b) in &template.gates {
        let (x, y) = (resolve(&vals, a), resolve(&vals, b));
        let v = match (x, y) {
            (Some(x), Some(y)) => match net.lookup_and(x, y) {
                Some(l) => {
                    if l.node() == root {
                        return None;
                    }
                    if !l.is_const() && cone.contains(&l.node()) {
                        added += 1;
                    }
                    Some(l)
                }
                None => {
                    added += 1;
                    None
                }
            },
            (Some(Lit::FALSE), None) | (None, Some(Lit::FALSE)) => Some(Lit::FALSE),
            (Some(Lit::TRUE), None) => y,
            (None, Some(Lit::TRUE)) => x,
            _ => {
                added += 1;
                None
            }
        };
        vals.push(v);
    }
    if let Some(out) = resolve(&vals, template.output) {
        if out.node() == root {
            return None;
        }
    }
    Some(added)
}

/// Redirects every live reference to `old` onto `new`.
fn substitute(net: &mut Network, old: usize, new: Lit, live: &[bool]) {
    let sub = |l: Lit| if l.node() == old { new.xor(l.is_complemented()) } else { l };
    for (id, &alive) in live.iter().enumerate().take(net.len()) {
        if !alive {
            continue;
        }
        if let Some((a, b)) = net.fanin_lits(id) {
            if a.node() == old || b.node() == old {
                net.set_fanins(id, sub(a), sub(b));
            }
        }
    }
    let po = net.po();
    net.set_po(sub(po));
}

/// Live gates (in the PO cone) and their reference counts.
fn liveness(net: &Network) -> (Vec<bool>, Vec<u32>) {
    let mut live = vec![false; net.len()];
    let mut refs = vec![0u32; net.len()];
    for id in net.topo_ands() {
        live[id] = true;
        let (a, b) = net.fanin_lits(id).unwrap();
        refs[a.node()] += 1;
        refs[b.node()] += 1;
    }
    refs[net.po().node()] += 1;
    (live, refs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::samples::{and_tree, random_circuit};
    use crate::circuit::AigBuilder;
    use crate::synth::equivalent_exhaustive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lib() -> &'static RewriteLibrary {
        RewriteLibrary::bundled()
    }

    #[test]
    fn double_negated_and_shrinks() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let n1 = b.not(g);
        let n2 = b.not(n1);
        let c = b.finish(n2);
        let (out, _) = rewrite_pass(&c, lib());
        assert!(out.len() < c.len());
        assert_eq!(out.num_ands(), 1);
        assert!(equivalent_exhaustive(&c, &out));
    }

    #[test]
    fn minimal_tree_is_a_fixpoint() {
        let c = and_tree(4);
        let (out, stats) = rewrite_pass(&c, lib());
        assert_eq!(stats.replacements, 0);
        assert_eq!(out.dump(), c.dump());
    }

    #[test]
    fn redundant_cone_is_merged() {
        // x1 & x2 computed twice: directly and as !(!x1 | !x2), then ANDed with x3.
        let (mut b, p) = AigBuilder::with_pis(3);
        let direct = b.and(p[0], p[1]);
        let n1 = b.not(p[0]);
        let n2 = b.not(p[1]);
        let or_inv = {
            let a = b.and(n1, p[2]);
            let a2 = b.and(n2, p[2]);
            let na = b.not(a);
            let na2 = b.not(a2);
            b.and(na, na2)
        };
        // or_inv = !(!x1 & x3) & !(!x2 & x3) = x3 -> (x1 & x2)
        let g = b.and(or_inv, p[2]);
        let h = b.and(g, direct);
        let c = b.finish(h);
        let (out, stats) = rewrite_pass(&c, lib());
        assert!(stats.replacements >= 1);
        assert!(c.num_ands() - out.num_ands() >= 1);
        assert!(equivalent_exhaustive(&c, &out));
        assert_eq!(out.num_ands(), 2);
    }

    #[test]
    fn preserves_function_on_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let c = random_circuit(&mut rng, 6, 30);
            let (out, stats) = rewrite_pass(&c, lib());
            assert!(equivalent_exhaustive(&c, &out));
            assert!(out.len() <= c.len());
            assert!(stats.ands_after <= stats.ands_before);
        }
    }
}
