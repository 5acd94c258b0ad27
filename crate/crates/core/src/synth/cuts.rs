//! K-feasible cut enumeration, local cut functions and MFFCs.
//!
//! Everything here is generic over [`DagView`] so that the same routines
//! serve explicit-inverter circuits and the complemented-edge network.

use std::collections::{HashMap, HashSet};

use crate::circuit::{AigCircuit, Gate};

use super::network::{NetNode, Network};
use super::truth::{TruthTable4, VAR_TABLES};

pub const MAX_CUT_SIZE: usize = 4;
/// Non-dominated cuts kept per node, fewest leaves first.
pub const DEFAULT_CUT_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeView {
    Const,
    Input,
    /// Operands with their complement flags.
    And((usize, bool), (usize, bool)),
    Not(usize),
}

pub trait DagView {
    fn num_nodes(&self) -> usize;
    fn view(&self, id: usize) -> NodeView;

    fn fanins(&self, id: usize) -> Vec<usize> {
        match self.view(id) {
            NodeView::And((a, _), (b, _)) => vec![a, b],
            NodeView::Not(a) => vec![a],
            _ => Vec::new(),
        }
    }
}

impl DagView for AigCircuit {
    fn num_nodes(&self) -> usize {
        self.len()
    }

    fn view(&self, id: usize) -> NodeView {
        match self.gate(id) {
            Gate::Const0 => NodeView::Const,
            Gate::Pi => NodeView::Input,
            Gate::And(a, b) => NodeView::And((a, false), (b, false)),
            Gate::Not(a) => NodeView::Not(a),
        }
    }
}

impl DagView for Network {
    fn num_nodes(&self) -> usize {
        self.len()
    }

    fn view(&self, id: usize) -> NodeView {
        match self.node(id) {
            NetNode::Const => NodeView::Const,
            NetNode::Input(_) => NodeView::Input,
            NetNode::And(a, b) => {
                NodeView::And((a.node(), a.is_complemented()), (b.node(), b.is_complemented()))
            }
        }
    }
}

/// A set of at most four leaves dominating `root`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cut {
    pub root: usize,
    leaves: [u32; MAX_CUT_SIZE],
    len: u8,
}

impl Cut {
    pub fn trivial(root: usize) -> Self {
        Self {
            root,
            leaves: [root as u32, 0, 0, 0],
            len: 1,
        }
    }

    /// Leaves are stored sorted and deduplicated.
    pub fn new(root: usize, leaves: &[usize]) -> Self {
        let mut sorted: Vec<usize> = leaves.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert!(!sorted.is_empty() && sorted.len() <= MAX_CUT_SIZE);
        let mut arr = [0u32; MAX_CUT_SIZE];
        for (slot, &l) in arr.iter_mut().zip(&sorted) {
            *slot = l as u32;
        }
        Self {
            root,
            leaves: arr,
            len: sorted.len() as u8,
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.leaves[..self.len as usize].iter().map(|&l| l as usize)
    }

    pub fn leaf_vec(&self) -> Vec<usize> {
        self.leaves().collect()
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.len == 1 && self.leaves[0] as usize == self.root
    }

    fn leaf_slice(&self) -> &[u32] {
        &self.leaves[..self.len as usize]
    }

    fn is_subset_of(&self, other: &Cut) -> bool {
        self.leaf_slice().iter().all(|l| other.leaf_slice().contains(l))
    }

    fn merge(root: usize, a: &Cut, b: &Cut, k: usize) -> Option<Cut> {
        let mut out = [0u32; MAX_CUT_SIZE];
        let (x, y) = (a.leaf_slice(), b.leaf_slice());
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < x.len() || j < y.len() {
            let next = match (x.get(i), y.get(j)) {
                (Some(&p), Some(&q)) if p == q => {
                    i += 1;
                    j += 1;
                    p
                }
                (Some(&p), Some(&q)) if p < q => {
                    i += 1;
                    p
                }
                (Some(_), Some(&q)) => {
                    j += 1;
                    q
                }
                (Some(&p), None) => {
                    i += 1;
                    p
                }
                (None, Some(&q)) => {
                    j += 1;
                    q
                }
                (None, None) => unreachable!(),
            };
            if n == k {
                return None;
            }
            out[n] = next;
            n += 1;
        }
        Some(Cut {
            root,
            leaves: out,
            len: n as u8,
        })
    }

    fn with_root(mut self, root: usize) -> Cut {
        self.root = root;
        self
    }
}

fn filter_cuts(mut cuts: Vec<Cut>, cap: usize) -> Vec<Cut> {
    cuts.sort_by(|a, b| a.len.cmp(&b.len).then_with(|| a.leaf_slice().cmp(b.leaf_slice())));
    cuts.dedup_by(|a, b| a.leaf_slice() == b.leaf_slice());
    let mut kept: Vec<Cut> = Vec::with_capacity(cuts.len());
    for cut in cuts {
        if kept.iter().any(|k| k.is_subset_of(&cut)) {
            continue;
        }
        kept.push(cut);
    }
    kept.truncate(cap);
    kept
}

/// Cut set of one node from the cut sets of its fanins. The trivial cut is
/// always first and never dropped by the cap.
fn node_cuts_from(
    dag: &impl DagView,
    id: usize,
    fanin_cuts: &dyn Fn(usize) -> Vec<Cut>,
    k: usize,
    cap: usize,
) -> Vec<Cut> {
    let trivial = Cut::trivial(id);
    let merged: Vec<Cut> = match dag.view(id) {
        NodeView::Const | NodeView::Input => Vec::new(),
        NodeView::Not(a) => fanin_cuts(a).into_iter().map(|c| c.with_root(id)).collect(),
        NodeView::And((a, _), (b, _)) => {
            let (ca, cb) = (fanin_cuts(a), fanin_cuts(b));
            let mut out = Vec::new();
            for x in &ca {
                for y in &cb {
                    if let Some(m) = Cut::merge(id, x, y, k) {
                        out.push(m);
                    }
                }
            }
            out
        }
    };
    let mut cuts = vec![trivial];
    cuts.extend(filter_cuts(
        merged.into_iter().filter(|c| !c.is_trivial()).collect(),
        cap.saturating_sub(1),
    ));
    cuts
}

/// Cut sets of every node of a topologically indexed DAG.
pub fn enumerate_cuts(dag: &impl DagView, k: usize, cap: usize) -> Vec<Vec<Cut>> {
    assert!((1..=MAX_CUT_SIZE).contains(&k));
    let mut all: Vec<Vec<Cut>> = Vec::with_capacity(dag.num_nodes());
    for id in 0..dag.num_nodes() {
        let cuts = node_cuts_from(dag, id, &|f| all[f].clone(), k, cap);
        all.push(cuts);
    }
    all
}

/// Lazily computed cut sets for a DAG whose indices are not topological.
pub(crate) struct CutCache {
    cache: HashMap<usize, Vec<Cut>>,
    k: usize,
    cap: usize,
}

impl CutCache {
    pub fn new(k: usize, cap: usize) -> Self {
        Self {
            cache: HashMap::new(),
            k,
            cap,
        }
    }

    pub fn clear(&mut self) {
        self.cache.clear();
    }

    pub fn cuts(&mut self, dag: &impl DagView, id: usize) -> Vec<Cut> {
        // Post-order over the missing part of the cone.
        let mut stack = vec![(id, false)];
        while let Some((v, ready)) = stack.pop() {
            if self.cache.contains_key(&v) {
                continue;
            }
            if ready {
                let cache = &self.cache;
                let cuts = node_cuts_from(dag, v, &|f| cache[&f].clone(), self.k, self.cap);
                self.cache.insert(v, cuts);
            } else {
                stack.push((v, true));
                for f in dag.fanins(v) {
                    if !self.cache.contains_key(&f) {
                        stack.push((f, false));
                    }
                }
            }
        }
        self.cache[&id].clone()
    }
}

/// Function of `root` over `leaves` by local simulation of the cone between
/// them. Leaf `i` is input `i`. Returns `None` if `leaves` do not cut every
/// path from the PIs to `root`.
pub fn cut_function(dag: &impl DagView, root: usize, leaves: &[usize]) -> Option<TruthTable4> {
    assert!(leaves.len() <= MAX_CUT_SIZE);
    let mut val: HashMap<usize, u16> = HashMap::new();
    for (i, &l) in leaves.iter().enumerate() {
        val.insert(l, VAR_TABLES[i]);
    }
    let mut stack = vec![(root, false)];
    while let Some((v, ready)) = stack.pop() {
        if val.contains_key(&v) {
            continue;
        }
        let view = dag.view(v);
        if !ready {
            match view {
                NodeView::Const => {
                    val.insert(v, 0);
                }
                NodeView::Input => return None,
                _ => {
                    stack.push((v, true));
                    for f in dag.fanins(v) {
                        stack.push((f, false));
                    }
                }
            }
            continue;
        }
        let word = match view {
            NodeView::And((a, ca), (b, cb)) => {
                let x = val[&a] ^ if ca { 0xFFFF } else { 0 };
                let y = val[&b] ^ if cb { 0xFFFF } else { 0 };
                x & y
            }
            NodeView::Not(a) => !val[&a],
            _ => unreachable!(),
        };
        val.insert(v, word);
    }
    Some(TruthTable4(val[&root]))
}

/// Reference counts: gate readers plus one for the PO.
pub fn reference_counts(dag: &impl DagView, po: usize) -> Vec<u32> {
    let mut refs = vec![0u32; dag.num_nodes()];
    for id in 0..dag.num_nodes() {
        for f in dag.fanins(id) {
            refs[f] += 1;
        }
    }
    refs[po] += 1;
    refs
}

/// Maximum fanout-free cone of `root` bounded by `leaves`: the gates that
/// become dead once `root` stops being referenced.
pub fn mffc(dag: &impl DagView, root: usize, leaves: &[usize], refs: &[u32]) -> HashSet<usize> {
    let mut cone = HashSet::new();
    cone.insert(root);
    let mut local: HashMap<usize, u32> = HashMap::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for f in dag.fanins(v) {
            if leaves.contains(&f) || matches!(dag.view(f), NodeView::Input | NodeView::Const) {
                continue;
            }
            let r = local.entry(f).or_insert(refs[f]);
            *r -= 1;
            if *r == 0 {
                cone.insert(f);
                stack.push(f);
            }
        }
    }
    cone
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::samples::and_tree;
    use crate::circuit::{cnf_to_aig, parse_dimacs, AigBuilder};

    #[test]
    fn pi_has_only_trivial_cut() {
        let c = and_tree(2);
        let cuts = enumerate_cuts(&c, 4, DEFAULT_CUT_CAP);
        assert_eq!(cuts[0], vec![Cut::trivial(0)]);
    }

    #[test]
    fn and_gate_cuts() {
        let c = and_tree(2);
        let cuts = enumerate_cuts(&c, 4, DEFAULT_CUT_CAP);
        let leaves: Vec<Vec<usize>> = cuts[2].iter().map(|c| c.leaf_vec()).collect();
        assert_eq!(leaves, vec![vec![2], vec![0, 1]]);
    }

    #[test]
    fn balanced_tree_root_has_four_leaf_cut() {
        let c = and_tree(4);
        let cuts = enumerate_cuts(&c, 4, DEFAULT_CUT_CAP);
        let root = &cuts[c.po()];
        assert!(root.iter().any(|cut| cut.leaf_vec() == vec![0, 1, 2, 3]));
        // Merge closure by hand: {r}, {4,5}, {0,1,5}, {4,2,3}, {0,1,2,3}.
        assert_eq!(root.len(), 5);
    }

    #[test]
    fn cap_and_k_are_respected() {
        let c = and_tree(8);
        let cuts = enumerate_cuts(&c, 3, 3);
        for set in &cuts {
            assert!(set.len() <= 3);
            assert!(set.iter().all(|c| c.len() <= 3));
        }
    }

    #[test]
    fn cut_functions() {
        let c = and_tree(2);
        assert_eq!(cut_function(&c, 2, &[0, 1]).unwrap().0, 0x8888);
        let (mut b, p) = AigBuilder::with_pis(1);
        let n = b.not(p[0]);
        let c = b.finish(n);
        assert_eq!(cut_function(&c, 1, &[0]).unwrap().0, !0xAAAA);
        // Not a cut: leaf set misses a PI.
        let t = and_tree(2);
        assert!(cut_function(&t, 2, &[0]).is_none());
    }

    #[test]
    fn clause_cone_function() {
        // First clause (!x1 | x2) of the three-clause example.
        let f = parse_dimacs("p cnf 3 3\n-1 2 0\n-2 -3 0\n1 3 0\n").unwrap();
        let c = cnf_to_aig(&f);
        // Find the node computing clause 1: the complement of AND(x1, !x2).
        let target: u16 = !(0xAAAA & !0xCCCC);
        let found = (0..c.len()).any(|v| cut_function(&c, v, &[0, 1]) == Some(TruthTable4(target)));
        assert!(found);
        // 4-pattern oracle of !x1 | x2 over the two low variables.
        let oracle: u16 = (0..16)
            .filter(|m| (m & 1) == 0 || (m & 2) != 0)
            .fold(0, |acc, m| acc | (1 << m));
        assert_eq!(oracle, target);
    }

    #[test]
    fn mffc_examples() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let c = b.finish(g);
        let refs = reference_counts(&c, c.po());
        assert_eq!(mffc(&c, 2, &[0, 1], &refs).len(), 1);

        // Shared subgate s feeds both the cone and an outside gate.
        let (mut b, p) = AigBuilder::with_pis(4);
        let s = b.and(p[0], p[1]);
        let r = b.and(s, p[2]);
        let other = b.and(s, p[3]);
        let top = b.and(r, other);
        let c = b.finish(top);
        let refs = reference_counts(&c, c.po());
        let cone = mffc(&c, r, &[0, 1, 2], &refs);
        assert!(!cone.contains(&s));
        assert_eq!(cone.len(), 1);

        // Chain of three single-fanout gates under a 4-leaf cut.
        let c = crate::circuit::samples::and_chain(4);
        let refs = reference_counts(&c, c.po());
        assert_eq!(mffc(&c, c.po(), &[0, 1, 2, 3], &refs).len(), 3);
    }
}
