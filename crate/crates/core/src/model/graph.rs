use crate::circuit::{AigCircuit, Gate, Mask};

/// Compressed adjacency lists.
#[derive(Debug, Clone, Default)]
pub struct Csr {
    start: Vec<usize>,
    idx: Vec<usize>,
}

impl Csr {
    fn from_lists(lists: &[Vec<usize>]) -> Self {
        let mut start = Vec::with_capacity(lists.len() + 1);
        let mut idx = Vec::new();
        start.push(0);
        for l in lists {
            idx.extend_from_slice(l);
            start.push(idx.len());
        }
        Self { start, idx }
    }

    pub fn row(&self, v: usize) -> &[usize] {
        &self.idx[self.start[v]..self.start[v + 1]]
    }

    pub fn offset(&self, v: usize) -> usize {
        self.start[v]
    }
}

/// Disjoint union of circuits with per-level node lists for both directions.
/// Level 0 holds the nodes without neighbours in that direction; every other
/// node sits one level above its deepest neighbour. NOT gates count as a step.
#[derive(Debug, Clone)]
pub struct BatchGraph {
    pub num_nodes: usize,
    /// 0 = PI (and constant), 1 = AND, 2 = NOT.
    pub gate: Vec<u8>,
    pub mask: Vec<i8>,
    pub preds: Csr,
    pub succs: Csr,
    pub forward_levels: Vec<Vec<usize>>,
    pub reverse_levels: Vec<Vec<usize>>,
    /// Node range of each member circuit.
    pub offsets: Vec<usize>,
}

impl BatchGraph {
    pub fn new(items: &[(&AigCircuit, &Mask)]) -> Self {
        let total: usize = items.iter().map(|(c, _)| c.len()).sum();
        let mut gate = Vec::with_capacity(total);
        let mut mask = Vec::with_capacity(total);
        let mut preds: Vec<Vec<usize>> = Vec::with_capacity(total);
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); total];
        let mut fw_level = Vec::with_capacity(total);
        let mut offsets = vec![0];
        for (c, m) in items {
            assert_eq!(m.len(), c.len(), "mask length must match the circuit");
            let base = gate.len();
            for (id, g) in c.nodes().iter().enumerate() {
                gate.push(match g {
                    Gate::Const0 | Gate::Pi => 0,
                    Gate::And(..) => 1,
                    Gate::Not(_) => 2,
                });
                mask.push(m.get(id));
                let p: Vec<usize> = g.fanins().map(|f| f + base).collect();
                let lvl = p.iter().map(|&u| fw_level[u] + 1).max().unwrap_or(0);
                for &u in &p {
                    succs[u].push(base + id);
                }
                fw_level.push(lvl);
                preds.push(p);
            }
            offsets.push(gate.len());
        }
        let mut rev_level = vec![0usize; total];
        for v in (0..total).rev() {
            rev_level[v] = succs[v].iter().map(|&u| rev_level[u] + 1).max().unwrap_or(0);
        }
        let bucket = |levels: &[usize]| {
            let depth = levels.iter().copied().max().map_or(0, |m| m + 1);
            let mut out = vec![Vec::new(); depth];
            for (v, &l) in levels.iter().enumerate() {
                out[l].push(v);
            }
            out
        };
        Self {
            num_nodes: total,
            forward_levels: bucket(&fw_level),
            reverse_levels: bucket(&rev_level),
            gate,
            mask,
            preds: Csr::from_lists(&preds),
            succs: Csr::from_lists(&succs),
            offsets,
        }
    }

    pub fn num_graphs(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn graph_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::AigBuilder;

    #[test]
    fn levels_count_inverters() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let n = b.not(g);
        let c = b.finish(n);
        let m = Mask::po_only(&c);
        let bg = BatchGraph::new(&[(&c, &m), (&c, &m)]);
        assert_eq!(bg.num_nodes, 8);
        assert_eq!(bg.forward_levels, vec![vec![0, 1, 4, 5], vec![2, 6], vec![3, 7]]);
        assert_eq!(bg.reverse_levels, vec![vec![3, 7], vec![2, 6], vec![0, 1, 4, 5]]);
        assert_eq!(bg.preds.row(6), &[4, 5]);
        assert_eq!(bg.succs.row(4), &[6]);
        assert_eq!(bg.graph_range(1), 4..8);
    }
}
