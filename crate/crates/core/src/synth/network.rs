//! Structurally hashed AIG with complemented edges.
//!
//! The optimizer works on this form because inverters are free there: a
//! [`Lit`] is a node reference plus a complement bit. Conversion back to an
//! [`AigCircuit`] materializes one shared NOT node per complemented source.

use std::collections::HashMap;
use std::ops::Not;

use crate::circuit::{AigCircuit, Gate, NodeId};

/// Node index times two plus a complement bit. Node 0 is constant false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub const FALSE: Lit = Lit(0);
    pub const TRUE: Lit = Lit(1);

    pub fn new(node: usize, complemented: bool) -> Self {
        Lit((node as u32) << 1 | complemented as u32)
    }

    pub fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn regular(self) -> Lit {
        Lit(self.0 & !1)
    }

    pub fn xor(self, complement: bool) -> Lit {
        Lit(self.0 ^ complement as u32)
    }

    pub fn is_const(self) -> bool {
        self.node() == 0
    }

    pub fn raw(self) -> u32 {
        self.0
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetNode {
    Const,
    Input(usize),
    And(Lit, Lit),
}

#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<NetNode>,
    num_inputs: usize,
    strash: HashMap<(Lit, Lit), usize>,
    po: Lit,
}

impl Network {
    pub fn new(num_inputs: usize) -> Self {
        let mut nodes = Vec::with_capacity(num_inputs + 1);
        nodes.push(NetNode::Const);
        nodes.extend((0..num_inputs).map(NetNode::Input));
        Self {
            nodes,
            num_inputs,
            strash: HashMap::new(),
            po: Lit::FALSE,
        }
    }

    pub fn input(&self, i: usize) -> Lit {
        assert!(i < self.num_inputs);
        Lit::new(i + 1, false)
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, id: usize) -> NetNode {
        self.nodes[id]
    }

    pub fn is_and(&self, id: usize) -> bool {
        matches!(self.nodes[id], NetNode::And(..))
    }

    pub fn po(&self) -> Lit {
        self.po
    }

    pub fn set_po(&mut self, po: Lit) {
        self.po = po;
    }

    /// Canonical operand order and trivial simplifications. `Ok` is a
    /// simplified result, `Err` the normalized operand pair to hash.
    fn normalize(a: Lit, b: Lit) -> Result<Lit, (Lit, Lit)> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if a == Lit::FALSE {
            return Ok(Lit::FALSE);
        }
        if a == Lit::TRUE {
            return Ok(b);
        }
        if a == b {
            return Ok(a);
        }
        if a == !b {
            return Ok(Lit::FALSE);
        }
        Err((a, b))
    }

    /// Result of `AND(a, b)` if it needs no new node: a simplification or an
    /// existing structurally identical gate.
    pub fn lookup_and(&self, a: Lit, b: Lit) -> Option<Lit> {
        match Self::normalize(a, b) {
            Ok(l) => Some(l),
            Err(key) => self.strash.get(&key).map(|&n| Lit::new(n, false)),
        }
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        match Self::normalize(a, b) {
            Ok(l) => l,
            Err(key) => {
                if let Some(&n) = self.strash.get(&key) {
                    return Lit::new(n, false);
                }
                let id = self.nodes.len();
                self.nodes.push(NetNode::And(key.0, key.1));
                self.strash.insert(key, id);
                Lit::new(id, false)
            }
        }
    }

    pub fn or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and(!a, !b)
    }

    pub(crate) fn fanin_lits(&self, id: usize) -> Option<(Lit, Lit)> {
        match self.nodes[id] {
            NetNode::And(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Rewires a gate's operands in place. The caller maintains acyclicity.
    pub(crate) fn set_fanins(&mut self, id: usize, a: Lit, b: Lit) {
        if let NetNode::And(oa, ob) = self.nodes[id] {
            if self.strash.get(&(oa, ob)) == Some(&id) {
                self.strash.remove(&(oa, ob));
            }
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.nodes[id] = NetNode::And(a, b);
        self.strash.entry((a, b)).or_insert(id);
    }

    pub(crate) fn unhash(&mut self, id: usize) {
        if let NetNode::And(a, b) = self.nodes[id] {
            if self.strash.get(&(a, b)) == Some(&id) {
                self.strash.remove(&(a, b));
            }
        }
    }

    /// AND nodes reachable from the PO, fanins before fanouts.
    pub fn topo_ands(&self) -> Vec<usize> {
        let mut order = Vec::new();
        let mut state = vec![0u8; self.nodes.len()];
        let mut stack: Vec<(usize, bool)> = vec![(self.po.node(), false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                state[id] = 2;
                order.push(id);
                continue;
            }
            if state[id] != 0 {
                continue;
            }
            if let NetNode::And(a, b) = self.nodes[id] {
                state[id] = 1;
                stack.push((id, true));
                stack.push((b.node(), false));
                stack.push((a.node(), false));
            } else {
                state[id] = 2;
            }
        }
        order
    }

    pub fn num_ands(&self) -> usize {
        self.topo_ands().len()
    }

    /// AND-levels of every reachable node (inverters are free). Unreachable
    /// nodes report 0.
    pub fn levels(&self) -> Vec<u32> {
        let mut level = vec![0u32; self.nodes.len()];
        for id in self.topo_ands() {
            let (a, b) = self.fanin_lits(id).unwrap();
            level[id] = 1 + level[a.node()].max(level[b.node()]);
        }
        level
    }

    pub fn depth(&self) -> u32 {
        self.levels()[self.po.node()]
    }

    /// Fresh network with only the PO cone, re-hashed, nodes in topological order.
    pub fn compact(&self) -> Network {
        let mut out = Network::new(self.num_inputs);
        let mut map: Vec<Lit> = vec![Lit::FALSE; self.nodes.len()];
        for i in 0..self.num_inputs {
            map[i + 1] = out.input(i);
        }
        for id in self.topo_ands() {
            let (a, b) = self.fanin_lits(id).unwrap();
            let na = map[a.node()].xor(a.is_complemented());
            let nb = map[b.node()].xor(b.is_complemented());
            map[id] = out.and(na, nb);
        }
        out.po = map[self.po.node()].xor(self.po.is_complemented());
        out
    }

    /// Structural hashing of an explicit-inverter circuit.
    pub fn from_circuit(c: &AigCircuit) -> Network {
        let mut net = Network::new(c.num_pis());
        let mut map: Vec<Lit> = Vec::with_capacity(c.len());
        for (id, gate) in c.nodes().iter().enumerate() {
            let lit = match *gate {
                Gate::Const0 => Lit::FALSE,
                Gate::Pi => net.input(id),
                Gate::And(a, b) => net.and(map[a], map[b]),
                Gate::Not(a) => !map[a],
            };
            map.push(lit);
        }
        net.po = map[c.po()];
        net
    }

    /// Explicit-inverter circuit of the PO cone: PIs first, then the constant
    /// if referenced, then gates in DFS order with each NOT placed right
    /// before its first reader.
    pub fn to_circuit(&self) -> AigCircuit {
        let mut nodes: Vec<Gate> = (0..self.num_inputs).map(|_| Gate::Pi).collect();
        let mut pos: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
        let mut inv: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
        for i in 0..self.num_inputs {
            pos[i + 1] = Some(i);
        }
        if self.po.is_const() {
            pos[0] = Some(nodes.len());
            nodes.push(Gate::Const0);
        }

        fn resolve(
            lit: Lit,
            nodes: &mut Vec<Gate>,
            pos: &[Option<NodeId>],
            inv: &mut [Option<NodeId>],
        ) -> NodeId {
            let base = pos[lit.node()].expect("fanin emitted before reader");
            if !lit.is_complemented() {
                return base;
            }
            *inv[lit.node()].get_or_insert_with(|| {
                nodes.push(Gate::Not(base));
                nodes.len() - 1
            })
        }

        for id in self.topo_ands() {
            let (a, b) = self.fanin_lits(id).unwrap();
            let na = resolve(a, &mut nodes, &pos, &mut inv);
            let nb = resolve(b, &mut nodes, &pos, &mut inv);
            nodes.push(Gate::And(na, nb));
            pos[id] = Some(nodes.len() - 1);
        }
        let po = resolve(self.po, &mut nodes, &pos, &mut inv);
        AigCircuit::new_unchecked(nodes, self.num_inputs, po)
    }

    /// 64 patterns per word; `inputs[i]` drives input `i`. Returns one word per node.
    pub fn simulate_words(&self, inputs: &[u64]) -> Vec<u64> {
        let mut val = vec![0u64; self.nodes.len()];
        for (i, w) in inputs.iter().enumerate() {
            val[i + 1] = *w;
        }
        let lit = |val: &[u64], l: Lit| val[l.node()] ^ if l.is_complemented() { !0 } else { 0 };
        for id in self.topo_ands() {
            let (a, b) = self.fanin_lits(id).unwrap();
            val[id] = lit(&val, a) & lit(&val, b);
        }
        val
    }

    pub fn po_word(&self, inputs: &[u64]) -> u64 {
        let val = self.simulate_words(inputs);
        val[self.po.node()] ^ if self.po.is_complemented() { !0 } else { 0 }
    }
}
