//! And-inverter graphs with explicit inverter nodes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::CircuitError;

/// Dense, 0-based node index. PIs occupy `0..num_pis`.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    Const0,
    Pi,
    And(NodeId, NodeId),
    Not(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    Const0,
    Pi,
    And,
    Not,
}

impl Gate {
    pub fn kind(self) -> GateKind {
        match self {
            Gate::Const0 => GateKind::Const0,
            Gate::Pi => GateKind::Pi,
            Gate::And(..) => GateKind::And,
            Gate::Not(_) => GateKind::Not,
        }
    }

    pub fn fanins(self) -> impl Iterator<Item = NodeId> {
        let (a, b) = match self {
            Gate::Const0 | Gate::Pi => (None, None),
            Gate::And(x, y) => (Some(x), Some(y)),
            Gate::Not(x) => (Some(x), None),
        };
        a.into_iter().chain(b)
    }
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Const0 => "CONST0",
            GateKind::Pi => "PI",
            GateKind::And => "AND",
            GateKind::Not => "NOT",
        }
    }
}

/// Single-output combinational AIG in topological order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AigCircuit {
    nodes: Vec<Gate>,
    num_pis: usize,
    po: NodeId,
}

impl AigCircuit {
    /// Validates ordering and arity. Dangling gates are allowed here; call
    /// [`AigCircuit::cleanup`] to drop them.
    pub fn new(nodes: Vec<Gate>, num_pis: usize, po: NodeId) -> Result<Self, CircuitError> {
        if po >= nodes.len() {
            return Err(CircuitError::BadOutput { po, len: nodes.len() });
        }
        for (id, gate) in nodes.iter().enumerate() {
            let is_pi = matches!(gate, Gate::Pi);
            if is_pi != (id < num_pis) {
                return Err(CircuitError::PiPlacement { node: id });
            }
            if gate.fanins().any(|f| f >= id) {
                return Err(CircuitError::NotTopological { node: id });
            }
        }
        Ok(Self { nodes, num_pis, po })
    }

    pub(crate) fn new_unchecked(nodes: Vec<Gate>, num_pis: usize, po: NodeId) -> Self {
        debug_assert!(Self::new(nodes.clone(), num_pis, po).is_ok());
        Self { nodes, num_pis, po }
    }

    pub fn nodes(&self) -> &[Gate] {
        &self.nodes
    }

    pub fn gate(&self, id: NodeId) -> Gate {
        self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_pis(&self) -> usize {
        self.num_pis
    }

    pub fn po(&self) -> NodeId {
        self.po
    }

    pub fn num_ands(&self) -> usize {
        self.nodes.iter().filter(|g| matches!(g, Gate::And(..))).count()
    }

    pub fn num_nots(&self) -> usize {
        self.nodes.iter().filter(|g| matches!(g, Gate::Not(_))).count()
    }

    /// Number of gates reading each node. The PO reference is not counted.
    pub fn fanout_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.nodes.len()];
        for gate in &self.nodes {
            for f in gate.fanins() {
                counts[f] += 1;
            }
        }
        counts
    }

    pub fn fanouts(&self) -> Vec<Vec<NodeId>> {
        let mut outs = vec![Vec::new(); self.nodes.len()];
        for (id, gate) in self.nodes.iter().enumerate() {
            for f in gate.fanins() {
                outs[f].push(id);
            }
        }
        outs
    }

    /// Removes gates outside the transitive fan-in of the PO. PIs are kept.
    pub fn cleanup(&self) -> AigCircuit {
        let mut live = vec![false; self.nodes.len()];
        live[self.po] = true;
        for id in (0..self.nodes.len()).rev() {
            if live[id] {
                for f in self.nodes[id].fanins() {
                    live[f] = true;
                }
            }
        }
        live[..self.num_pis].iter_mut().for_each(|l| *l = true);

        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (id, gate) in self.nodes.iter().enumerate() {
            if !live[id] {
                continue;
            }
            remap[id] = nodes.len();
            nodes.push(match *gate {
                Gate::And(a, b) => Gate::And(remap[a], remap[b]),
                Gate::Not(a) => Gate::Not(remap[a]),
                g => g,
            });
        }
        AigCircuit::new_unchecked(nodes, self.num_pis, remap[self.po])
    }

    /// Full node valuation under `assignment` (one bit per PI).
    pub fn evaluate(&self, assignment: &[bool]) -> Vec<bool> {
        assert_eq!(assignment.len(), self.num_pis, "assignment length");
        let mut values = Vec::with_capacity(self.nodes.len());
        for (id, gate) in self.nodes.iter().enumerate() {
            let v = match *gate {
                Gate::Const0 => false,
                Gate::Pi => assignment[id],
                Gate::And(a, b) => values[a] && values[b],
                Gate::Not(a) => !values[a],
            };
            values.push(v);
        }
        values
    }

    pub fn eval_po(&self, assignment: &[bool]) -> bool {
        self.evaluate(assignment)[self.po]
    }

    /// Canonical text dump: one `id KIND fanins...` line per node, then `PO id`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (id, gate) in self.nodes.iter().enumerate() {
            write!(out, "{id} {}", gate.kind().name()).unwrap();
            for f in gate.fanins() {
                write!(out, " {f}").unwrap();
            }
            out.push('\n');
        }
        writeln!(out, "PO {}", self.po).unwrap();
        out
    }
}

/// Incremental construction helper. Nodes are appended in call order, so
/// PIs must be created first.
#[derive(Debug, Default, Clone)]
pub struct AigBuilder {
    nodes: Vec<Gate>,
    num_pis: usize,
}

impl AigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_pis(n: usize) -> (Self, Vec<NodeId>) {
        let mut b = Self::new();
        let pis = (0..n).map(|_| b.pi()).collect();
        (b, pis)
    }

    pub fn pi(&mut self) -> NodeId {
        assert_eq!(self.nodes.len(), self.num_pis, "PIs must precede gates");
        self.num_pis += 1;
        self.push(Gate::Pi)
    }

    pub fn const0(&mut self) -> NodeId {
        self.push(Gate::Const0)
    }

    pub fn and(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Gate::And(a, b))
    }

    pub fn not(&mut self, a: NodeId) -> NodeId {
        self.push(Gate::Not(a))
    }

    fn push(&mut self, gate: Gate) -> NodeId {
        self.nodes.push(gate);
        self.nodes.len() - 1
    }

    pub fn finish(self, po: NodeId) -> AigCircuit {
        AigCircuit::new(self.nodes, self.num_pis, po).expect("builder produced an invalid circuit")
    }
}

/// Per-node ternary condition: `1` forces logic 1, `-1` forces logic 0, `0` is free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mask(Vec<i8>);

impl Mask {
    pub fn empty(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// Only the satisfiability condition: PO forced to 1.
    pub fn po_only(c: &AigCircuit) -> Self {
        let mut m = Self::empty(c.len());
        m.0[c.po()] = 1;
        m
    }

    pub fn from_values(values: Vec<i8>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, node: NodeId) -> i8 {
        self.0[node]
    }

    pub fn set(&mut self, node: NodeId, value: i8) {
        assert!(matches!(value, -1..=1), "mask values are -1, 0 or 1");
        self.0[node] = value;
    }

    pub fn set_bool(&mut self, node: NodeId, value: bool) {
        self.set(node, if value { 1 } else { -1 });
    }

    pub fn is_masked(&self, node: NodeId) -> bool {
        self.0[node] != 0
    }

    pub fn num_masked(&self) -> usize {
        self.0.iter().filter(|&&v| v != 0).count()
    }

    pub fn po_required(&self, c: &AigCircuit) -> bool {
        self.0[c.po()] == 1
    }

    /// Checks the shape of a simulation/model condition: PIs are free to be
    /// masked either way; among gates only the PO may be masked, and only to 1.
    pub fn validate(&self, c: &AigCircuit) -> Result<(), CircuitError> {
        if self.0.len() != c.len() {
            return Err(CircuitError::MaskLength {
                expected: c.len(),
                got: self.0.len(),
            });
        }
        for (id, &v) in self.0.iter().enumerate() {
            let ok = match v {
                0 => true,
                -1 | 1 if id < c.num_pis() => true,
                1 => id == c.po(),
                _ => false,
            };
            if !ok {
                return Err(CircuitError::InvalidMask { node: id, value: v });
            }
        }
        Ok(())
    }
}

/// One bit per PI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Self(values)
    }

    pub fn from_index(num_pis: usize, index: u64) -> Self {
        Self((0..num_pis).map(|i| (index >> i) & 1 == 1).collect())
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn and_gate_semantics() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let c = b.finish(g);
        assert!(!c.eval_po(&[true, false]));
        assert!(c.eval_po(&[true, true]));
    }

    #[test]
    fn nand_semantics() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let n = b.not(g);
        let c = b.finish(n);
        assert!(!c.eval_po(&[true, true]));
        assert!(c.eval_po(&[false, true]));
    }

    #[test]
    fn constructor_rejects_bad_order() {
        let nodes = vec![Gate::Pi, Gate::And(0, 2), Gate::Pi];
        assert!(AigCircuit::new(nodes, 1, 1).is_err());
        let nodes = vec![Gate::Pi, Gate::And(0, 1)];
        assert!(matches!(
            AigCircuit::new(nodes, 1, 1),
            Err(CircuitError::NotTopological { node: 1 })
        ));
    }

    #[test]
    fn cleanup_drops_dangling_gates() {
        let (mut b, p) = AigBuilder::with_pis(3);
        let _dead = b.and(p[0], p[2]);
        let g = b.and(p[0], p[1]);
        let c = b.finish(g).cleanup();
        assert_eq!(c.len(), 4);
        assert_eq!(c.gate(c.po()), Gate::And(0, 1));
    }

    #[test]
    fn dump_format() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let n = b.not(g);
        let c = b.finish(n);
        assert_eq!(c.dump(), "0 PI\n1 PI\n2 AND 0 1\n3 NOT 2\nPO 3\n");
    }

    #[test]
    fn mask_validation() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let n = b.not(g);
        let c = b.finish(n);
        let mut m = Mask::po_only(&c);
        m.set(0, -1);
        assert!(m.validate(&c).is_ok());
        m.set(2, 1);
        assert!(matches!(m.validate(&c), Err(CircuitError::InvalidMask { node: 2, .. })));
        assert!(Mask::empty(3).validate(&c).is_err());
        let mut neg_po = Mask::empty(4);
        neg_po.set(3, -1);
        assert!(neg_po.validate(&c).is_err());
    }
}
