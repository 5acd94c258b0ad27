//! Logic levels and structural statistics.

use serde::{Deserialize, Serialize};

use super::{AigCircuit, CircuitError, Gate};

/// Topological order with per-node logic levels.
///
/// PIs and the constant sit at level 0, an AND is one above its deepest
/// fanin, and a NOT shares the level of its fanin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub order: Vec<usize>,
    pub levels: Vec<u32>,
    pub depth: u32,
}

pub fn topo_order(c: &AigCircuit) -> Topology {
    let levels = levels(c);
    Topology {
        order: (0..c.len()).collect(),
        depth: levels[c.po()],
        levels,
    }
}

pub fn levels(c: &AigCircuit) -> Vec<u32> {
    let mut level = vec![0u32; c.len()];
    for (id, gate) in c.nodes().iter().enumerate() {
        level[id] = match *gate {
            Gate::Const0 | Gate::Pi => 0,
            Gate::And(a, b) => 1 + level[a].max(level[b]),
            Gate::Not(a) => level[a],
        };
    }
    level
}

pub fn depth(c: &AigCircuit) -> u32 {
    levels(c)[c.po()]
}

/// Size of every node's transitive fan-in cone, the node itself included.
pub fn cone_sizes(c: &AigCircuit) -> Vec<usize> {
    let n = c.len();
    let words = n.div_ceil(64);
    let mut sets = vec![0u64; n * words];
    let mut sizes = vec![0usize; n];
    for (id, gate) in c.nodes().iter().enumerate() {
        let (done, rest) = sets.split_at_mut(id * words);
        let row = &mut rest[..words];
        for f in gate.fanins() {
            let src = &done[f * words..(f + 1) * words];
            row.iter_mut().zip(src).for_each(|(d, s)| *d |= s);
        }
        row[id / 64] |= 1 << (id % 64);
        sizes[id] = row.iter().map(|w| w.count_ones() as usize).sum();
    }
    sizes
}

/// Mean over AND gates of larger-to-smaller fanin cone size.
pub fn balance_ratio(c: &AigCircuit) -> Result<f64, CircuitError> {
    let sizes = cone_sizes(c);
    let ratios: Vec<f64> = c
        .nodes()
        .iter()
        .filter_map(|g| match *g {
            Gate::And(a, b) => {
                let (hi, lo) = (sizes[a].max(sizes[b]), sizes[a].min(sizes[b]).max(1));
                Some(hi as f64 / lo as f64)
            }
            _ => None,
        })
        .collect();
    if ratios.is_empty() {
        return Err(CircuitError::NoAndGates);
    }
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

/// One stats row as emitted by the optimizer and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub nodes: usize,
    pub ands: usize,
    pub nots: usize,
    pub depth: u32,
    /// Absent when the circuit has no AND gate.
    pub br: Option<f64>,
}

impl CircuitStats {
    pub fn of(c: &AigCircuit) -> Self {
        Self {
            nodes: c.len(),
            ands: c.num_ands(),
            nots: c.num_nots(),
            depth: depth(c),
            br: balance_ratio(c).ok(),
        }
    }
}
