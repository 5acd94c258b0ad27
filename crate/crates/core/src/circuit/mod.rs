//! CNF formulas, and-inverter graphs, their file formats and structural statistics.

mod aig;
mod aiger;
mod cnf;
mod convert;
pub mod samples;
mod stats;

use thiserror::Error;

pub use aig::{AigBuilder, AigCircuit, Assignment, Gate, GateKind, Mask, NodeId};
pub use aiger::{parse_aiger, write_aiger};
pub use cnf::{parse_dimacs, Clause, CnfFormula, Literal};
pub use convert::cnf_to_aig;
#[allow(unused_imports)]
pub(crate) use convert::cnf_to_network;
pub use stats::{balance_ratio, cone_sizes, depth, levels, topo_order, CircuitStats, Topology};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: bad header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: unexpected token `{token}`")]
    Token { line: usize, token: String },
    #[error("variable {variable} exceeds the declared count {declared}")]
    VariableOutOfRange { variable: usize, declared: usize },
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("line {line}: {reason}")]
    Aiger { line: usize, reason: String },
    #[error("expected exactly one output, found {0}")]
    OutputCount(usize),
    #[error("sequential AIGs are not supported ({0} latches)")]
    Latches(usize),
    #[error("line {line}: non-monotone node numbering")]
    NonMonotone { line: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("PO {po} is out of range for {len} nodes")]
    BadOutput { po: usize, len: usize },
    #[error("node {node}: PIs must occupy exactly the first indices")]
    PiPlacement { node: usize },
    #[error("node {node} reads a fanin that does not precede it")]
    NotTopological { node: usize },
    #[error("circuit has no AND gate")]
    NoAndGates,
    #[error("mask has {got} entries, circuit has {expected} nodes")]
    MaskLength { expected: usize, got: usize },
    #[error("node {node}: mask value {value} is not allowed there")]
    InvalidMask { node: usize, value: i8 },
}
