//! Circuit-based SAT solving with a conditional generative model.
//!
//! The pipeline: CNF instances are converted to and-inverter graphs
//! ([`circuit`]), normalized by logic synthesis ([`synth`]), labelled with
//! conditional logic-1 probabilities from random simulation ([`sim`]), and
//! used to train a bidirectional DAG message-passing model ([`model`]).
//! [`solver`] samples assignments from any probability predictor, the model
//! or an exact enumeration oracle, with flipping-based backtracking.
//! [`datagen`] provides the SAT instance generators and a DPLL oracle.

pub mod circuit;
pub mod datagen;
pub mod model;
pub mod sim;
pub mod solver;
pub mod synth;

pub use circuit::{AigCircuit, Assignment, CnfFormula, Mask};
