//! Solution sampling from a conditional predictor.
//!
//! The solver fixes one PI at a time, always the one the predictor is most
//! sure about given PO = 1 and the PIs fixed so far. If the sampled
//! assignment does not satisfy the circuit, it re-samples with one earlier
//! decision flipped, at most once per PI. Every reported solution is
//! verified by simulation.

mod eval;
mod predictor;
mod solve;

pub use eval::{
    baseline_schemes, bit_string, evaluate_scheme, evaluate_suite, sample_scheme, scheme_accuracy, solve_with_scheme, BaselineAssignments, InstanceResult, Scheme,
    SuiteMetrics,
};
pub use predictor::{ConstantPredictor, ExactPredictor, ModelPredictor, PredictError, Predictor, RandomPredictor};
pub use solve::{iterative_solve, solve_with_flipping, verify, SolveResult, SolveStatus};

#[cfg(test)]
mod tests;
