//! Conditional DAG message-passing model.
//!
//! Node states start from standard-normal vectors; masked nodes are pinned
//! to the polarity prototypes (all ones for logic 1, all minus ones for logic
//! 0). A forward layer propagates from the PIs to the PO, a reverse layer
//! from the PO back, each combining neighbour states with additive attention
//! and a GRU update. A small MLP maps the final states to probabilities.
//! Gradients are computed by hand; [`grad_check`] verifies them.

mod gradcheck;
mod graph;
mod layer;
mod linalg;
mod net;
mod params;
mod train;

use thiserror::Error;

pub use gradcheck::{analytic_gradient, compare_gradients, grad_check, gradcheck_circuit, relative_error, GradCheckReport};
pub use graph::{BatchGraph, Csr};
pub use net::{
    apply_mask, backpropagate, batch_loss, forward_prop, loss, loss_and_grad, predict, predict_batch, propagate,
    reverse_prop, sample_initial_states, Stages,
};
pub use params::{load_checkpoint, save_checkpoint, ModelParams, PropLayer, Regressor, GATE_FEATURES, HIDDEN};
pub use train::{log_csv, prediction_error, train, train_step, Adam, EpochLog, Example, TrainConfig};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("every node is masked; the loss is undefined")]
    AllMasked,
    #[error("non-finite loss at batch {batch}")]
    NonFiniteLoss { batch: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("checkpoint hidden size {found} does not match the configured {expected}")]
    Dimension { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests;
