use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::circuit::{AigCircuit, Mask};
use crate::model::{predict, ModelParams};
use crate::sim::{exact_profile, SimError};

#[derive(Debug, thiserror::Error)]
pub enum PredictError {
    /// No assignment satisfies the mask. Only oracles can tell.
    #[error("the condition is unsatisfiable")]
    Unsatisfiable,
    #[error(transparent)]
    Sim(SimError),
}

/// Maps a circuit and a mask to θ for every PI. Entries of masked PIs are
/// ignored by the solver.
pub trait Predictor: Sync {
    fn predict_pis(&self, c: &AigCircuit, mask: &Mask) -> Result<Vec<f64>, PredictError>;
}

/// Exact conditional probabilities by enumeration of the free PIs.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactPredictor;

impl Predictor for ExactPredictor {
    fn predict_pis(&self, c: &AigCircuit, mask: &Mask) -> Result<Vec<f64>, PredictError> {
        match exact_profile(c, mask) {
            Ok(p) => Ok(p.theta[..c.num_pis()].to_vec()),
            Err(SimError::Unsatisfiable) => Err(PredictError::Unsatisfiable),
            Err(e) => Err(PredictError::Sim(e)),
        }
    }
}

/// Same value for every PI.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPredictor(pub f64);

impl Predictor for ConstantPredictor {
    fn predict_pis(&self, c: &AigCircuit, _: &Mask) -> Result<Vec<f64>, PredictError> {
        Ok(vec![self.0; c.num_pis()])
    }
}

/// Uniform θ, a deterministic function of the seed and the mask.
#[derive(Debug, Clone, Copy)]
pub struct RandomPredictor {
    pub seed: u64,
}

impl Predictor for RandomPredictor {
    fn predict_pis(&self, c: &AigCircuit, mask: &Mask) -> Result<Vec<f64>, PredictError> {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(mask.values().iter().map(|&v| v as u8).collect::<Vec<u8>>());
        let mut rng = ChaCha8Rng::from_seed(h.finalize().into());
        Ok((0..c.num_pis()).map(|_| rng.random::<f64>()).collect())
    }
}

/// The trained model. `seed` fixes the sampled initial states.
#[derive(Debug, Clone)]
pub struct ModelPredictor {
    pub params: ModelParams,
    pub seed: u64,
}

impl Predictor for ModelPredictor {
    fn predict_pis(&self, c: &AigCircuit, mask: &Mask) -> Result<Vec<f64>, PredictError> {
        let mut y = predict(c, mask, &self.params, self.seed);
        y.truncate(c.num_pis());
        Ok(y)
    }
}
