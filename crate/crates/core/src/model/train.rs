use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::BatchGraph;
use super::net::{abs_error, loss_and_grad, predict_batch, sample_initial_states};
use super::params::{ModelParams, HIDDEN};
use super::ModelError;
use crate::circuit::{AigCircuit, Mask};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub hidden: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-4,
            weight_decay: 1e-10,
            epochs: 20,
            batch_size: 64,
            seed: 0,
            hidden: HIDDEN,
        }
    }
}

/// A circuit, its condition and its per-node labels.
#[derive(Debug, Clone, Copy)]
pub struct Example<'a> {
    pub circuit: &'a AigCircuit,
    pub mask: &'a Mask,
    pub labels: &'a [f64],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_pe: f64,
    pub val_pe: f64,
    pub wall_secs: f64,
}

pub fn log_csv(log: &[EpochLog]) -> String {
    let mut out = String::from("epoch,train_pe,val_pe,wall_secs\n");
    for e in log {
        writeln!(out, "{},{:.6},{:.6},{:.3}", e.epoch, e.train_pe, e.val_pe, e.wall_secs).unwrap();
    }
    out
}

/// Adam with L2 weight decay added to the gradient.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n: usize, lr: f64, weight_decay: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn step(&mut self, theta: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..theta.len() {
            let g = grad[i] + self.weight_decay * theta[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let mhat = self.m[i] / c1;
            let vhat = self.v[i] / c2;
            theta[i] -= self.lr * mhat / (vhat.sqrt() + self.eps);
        }
    }
}

/// Node-weighted mean absolute error over the unmasked nodes of `examples`.
pub fn prediction_error(params: &ModelParams, examples: &[Example], seed: u64, batch_size: usize) -> f64 {
    let mut sum = 0.0;
    let mut count = 0;
    for (b, chunk) in examples.chunks(batch_size.max(1)).enumerate() {
        let items: Vec<(&AigCircuit, &Mask)> = chunk.iter().map(|e| (e.circuit, e.mask)).collect();
        let preds = predict_batch(params, &items, seed.wrapping_add(b as u64));
        for (e, p) in chunk.iter().zip(preds) {
            let (s, c) = abs_error(&p, e.mask.values(), e.labels);
            sum += s;
            count += c;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// One optimizer step on a batch; returns the batch loss and its node count.
pub fn train_step(params: &mut ModelParams, adam: &mut Adam, batch: &[Example], seed: u64) -> Result<(f64, usize), ModelError> {
    let items: Vec<(&AigCircuit, &Mask)> = batch.iter().map(|e| (e.circuit, e.mask)).collect();
    let g = BatchGraph::new(&items);
    let labels: Vec<f64> = batch.iter().flat_map(|e| e.labels.iter().copied()).collect();
    let sizes: Vec<usize> = batch.iter().map(|e| e.circuit.len()).collect();
    let h = sample_initial_states(&sizes, params.hidden(), seed);
    let (loss, count, grad) = loss_and_grad(params, &g, &labels, &h)?;
    let mut theta = params.to_flat();
    adam.step(&mut theta, &grad.to_flat());
    params.set_flat(&theta);
    Ok((loss, count))
}

/// Mini-batch training. Each step draws fresh initial states; validation
/// uses a fixed seed so epochs are comparable. `on_epoch` sees every log row
/// as it is produced.
pub fn train(
    train_set: &[Example],
    val_set: &[Example],
    cfg: &TrainConfig,
    init: Option<ModelParams>,
    mut on_epoch: impl FnMut(&EpochLog, &ModelParams),
) -> Result<(ModelParams, Vec<EpochLog>), ModelError> {
    let mut params = init.unwrap_or_else(|| ModelParams::init(cfg.hidden, cfg.seed));
    let mut adam = Adam::new(params.num_params(), cfg.learning_rate, cfg.weight_decay);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut shuffle = ChaCha8Rng::seed_from_u64(cfg.seed);
    let eval_seed = cfg.seed ^ 0x5eed;
    let start = Instant::now();
    let mut log = Vec::new();
    let mut step: u64 = 0;
    let mut batch_id = 0;
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut shuffle);
        let (mut sum, mut count) = (0.0, 0);
        for chunk in order.chunks(cfg.batch_size.max(1)) {
            let batch: Vec<Example> = chunk.iter().map(|&i| train_set[i]).collect();
            step += 1;
            let (loss, n) = train_step(&mut params, &mut adam, &batch, cfg.seed.wrapping_add(step))?;
            if !loss.is_finite() || params.to_flat().iter().any(|x| !x.is_finite()) {
                return Err(ModelError::NonFiniteLoss { batch: batch_id });
            }
            batch_id += 1;
            sum += loss * n as f64;
            count += n;
        }
        let row = EpochLog {
            epoch,
            train_pe: if count == 0 { 0.0 } else { sum / count as f64 },
            val_pe: prediction_error(&params, val_set, eval_seed, cfg.batch_size),
            wall_secs: start.elapsed().as_secs_f64(),
        };
        on_epoch(&row, &params);
        log.push(row);
    }
    Ok((params, log))
}
