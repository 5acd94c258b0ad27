use ndarray::{Array1, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::graph::BatchGraph;
use super::layer::{attention_by_node, layer_backward, layer_forward, LayerCache};
use super::linalg::{add_atb, xw, xwt};
use super::params::{ModelParams, PropLayer, Regressor};
use super::ModelError;
use crate::circuit::{AigCircuit, Mask};

/// Replaces rows with `mask = 1` by all ones and rows with `mask = -1` by all
/// minus ones.
pub fn apply_mask(h: &mut Array2<f64>, mask: &[i8]) {
    assert_eq!(h.nrows(), mask.len());
    for (mut row, &m) in h.rows_mut().into_iter().zip(mask) {
        match m {
            1 => row.fill(1.0),
            -1 => row.fill(-1.0),
            _ => {}
        }
    }
}

/// Standard-normal initial states, one row per node of each item. Item `i`
/// draws from stream `i` of `seed`.
pub fn sample_initial_states(sizes: &[usize], d: usize, seed: u64) -> Array2<f64> {
    let total: usize = sizes.iter().sum();
    let mut h = Array2::zeros((total, d));
    let mut row = 0;
    for (i, &n) in sizes.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        for r in row..row + n {
            for x in h.row_mut(r) {
                *x = StandardNormal.sample(&mut rng);
            }
        }
        row += n;
    }
    h
}

struct RegressorCache {
    z1: Array2<f64>,
    a1: Array2<f64>,
    z2: Array2<f64>,
    a2: Array2<f64>,
    y: Array1<f64>,
}

fn regressor_forward(p: &Regressor, h: &Array2<f64>) -> RegressorCache {
    let z1 = xwt(h, &p.w1) + &p.b1;
    let a1 = z1.mapv(|x| x.max(0.0));
    let z2 = xwt(&a1, &p.w2) + &p.b2;
    let a2 = z2.mapv(|x| x.max(0.0));
    let z3 = xwt(&a2, &p.w3) + &p.b3;
    let y = z3.column(0).mapv(|x| 1.0 / (1.0 + (-x).exp()));
    RegressorCache { z1, a1, z2, a2, y }
}

fn regressor_backward(p: &Regressor, h: &Array2<f64>, c: &RegressorCache, dy: &Array1<f64>, g: &mut Regressor) -> Array2<f64> {
    let dz3 = (dy * &c.y.mapv(|y| y * (1.0 - y))).insert_axis(Axis(1));
    add_atb(&mut g.w3, &dz3, c.a2.view());
    g.b3 += &dz3.sum_axis(Axis(0));
    let mut dz2 = xw(&dz3, &p.w3);
    dz2.zip_mut_with(&c.z2, |d, &z| {
        if z <= 0.0 {
            *d = 0.0
        }
    });
    add_atb(&mut g.w2, &dz2, c.a1.view());
    g.b2 += &dz2.sum_axis(Axis(0));
    let mut dz1 = xw(&dz2, &p.w2);
    dz1.zip_mut_with(&c.z1, |d, &z| {
        if z <= 0.0 {
            *d = 0.0
        }
    });
    add_atb(&mut g.w1, &dz1, h.view());
    g.b1 += &dz1.sum_axis(Axis(0));
    xw(&dz1, &p.w1)
}

/// Every intermediate of one pass, for inspection and backpropagation.
pub struct Stages {
    /// Masked initial states.
    pub h0: Array2<f64>,
    pub forward: Array2<f64>,
    /// Masked forward output.
    pub h1: Array2<f64>,
    pub reverse: Array2<f64>,
    /// Masked reverse output, the regressor input.
    pub h2: Array2<f64>,
    /// Regressor output before the masked-node override.
    pub raw: Array1<f64>,
    /// Predictions with masked nodes reported as their mask value.
    pub output: Array1<f64>,
    fw_cache: LayerCache,
    rev_cache: LayerCache,
    reg_cache: RegressorCache,
}

impl Stages {
    pub fn forward_attention(&self, g: &BatchGraph) -> Vec<Array1<f64>> {
        attention_by_node(&self.fw_cache, &g.preds, g.num_nodes)
    }

    pub fn reverse_attention(&self, g: &BatchGraph) -> Vec<Array1<f64>> {
        attention_by_node(&self.rev_cache, &g.succs, g.num_nodes)
    }
}

/// mask, forward layer, mask, reverse layer, mask, regressor.
pub fn propagate(params: &ModelParams, g: &BatchGraph, h_init: &Array2<f64>) -> Stages {
    let mut h0 = h_init.clone();
    apply_mask(&mut h0, &g.mask);
    let (forward, fw_cache) = layer_forward(&params.forward, g, &g.preds, &g.forward_levels, &h0);
    let mut h1 = forward.clone();
    apply_mask(&mut h1, &g.mask);
    let (reverse, rev_cache) = layer_forward(&params.reverse, g, &g.succs, &g.reverse_levels, &h1);
    let mut h2 = reverse.clone();
    apply_mask(&mut h2, &g.mask);
    let reg_cache = regressor_forward(&params.regressor, &h2);
    let raw = reg_cache.y.clone();
    let mut output = raw.clone();
    for (o, &m) in output.iter_mut().zip(&g.mask) {
        match m {
            1 => *o = 1.0,
            -1 => *o = 0.0,
            _ => {}
        }
    }
    Stages {
        h0,
        forward,
        h1,
        reverse,
        h2,
        raw,
        output,
        fw_cache,
        rev_cache,
        reg_cache,
    }
}

/// Gradient of the loss w.r.t. every parameter, given the gradient `dy` of
/// the loss w.r.t. the raw regressor outputs.
pub fn backpropagate(params: &ModelParams, g: &BatchGraph, st: &Stages, dy: &Array1<f64>) -> ModelParams {
    let d = params.hidden();
    let mut grad = ModelParams::zeros(d);
    let mut dh2 = regressor_backward(&params.regressor, &st.h2, &st.reg_cache, dy, &mut grad.regressor);
    zero_masked(&mut dh2, &g.mask);
    let mut dh1 = layer_backward(
        &params.reverse,
        &g.succs,
        &g.reverse_levels,
        &st.h1,
        &st.reverse,
        &st.rev_cache,
        dh2,
        &mut grad.reverse,
    );
    zero_masked(&mut dh1, &g.mask);
    layer_backward(
        &params.forward,
        &g.preds,
        &g.forward_levels,
        &st.h0,
        &st.forward,
        &st.fw_cache,
        dh1,
        &mut grad.forward,
    );
    grad
}

fn zero_masked(dh: &mut Array2<f64>, mask: &[i8]) {
    for (mut row, &m) in dh.rows_mut().into_iter().zip(mask) {
        if m != 0 {
            row.fill(0.0);
        }
    }
}

/// Forward layer alone on already masked states.
pub fn forward_prop(c: &AigCircuit, h: &Array2<f64>, layer: &PropLayer) -> Array2<f64> {
    let m = Mask::empty(c.len());
    let g = BatchGraph::new(&[(c, &m)]);
    layer_forward(layer, &g, &g.preds, &g.forward_levels, h).0
}

/// Reverse layer alone on already masked states.
pub fn reverse_prop(c: &AigCircuit, h: &Array2<f64>, layer: &PropLayer) -> Array2<f64> {
    let m = Mask::empty(c.len());
    let g = BatchGraph::new(&[(c, &m)]);
    layer_forward(layer, &g, &g.succs, &g.reverse_levels, h).0
}

/// Per-node probabilities for several (circuit, mask) pairs in one batch.
pub fn predict_batch(params: &ModelParams, items: &[(&AigCircuit, &Mask)], seed: u64) -> Vec<Vec<f64>> {
    if items.is_empty() {
        return Vec::new();
    }
    let g = BatchGraph::new(items);
    let sizes: Vec<usize> = items.iter().map(|(c, _)| c.len()).collect();
    let h = sample_initial_states(&sizes, params.hidden(), seed);
    let st = propagate(params, &g, &h);
    (0..g.num_graphs()).map(|i| st.output.slice(ndarray::s![g.graph_range(i)]).to_vec()).collect()
}

pub fn predict(c: &AigCircuit, m: &Mask, params: &ModelParams, seed: u64) -> Vec<f64> {
    predict_batch(params, &[(c, m)], seed).pop().unwrap()
}

/// Mean absolute error over the unmasked nodes.
pub fn loss(pred: &[f64], mask: &Mask, labels: &[f64]) -> Result<f64, ModelError> {
    let (sum, count) = abs_error(pred, mask.values(), labels);
    if count == 0 {
        return Err(ModelError::AllMasked);
    }
    Ok(sum / count as f64)
}

pub(crate) fn abs_error(pred: &[f64], mask: &[i8], labels: &[f64]) -> (f64, usize) {
    let mut sum = 0.0;
    let mut count = 0;
    for ((p, &m), l) in pred.iter().zip(mask).zip(labels) {
        if m == 0 {
            sum += (p - l).abs();
            count += 1;
        }
    }
    (sum, count)
}

/// Batch loss (mean absolute error over all unmasked nodes of the batch), the
/// number of unmasked nodes, and the parameter gradient.
pub fn loss_and_grad(params: &ModelParams, g: &BatchGraph, labels: &[f64], h_init: &Array2<f64>) -> Result<(f64, usize, ModelParams), ModelError> {
    let st = propagate(params, g, h_init);
    let (sum, count) = abs_error(st.raw.as_slice().unwrap(), &g.mask, labels);
    if count == 0 {
        return Err(ModelError::AllMasked);
    }
    let scale = 1.0 / count as f64;
    let dy: Array1<f64> = st
        .raw
        .iter()
        .zip(&g.mask)
        .zip(labels)
        .map(|((&p, &m), &l)| if m == 0 { scale * (p - l).signum() } else { 0.0 })
        .collect();
    let grad = backpropagate(params, g, &st, &dy);
    Ok((sum * scale, count, grad))
}

/// Loss only, with the same conventions as [`loss_and_grad`].
pub fn batch_loss(params: &ModelParams, g: &BatchGraph, labels: &[f64], h_init: &Array2<f64>) -> Result<f64, ModelError> {
    let st = propagate(params, g, h_init);
    let (sum, count) = abs_error(st.raw.as_slice().unwrap(), &g.mask, labels);
    if count == 0 {
        return Err(ModelError::AllMasked);
    }
    Ok(sum / count as f64)
}

/// Loss plus the pattern of every non-smooth point it passes through: the
/// regressor's ReLU signs and the residual signs of the unmasked nodes.
pub(crate) fn loss_and_pattern(params: &ModelParams, g: &BatchGraph, labels: &[f64], h_init: &Array2<f64>) -> Result<(f64, Vec<bool>), ModelError> {
    let st = propagate(params, g, h_init);
    let (sum, count) = abs_error(st.raw.as_slice().unwrap(), &g.mask, labels);
    if count == 0 {
        return Err(ModelError::AllMasked);
    }
    let rc = &st.reg_cache;
    let mut pattern: Vec<bool> = rc.z1.iter().chain(rc.z2.iter()).map(|&z| z > 0.0).collect();
    for ((&p, &m), &l) in st.raw.iter().zip(&g.mask).zip(labels) {
        if m == 0 {
            pattern.push(p > l);
        }
    }
    Ok((sum / count as f64, pattern))
}
