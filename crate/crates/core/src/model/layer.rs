//! One direction of attention + GRU propagation, level by level.

use ndarray::{s, Array1, Array2, ArrayView1, Axis, Zip};

use super::graph::{BatchGraph, Csr};
use super::linalg::{add_atb, xw, xwt};
use super::params::{PropLayer, GATE_FEATURES};

pub(crate) struct LevelCache {
    nodes: Vec<usize>,
    x: Array2<f64>,
    hprev: Array2<f64>,
    gh_n: Array2<f64>,
    r: Array2<f64>,
    z: Array2<f64>,
    n: Array2<f64>,
    /// Attention weights, edges of `nodes` in order.
    pub alpha: Vec<f64>,
}

pub(crate) struct LayerCache {
    pub levels: Vec<LevelCache>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Runs one propagation layer. `h_in` holds each node's incoming (masked)
/// state; nodes without neighbours pass it through. Returns the updated
/// states and the cache needed for the backward pass.
pub(crate) fn layer_forward(
    p: &PropLayer,
    g: &BatchGraph,
    nbrs: &Csr,
    levels: &[Vec<usize>],
    h_in: &Array2<f64>,
) -> (Array2<f64>, LayerCache) {
    let d = h_in.ncols();
    let mut h = h_in.clone();
    let mut q: Vec<f64> = h.rows().into_iter().map(|r| r.dot(&p.w2)).collect();
    let mut cache = LayerCache { levels: Vec::new() };
    for level in levels.iter().skip(1) {
        let m = level.len();
        let mut x = Array2::zeros((m, d + GATE_FEATURES));
        let mut hprev = Array2::zeros((m, d));
        let mut alpha = Vec::new();
        for (i, &v) in level.iter().enumerate() {
            let hv = h_in.row(v);
            hprev.row_mut(i).assign(&hv);
            let pv = hv.dot(&p.w1);
            let nb = nbrs.row(v);
            let start = alpha.len();
            alpha.extend(nb.iter().map(|&u| pv + q[u]));
            softmax(&mut alpha[start..]);
            let mut agg = x.slice_mut(s![i, ..d]);
            for (k, &u) in nb.iter().enumerate() {
                agg.scaled_add(alpha[start + k], &h.row(u));
            }
            x[[i, d + g.gate[v] as usize]] = 1.0;
        }
        let gi = xwt(&x, &p.w_ih) + &p.b_ih;
        let gh = xwt(&hprev, &p.w_hh) + &p.b_hh;
        let r = (&gi.slice(s![.., ..d]) + &gh.slice(s![.., ..d])).mapv(sigmoid);
        let z = (&gi.slice(s![.., d..2 * d]) + &gh.slice(s![.., d..2 * d])).mapv(sigmoid);
        let gh_n = gh.slice(s![.., 2 * d..]).to_owned();
        let n = (&gi.slice(s![.., 2 * d..]) + &(&r * &gh_n)).mapv(f64::tanh);
        let mut hnew = Array2::zeros((m, d));
        Zip::from(&mut hnew)
            .and(&z)
            .and(&n)
            .and(&hprev)
            .for_each(|o, &z, &n, &hp| *o = (1.0 - z) * n + z * hp);
        for (i, &v) in level.iter().enumerate() {
            h.row_mut(v).assign(&hnew.row(i));
            q[v] = hnew.row(i).dot(&p.w2);
        }
        cache.levels.push(LevelCache {
            nodes: level.clone(),
            x,
            hprev,
            gh_n,
            r,
            z,
            n,
            alpha,
        });
    }
    (h, cache)
}

fn softmax(s: &mut [f64]) {
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in s.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in s.iter_mut() {
        *x /= sum;
    }
}

/// Backpropagates `d_out` (gradient w.r.t. the layer output) to the layer
/// input, accumulating parameter gradients into `grad`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn layer_backward(
    p: &PropLayer,
    nbrs: &Csr,
    levels: &[Vec<usize>],
    h_in: &Array2<f64>,
    h_out: &Array2<f64>,
    cache: &LayerCache,
    mut dh: Array2<f64>,
    grad: &mut PropLayer,
) -> Array2<f64> {
    let d = h_in.ncols();
    let mut dh_in = Array2::zeros(h_in.raw_dim());
    for lc in cache.levels.iter().rev() {
        let m = lc.nodes.len();
        let mut dhnew = Array2::zeros((m, d));
        for (i, &v) in lc.nodes.iter().enumerate() {
            dhnew.row_mut(i).assign(&dh.row(v));
        }
        let dn = &dhnew * &lc.z.mapv(|z| 1.0 - z);
        let dz = &dhnew * &(&lc.hprev - &lc.n);
        let dh_direct = &dhnew * &lc.z;
        let dn_pre = &dn * &lc.n.mapv(|n| 1.0 - n * n);
        let dgh_n = &dn_pre * &lc.r;
        let dr = &dn_pre * &lc.gh_n;
        let dr_pre = &dr * &lc.r.mapv(|r| r * (1.0 - r));
        let dz_pre = &dz * &lc.z.mapv(|z| z * (1.0 - z));

        let mut dgi = Array2::zeros((m, 3 * d));
        dgi.slice_mut(s![.., ..d]).assign(&dr_pre);
        dgi.slice_mut(s![.., d..2 * d]).assign(&dz_pre);
        dgi.slice_mut(s![.., 2 * d..]).assign(&dn_pre);
        let mut dgh = dgi.clone();
        dgh.slice_mut(s![.., 2 * d..]).assign(&dgh_n);

        add_atb(&mut grad.w_ih, &dgi, lc.x.view());
        grad.b_ih += &dgi.sum_axis(Axis(0));
        add_atb(&mut grad.w_hh, &dgh, lc.hprev.view());
        grad.b_hh += &dgh.sum_axis(Axis(0));
        let dx = xw(&dgi, &p.w_ih);
        let dhprev = xw(&dgh, &p.w_hh) + dh_direct;

        let mut edge = 0;
        for (i, &v) in lc.nodes.iter().enumerate() {
            let mut row = dh_in.row_mut(v);
            row += &dhprev.row(i);
            let da: ArrayView1<f64> = dx.slice(s![i, ..d]);
            let nb = nbrs.row(v);
            let alpha = &lc.alpha[edge..edge + nb.len()];
            edge += nb.len();
            let dalpha: Vec<f64> = nb.iter().map(|&u| h_out.row(u).dot(&da)).collect();
            let mix: f64 = alpha.iter().zip(&dalpha).map(|(a, b)| a * b).sum();
            let mut ds_total = 0.0;
            for (k, &u) in nb.iter().enumerate() {
                let ds = alpha[k] * (dalpha[k] - mix);
                ds_total += ds;
                let mut du = dh.row_mut(u);
                du.scaled_add(alpha[k], &da);
                du.scaled_add(ds, &p.w2);
                grad.w2.scaled_add(ds, &h_out.row(u));
            }
            // The w1 term is shared by every score of `v`, so its total
            // gradient is the sum of the score gradients (zero up to rounding).
            grad.w1.scaled_add(ds_total, &h_in.row(v));
            dh_in.row_mut(v).scaled_add(ds_total, &p.w1);
        }
    }
    if let Some(first) = levels.first() {
        for &v in first {
            let mut row = dh_in.row_mut(v);
            row += &dh.row(v);
        }
    }
    dh_in
}

/// Attention weights of every node, empty for nodes without neighbours.
pub(crate) fn attention_by_node(cache: &LayerCache, nbrs: &Csr, num_nodes: usize) -> Vec<Array1<f64>> {
    let mut out = vec![Array1::zeros(0); num_nodes];
    for lc in &cache.levels {
        let mut edge = 0;
        for &v in &lc.nodes {
            let k = nbrs.row(v).len();
            out[v] = Array1::from(lc.alpha[edge..edge + k].to_vec());
            edge += k;
        }
    }
    out
}
