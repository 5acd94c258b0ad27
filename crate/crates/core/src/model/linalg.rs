//! Products with a thin left operand. Level batches often have one to a few
//! rows, where a packed GEMM spends most of its time copying the weights.

use ndarray::{Array2, ArrayView2, Axis};

const THIN: usize = 16;

/// `x · wᵀ`.
pub(crate) fn xwt(x: &Array2<f64>, w: &Array2<f64>) -> Array2<f64> {
    if x.nrows() > THIN {
        return x.dot(&w.t());
    }
    let mut out = Array2::zeros((x.nrows(), w.nrows()));
    for (mut o, r) in out.outer_iter_mut().zip(x.outer_iter()) {
        o.assign(&w.dot(&r));
    }
    out
}

/// `x · w`.
pub(crate) fn xw(x: &Array2<f64>, w: &Array2<f64>) -> Array2<f64> {
    if x.nrows() > THIN {
        return x.dot(w);
    }
    let mut out = Array2::zeros((x.nrows(), w.ncols()));
    for (mut o, r) in out.outer_iter_mut().zip(x.outer_iter()) {
        for (&a, wr) in r.iter().zip(w.outer_iter()) {
            if a != 0.0 {
                o.scaled_add(a, &wr);
            }
        }
    }
    out
}

/// `g += aᵀ · b`.
pub(crate) fn add_atb(g: &mut Array2<f64>, a: &Array2<f64>, b: ArrayView2<f64>) {
    if a.nrows() > THIN {
        *g += &a.t().dot(&b);
        return;
    }
    for (ar, br) in a.outer_iter().zip(b.outer_iter()) {
        for (&s, mut gr) in ar.iter().zip(g.axis_iter_mut(Axis(0))) {
            if s != 0.0 {
                gr.scaled_add(s, &br);
            }
        }
    }
}
