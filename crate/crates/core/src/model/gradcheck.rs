use serde::{Deserialize, Serialize};

use super::graph::BatchGraph;
use super::net::{loss_and_grad, loss_and_pattern, sample_initial_states};
use super::params::ModelParams;
use super::ModelError;
use crate::circuit::{AigBuilder, AigCircuit, Mask};
use crate::sim::exact_profile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub max_rel: f64,
    /// Largest relative deviation within each named tensor.
    pub groups: Vec<(String, f64)>,
    /// Parameters whose probe window straddled a kink and needed a smaller step.
    pub reduced_steps: usize,
}

/// `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn relative_error(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-6)
}

/// `NOT(AND(AND(x1, x2), x3))` with the PO masked to 1 and exact
/// conditional probabilities as labels: 6 nodes covering all gate types.
pub fn gradcheck_circuit() -> (AigCircuit, Mask, Vec<f64>) {
    let (mut b, p) = AigBuilder::with_pis(3);
    let a = b.and(p[0], p[1]);
    let a2 = b.and(a, p[2]);
    let n = b.not(a2);
    let c = b.finish(n);
    let m = Mask::po_only(&c);
    let labels = exact_profile(&c, &m).expect("satisfiable").theta;
    (c, m, labels)
}

/// Analytic gradient of the loss for one example with fixed initial states.
pub fn analytic_gradient(params: &ModelParams, c: &AigCircuit, m: &Mask, labels: &[f64], seed: u64) -> Result<Vec<f64>, ModelError> {
    let g = BatchGraph::new(&[(c, m)]);
    let h = sample_initial_states(&[c.len()], params.hidden(), seed);
    Ok(loss_and_grad(params, &g, labels, &h)?.2.to_flat())
}

/// Smallest fraction of `eps` tried when a probe crosses a kink.
const MAX_SHRINK: u32 = 8;

/// Compares `analytic` against central differences for every parameter.
///
/// Differences are only meaningful where the loss is smooth across the probe
/// window. When a probe flips a ReLU or the sign of a residual, the step for
/// that parameter is quartered until both probes keep the base pattern.
pub fn compare_gradients(
    params: &ModelParams,
    c: &AigCircuit,
    m: &Mask,
    labels: &[f64],
    seed: u64,
    eps: f64,
    analytic: &[f64],
) -> Result<GradCheckReport, ModelError> {
    let g = BatchGraph::new(&[(c, m)]);
    let h = sample_initial_states(&[c.len()], params.hidden(), seed);
    let (_, base) = loss_and_pattern(params, &g, labels, &h)?;
    let mut probe = params.clone();
    let mut groups = Vec::new();
    let mut max_rel: f64 = 0.0;
    let mut reduced_steps = 0;
    for (name, range) in params.groups() {
        let mut worst: f64 = 0.0;
        for i in range {
            let orig = *probe.param_mut(i);
            let mut step = eps;
            let mut numeric = 0.0;
            for shrink in 0..=MAX_SHRINK {
                *probe.param_mut(i) = orig + step;
                let (plus, pp) = loss_and_pattern(&probe, &g, labels, &h)?;
                *probe.param_mut(i) = orig - step;
                let (minus, pm) = loss_and_pattern(&probe, &g, labels, &h)?;
                numeric = (plus - minus) / (2.0 * step);
                if pp == base && pm == base {
                    break;
                }
                if shrink == 0 {
                    reduced_steps += 1;
                }
                step /= 4.0;
            }
            *probe.param_mut(i) = orig;
            worst = worst.max(relative_error(analytic[i], numeric));
        }
        max_rel = max_rel.max(worst);
        groups.push((name, worst));
    }
    Ok(GradCheckReport {
        max_rel,
        groups,
        reduced_steps,
    })
}

pub fn grad_check(params: &ModelParams, c: &AigCircuit, m: &Mask, labels: &[f64], seed: u64, eps: f64) -> Result<GradCheckReport, ModelError> {
    let analytic = analytic_gradient(params, c, m, labels, seed)?;
    compare_gradients(params, c, m, labels, seed, eps, &analytic)
}
