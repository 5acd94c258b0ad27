use serde::{Deserialize, Serialize};

use super::predictor::{PredictError, Predictor};
use crate::circuit::{AigCircuit, Assignment, Mask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Satisfied,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Present iff satisfied.
    pub assignment: Option<Assignment>,
    /// Sampled solutions, the initial one included.
    pub rounds_used: usize,
    pub predictor_calls: usize,
}

/// Which undetermined PI to fix next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Selection {
    MostCertain,
    MostUncertain,
}

/// PO = 1 plus every determined PI. A PO that is itself a determined PI keeps
/// the PI's value.
pub(crate) fn decision_mask(c: &AigCircuit, agn: &[i8]) -> Mask {
    let mut m = Mask::po_only(c);
    for (i, &a) in agn.iter().enumerate() {
        if a != 0 {
            m.set(i, a);
        }
    }
    m
}

/// Fixes undetermined PIs one at a time. `None` when the predictor reports
/// an unsatisfiable condition.
pub(crate) fn run_iterative(
    c: &AigCircuit,
    p: &dyn Predictor,
    pre: &[i8],
    sel: Selection,
    calls: &mut usize,
) -> Result<Option<(Assignment, Vec<usize>)>, PredictError> {
    assert_eq!(pre.len(), c.num_pis(), "one pre-assignment entry per PI");
    assert!(pre.iter().all(|v| (-1..=1).contains(v)), "pre-assignment entries must be -1, 0 or 1");
    let mut agn = pre.to_vec();
    let mut order = Vec::new();
    while agn.contains(&0) {
        *calls += 1;
        let theta = match p.predict_pis(c, &decision_mask(c, &agn)) {
            Ok(t) => t,
            Err(PredictError::Unsatisfiable) => return Ok(None),
            Err(e) => return Err(e),
        };
        let mut best: Option<(usize, f64)> = None;
        for (i, &t) in theta.iter().enumerate() {
            if agn[i] != 0 {
                continue;
            }
            let conf = (t - 0.5).abs();
            let better = match (best, sel) {
                (None, _) => true,
                (Some((_, b)), Selection::MostCertain) => conf > b,
                (Some((_, b)), Selection::MostUncertain) => conf < b,
            };
            if better {
                best = Some((i, conf));
            }
        }
        let idx = best.expect("an undetermined PI").0;
        agn[idx] = if theta[idx] < 0.5 { -1 } else { 1 };
        order.push(idx);
    }
    Ok(Some((Assignment::new(agn.iter().map(|&a| a == 1).collect()), order)))
}

/// Assigns every undetermined PI (0 in `pre`) by repeatedly fixing the most
/// confident one. Returns the full assignment and the order of decisions.
pub fn iterative_solve(c: &AigCircuit, predictor: &dyn Predictor, pre: &[i8]) -> Result<(Assignment, Vec<usize>), PredictError> {
    run_iterative(c, predictor, pre, Selection::MostCertain, &mut 0)?.ok_or(PredictError::Unsatisfiable)
}

pub fn verify(c: &AigCircuit, a: &Assignment) -> bool {
    assert_eq!(a.len(), c.num_pis(), "one value per PI");
    c.eval_po(a.values())
}

/// One initial sample, then up to I re-samples. Round r keeps the first r-1
/// decisions of the initial sample, flips the r-th and re-solves the rest.
pub fn solve_with_flipping(c: &AigCircuit, predictor: &dyn Predictor) -> Result<SolveResult, PredictError> {
    let n = c.num_pis();
    let mut calls = 0;
    let unknown = |rounds, calls| SolveResult {
        status: SolveStatus::Unknown,
        assignment: None,
        rounds_used: rounds,
        predictor_calls: calls,
    };
    let satisfied = |a, rounds, calls| SolveResult {
        status: SolveStatus::Satisfied,
        assignment: Some(a),
        rounds_used: rounds,
        predictor_calls: calls,
    };
    let Some((init, order)) = run_iterative(c, predictor, &vec![0; n], Selection::MostCertain, &mut calls)? else {
        return Ok(unknown(1, calls));
    };
    if verify(c, &init) {
        return Ok(satisfied(init, 1, calls));
    }
    let x = init.values();
    let lit = |v: bool| if v { 1 } else { -1 };
    for r in 0..n {
        let mut pre = vec![0i8; n];
        for &o in &order[..r] {
            pre[o] = lit(x[o]);
        }
        pre[order[r]] = lit(!x[order[r]]);
        if let Some((a, _)) = run_iterative(c, predictor, &pre, Selection::MostCertain, &mut calls)? {
            if verify(c, &a) {
                return Ok(satisfied(a, r + 2, calls));
            }
        }
    }
    Ok(unknown(n + 1, calls))
}
