use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::predictor::{PredictError, Predictor};
use super::solve::{decision_mask, run_iterative, solve_with_flipping, verify, Selection, SolveResult, SolveStatus};
use crate::circuit::{AigCircuit, Assignment};

/// One line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub instance: String,
    pub status: SolveStatus,
    /// PI values as a 0/1 string, x1 first.
    pub assignment: Option<String>,
    pub rounds: usize,
    pub predictor_calls: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteMetrics {
    pub instances: usize,
    pub solved: usize,
    pub problems_solved: f64,
    /// Over solved instances.
    pub mean_rounds: f64,
    /// `rounds_histogram[r - 1]` solved instances needed `r` samples.
    pub rounds_histogram: Vec<usize>,
}

impl SuiteMetrics {
    pub fn from_results(results: &[InstanceResult]) -> Self {
        let solved: Vec<usize> = results.iter().filter(|r| r.status == SolveStatus::Satisfied).map(|r| r.rounds).collect();
        let mut hist = vec![0; solved.iter().copied().max().unwrap_or(0)];
        for &r in &solved {
            hist[r - 1] += 1;
        }
        let n = results.len();
        SuiteMetrics {
            instances: n,
            solved: solved.len(),
            problems_solved: if n == 0 { 0.0 } else { solved.len() as f64 / n as f64 },
            mean_rounds: if solved.is_empty() {
                0.0
            } else {
                solved.iter().sum::<usize>() as f64 / solved.len() as f64
            },
            rounds_histogram: hist,
        }
    }

    /// `metric,value` rows; histogram bins as `rounds_<r>`.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "metric,value\ninstances,{}\nsolved,{}\nproblems_solved,{:.4}\nmean_rounds,{:.4}\n",
            self.instances, self.solved, self.problems_solved, self.mean_rounds
        );
        for (i, n) in self.rounds_histogram.iter().enumerate() {
            out.push_str(&format!("rounds_{},{n}\n", i + 1));
        }
        out
    }
}

pub fn bit_string(a: &Assignment) -> String {
    a.values().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn run_suite(
    instances: &[(String, AigCircuit)],
    solve: impl Fn(&AigCircuit) -> Result<SolveResult, PredictError> + Sync,
) -> Result<(Vec<InstanceResult>, SuiteMetrics), PredictError> {
    let results = instances
        .par_iter()
        .map(|(name, c)| {
            let start = Instant::now();
            let r = solve(c)?;
            Ok(InstanceResult {
                instance: name.clone(),
                status: r.status,
                assignment: r.assignment.as_ref().map(bit_string),
                rounds: r.rounds_used,
                predictor_calls: r.predictor_calls,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect::<Result<Vec<_>, PredictError>>()?;
    let metrics = SuiteMetrics::from_results(&results);
    Ok((results, metrics))
}

/// Solves every instance with flipping, in parallel. Only verified
/// assignments count as solved.
pub fn evaluate_suite(instances: &[(String, AigCircuit)], predictor: &dyn Predictor) -> Result<(Vec<InstanceResult>, SuiteMetrics), PredictError> {
    run_suite(instances, |c| solve_with_flipping(c, predictor))
}

/// Like [`evaluate_suite`] with a single sample per instance.
pub fn evaluate_scheme(
    instances: &[(String, AigCircuit)],
    predictor: &dyn Predictor,
    scheme: Scheme,
) -> Result<(Vec<InstanceResult>, SuiteMetrics), PredictError> {
    run_suite(instances, |c| solve_with_scheme(c, predictor, scheme))
}

/// Single-sample strategies used for comparison with the full solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Scheme {
    /// One query with only the PO masked, every PI thresholded at 0.5.
    OneShot,
    /// Iterative, fixing the least confident PI first, no flipping.
    MostUncertain,
    /// Iterative, fixing the most confident PI first, no flipping.
    MostCertain,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::OneShot, Scheme::MostUncertain, Scheme::MostCertain];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::OneShot => "one-shot",
            Scheme::MostUncertain => "most-uncertain",
            Scheme::MostCertain => "most-certain",
        }
    }
}

fn scheme_sample(c: &AigCircuit, predictor: &dyn Predictor, scheme: Scheme, calls: &mut usize) -> Result<Option<Assignment>, PredictError> {
    let n = c.num_pis();
    let sel = match scheme {
        Scheme::OneShot => {
            if n == 0 {
                return Ok(Some(Assignment::new(Vec::new())));
            }
            *calls += 1;
            return match predictor.predict_pis(c, &decision_mask(c, &vec![0; n])) {
                Ok(t) => Ok(Some(Assignment::new(t.iter().map(|&v| v >= 0.5).collect()))),
                Err(PredictError::Unsatisfiable) => Ok(None),
                Err(e) => Err(e),
            };
        }
        Scheme::MostUncertain => Selection::MostUncertain,
        Scheme::MostCertain => Selection::MostCertain,
    };
    Ok(run_iterative(c, predictor, &vec![0; n], sel, calls)?.map(|r| r.0))
}

/// The scheme's single sampled assignment, unverified; `None` when the
/// predictor reports the PO condition unsatisfiable.
pub fn sample_scheme(c: &AigCircuit, predictor: &dyn Predictor, scheme: Scheme) -> Result<Option<Assignment>, PredictError> {
    scheme_sample(c, predictor, scheme, &mut 0)
}

/// One sample with `scheme`, verified.
pub fn solve_with_scheme(c: &AigCircuit, predictor: &dyn Predictor, scheme: Scheme) -> Result<SolveResult, PredictError> {
    let mut calls = 0;
    let a = scheme_sample(c, predictor, scheme, &mut calls)?.filter(|a| verify(c, a));
    Ok(SolveResult {
        status: if a.is_some() { SolveStatus::Satisfied } else { SolveStatus::Unknown },
        assignment: a,
        rounds_used: 1,
        predictor_calls: calls,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineAssignments {
    pub one_shot: Option<Assignment>,
    pub most_uncertain: Option<Assignment>,
    pub most_certain: Option<Assignment>,
}

pub fn baseline_schemes(c: &AigCircuit, predictor: &dyn Predictor) -> Result<BaselineAssignments, PredictError> {
    Ok(BaselineAssignments {
        one_shot: sample_scheme(c, predictor, Scheme::OneShot)?,
        most_uncertain: sample_scheme(c, predictor, Scheme::MostUncertain)?,
        most_certain: sample_scheme(c, predictor, Scheme::MostCertain)?,
    })
}

/// Fraction of instances whose single sample verifies.
pub fn scheme_accuracy(instances: &[AigCircuit], predictor: &dyn Predictor, scheme: Scheme) -> Result<f64, PredictError> {
    let solved = instances
        .par_iter()
        .map(|c| Ok(solve_with_scheme(c, predictor, scheme)?.status == SolveStatus::Satisfied))
        .collect::<Result<Vec<bool>, PredictError>>()?;
    if solved.is_empty() {
        return Ok(0.0);
    }
    Ok(solved.iter().filter(|&&s| s).count() as f64 / solved.len() as f64)
}
