use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Bernoulli, Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dpll::dpll_solve;
use super::item_rng;
use crate::circuit::{Clause, CnfFormula, Literal};

/// Clause length `k = 1 + Bernoulli(p_two) + Geometric(p_geo)`, where the
/// geometric term counts trials (support 1, 2, ...), capped at `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrParams {
    pub p_two: f64,
    pub p_geo: f64,
}

impl Default for SrParams {
    fn default() -> Self {
        Self { p_two: 0.7, p_geo: 0.4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrPair {
    pub sat: CnfFormula,
    pub unsat: CnfFormula,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SrError {
    #[error("SR(n) needs n >= 3, got {0}")]
    TooFewVariables(usize),
}

pub fn sample_clause<R: Rng + ?Sized>(n: usize, params: &SrParams, rng: &mut R) -> Clause {
    let two = Bernoulli::new(params.p_two).expect("probability in [0, 1]");
    let geo = Geometric::new(params.p_geo).expect("probability in (0, 1]");
    let k = (1 + two.sample(rng) as u64 + geo.sample(rng) + 1).min(n as u64) as usize;
    sample(rng, n, k)
        .into_iter()
        .map(|v| Literal::new(v as u32 + 1, rng.random_bool(0.5)))
        .collect()
}

/// Adds random clauses until the formula becomes unsatisfiable; flipping the
/// first literal of the final clause gives the satisfiable twin.
pub fn gen_sr_with<R: Rng + ?Sized>(n: usize, params: &SrParams, rng: &mut R) -> Result<SrPair, SrError> {
    if n < 3 {
        return Err(SrError::TooFewVariables(n));
    }
    let mut f = CnfFormula::new(n);
    loop {
        f.add_clause(sample_clause(n, params, rng));
        if !dpll_solve(&f).is_sat() {
            break;
        }
    }
    let unsat = f.clone();
    let last = f.clauses_mut().last_mut().unwrap();
    last[0] = last[0].negate();
    debug_assert!(dpll_solve(&f).is_sat());
    Ok(SrPair { sat: f, unsat })
}

pub fn gen_sr(n: usize, seed: u64) -> Result<SrPair, SrError> {
    gen_sr_with(n, &SrParams::default(), &mut item_rng(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_tagged_correctly() {
        for seed in 0..40 {
            let n = 3 + (seed as usize % 8);
            let p = gen_sr(n, seed).unwrap();
            assert!(dpll_solve(&p.sat).is_sat());
            assert!(!dpll_solve(&p.unsat).is_sat());
            assert_eq!(p.sat.num_clauses(), p.unsat.num_clauses());
            let diffs: usize = p
                .sat
                .clauses()
                .iter()
                .zip(p.unsat.clauses())
                .map(|(a, b)| a.iter().zip(b).filter(|(x, y)| x != y).count())
                .sum();
            assert_eq!(diffs, 1);
            let (a, b) = (p.sat.clauses().last().unwrap(), p.unsat.clauses().last().unwrap());
            assert_eq!(a[0], b[0].negate());
        }
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert_eq!(gen_sr(2, 0), Err(SrError::TooFewVariables(2)));
    }

    #[test]
    fn deterministic_under_seed() {
        assert_eq!(gen_sr(8, 5), gen_sr(8, 5));
        assert_ne!(gen_sr(8, 5), gen_sr(8, 6));
    }

    /// E[min(1 + B + G, n)] with B ~ Bernoulli(p), G ~ Geometric(q) on {1, 2, ...}.
    fn capped_mean(n: usize, p: f64, q: f64) -> f64 {
        let mut mean = 0.0;
        for b in 0..=1 {
            let pb = if b == 1 { p } else { 1.0 - p };
            for g in 1..400 {
                let pg = (1.0 - q).powi(g as i32 - 1) * q;
                mean += pb * pg * ((1 + b + g).min(n) as f64);
            }
        }
        mean
    }

    #[test]
    fn clause_lengths_follow_the_distribution() {
        let params = SrParams::default();
        assert!((capped_mean(1000, 0.7, 0.4) - 4.2).abs() < 1e-9);
        let mut rng = item_rng(1, 0);
        let samples = 50_000;
        let total: usize = (0..samples).map(|_| sample_clause(10, &params, &mut rng).len()).sum();
        let mean = total as f64 / samples as f64;
        assert!((mean - capped_mean(10, 0.7, 0.4)).abs() < 0.03, "{mean}");

        // Clause lengths inside SR(10) pairs.
        let mut lengths = Vec::new();
        for seed in 0..200 {
            let p = gen_sr(10, seed).unwrap();
            lengths.extend(p.unsat.clauses().iter().map(|c| c.len()));
        }
        let mean = lengths.iter().sum::<usize>() as f64 / lengths.len() as f64;
        assert!((mean - capped_mean(10, 0.7, 0.4)).abs() < 0.15, "{mean}");
    }
}
