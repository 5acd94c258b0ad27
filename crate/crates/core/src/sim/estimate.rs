use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::simulate_into;
use crate::circuit::{AigCircuit, CircuitError, Mask};

/// Largest PI count `exact_profile` will enumerate.
pub const MAX_EXACT_INPUTS: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub num_patterns: usize,
    pub seed: u64,
    pub min_accepted: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            num_patterns: 15_000,
            seed: 0,
            min_accepted: 100,
        }
    }
}

/// Identifies the random stream of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimKey {
    pub circuit: u64,
    pub record: u64,
}

impl SimKey {
    pub fn new(circuit: u64, record: u64) -> Self {
        Self { circuit, record }
    }

    pub(crate) fn rng(self, seed: u64, block: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.circuit.to_le_bytes());
        key[16..24].copy_from_slice(&self.record.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(block);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimProfile {
    pub theta: Vec<f64>,
    pub accepted: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("only {accepted} of the patterns satisfy the condition (need {required})")]
    InsufficientSamples { accepted: u64, required: usize },
    #[error("no assignment satisfies the condition")]
    Unsatisfiable,
    #[error("{0} inputs exceed the enumeration limit of {MAX_EXACT_INPUTS}")]
    TooManyInputs(usize),
    #[error(transparent)]
    Mask(#[from] CircuitError),
    #[error("dataset line {line}: {reason}")]
    Format { line: usize, reason: String },
}

/// Unconditional logic-1 frequencies over `cfg.num_patterns` uniform patterns.
pub fn estimate_probabilities(c: &AigCircuit, cfg: &SimConfig, key: SimKey) -> SimProfile {
    let mask = Mask::empty(c.len());
    let counts = conditional_counts(c, &mask, cfg, key);
    let total = counts.accepted.max(1) as f64;
    SimProfile {
        theta: counts.ones.iter().map(|&n| n as f64 / total).collect(),
        accepted: counts.accepted,
    }
}

/// Frequencies over the patterns that satisfy `mask`. Masked PIs are forced
/// to their value; a PO mask of 1 rejects patterns with PO = 0.
pub fn conditional_estimate(c: &AigCircuit, mask: &Mask, cfg: &SimConfig, key: SimKey) -> Result<SimProfile, SimError> {
    mask.validate(c)?;
    let counts = conditional_counts(c, mask, cfg, key);
    if counts.accepted < cfg.min_accepted as u64 {
        return Err(SimError::InsufficientSamples {
            accepted: counts.accepted,
            required: cfg.min_accepted,
        });
    }
    let total = counts.accepted as f64;
    Ok(SimProfile {
        theta: counts.ones.iter().map(|&n| n as f64 / total).collect(),
        accepted: counts.accepted,
    })
}

pub(crate) struct Counts {
    pub ones: Vec<u64>,
    pub accepted: u64,
    pub per_block: Vec<u64>,
}

pub(crate) fn num_blocks(cfg: &SimConfig) -> usize {
    cfg.num_patterns.div_ceil(64)
}

/// PI words of one block and the mask of lanes that are valid patterns.
pub(crate) fn block_inputs(c: &AigCircuit, mask: &Mask, cfg: &SimConfig, key: SimKey, block: usize) -> (Vec<u64>, u64) {
    let mut rng = key.rng(cfg.seed, block as u64);
    let words = (0..c.num_pis())
        .map(|i| {
            let w: u64 = rng.random();
            match mask.get(i) {
                1 => !0,
                -1 => 0,
                _ => w,
            }
        })
        .collect();
    let remaining = cfg.num_patterns - block * 64;
    let valid = if remaining >= 64 { !0 } else { (1u64 << remaining) - 1 };
    (words, valid)
}

pub(crate) fn conditional_counts(c: &AigCircuit, mask: &Mask, cfg: &SimConfig, key: SimKey) -> Counts {
    let need_po = mask.po_required(c);
    let n = c.len();
    let blocks: Vec<(Vec<u64>, u64)> = (0..num_blocks(cfg))
        .into_par_iter()
        .map_init(
            || vec![0u64; n],
            |vals, b| {
                let (words, valid) = block_inputs(c, mask, cfg, key, b);
                simulate_into(c, &words, vals);
                let accept = if need_po { valid & vals[c.po()] } else { valid };
                let ones = vals.iter().map(|v| (v & accept).count_ones() as u64).collect();
                (ones, accept.count_ones() as u64)
            },
        )
        .collect();
    let mut ones = vec![0u64; n];
    let mut per_block = Vec::with_capacity(blocks.len());
    for (o, a) in &blocks {
        for (acc, x) in ones.iter_mut().zip(o) {
            *acc += x;
        }
        per_block.push(*a);
    }
    Counts {
        ones,
        accepted: per_block.iter().sum(),
        per_block,
    }
}

/// Exact conditional probabilities by enumerating every assignment of the
/// unmasked PIs.
pub fn exact_profile(c: &AigCircuit, mask: &Mask) -> Result<SimProfile, SimError> {
    mask.validate(c)?;
    if c.num_pis() > MAX_EXACT_INPUTS {
        return Err(SimError::TooManyInputs(c.num_pis()));
    }
    let free: Vec<usize> = (0..c.num_pis()).filter(|&i| !mask.is_masked(i)).collect();
    let total: u64 = 1 << free.len();
    let need_po = mask.po_required(c);
    let n = c.len();
    let num_blocks = total.div_ceil(64);

    // Lanes enumerate the low six free inputs; the block index the rest.
    const LANE_PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let run = |range: std::ops::Range<u64>, vals: &mut Vec<u64>, ones: &mut Vec<u64>| -> u64 {
        let mut words = vec![0u64; c.num_pis()];
        let mut accepted = 0;
        for b in range {
            for (i, w) in words.iter_mut().enumerate() {
                *w = if mask.get(i) == 1 { !0 } else { 0 };
            }
            for (j, &pi) in free.iter().enumerate() {
                words[pi] = if j < 6 {
                    LANE_PATTERNS[j]
                } else if (b >> (j - 6)) & 1 == 1 {
                    !0
                } else {
                    0
                };
            }
            let valid = if total - b * 64 >= 64 { !0 } else { (1u64 << (total - b * 64)) - 1 };
            simulate_into(c, &words, vals);
            let accept = if need_po { valid & vals[c.po()] } else { valid };
            for (o, v) in ones.iter_mut().zip(vals.iter()) {
                *o += (v & accept).count_ones() as u64;
            }
            accepted += accept.count_ones() as u64;
        }
        accepted
    };

    const CHUNK: u64 = 1024;
    let parts: Vec<(Vec<u64>, u64)> = (0..num_blocks.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| {
            let mut vals = vec![0u64; n];
            let mut ones = vec![0u64; n];
            let range = k * CHUNK..((k + 1) * CHUNK).min(num_blocks);
            let acc = run(range, &mut vals, &mut ones);
            (ones, acc)
        })
        .collect();
    let mut ones = vec![0u64; n];
    let mut accepted = 0;
    for (o, a) in parts {
        for (x, y) in ones.iter_mut().zip(o) {
            *x += y;
        }
        accepted += a;
    }
    if accepted == 0 {
        return Err(SimError::Unsatisfiable);
    }
    Ok(SimProfile {
        theta: ones.iter().map(|&k| k as f64 / accepted as f64).collect(),
        accepted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub samples: usize,
    pub mean_abs_error: f64,
}

/// Mean over circuits and nodes of |simulated - exact| unconditional
/// probability, for each sample count.
pub fn simulation_error_study(circuits: &[AigCircuit], sample_counts: &[usize], seed: u64) -> Result<Vec<ErrorRow>, SimError> {
    let exact: Vec<SimProfile> = circuits
        .par_iter()
        .map(|c| exact_profile(c, &Mask::empty(c.len())))
        .collect::<Result<_, _>>()?;
    Ok(sample_counts
        .iter()
        .map(|&n| {
            let cfg = SimConfig {
                num_patterns: n,
                seed,
                min_accepted: 1,
            };
            let (sum, count) = circuits
                .iter()
                .zip(&exact)
                .enumerate()
                .map(|(i, (c, ex))| {
                    let est = estimate_probabilities(c, &cfg, SimKey::new(i as u64, 0));
                    let s: f64 = est.theta.iter().zip(&ex.theta).map(|(a, b)| (a - b).abs()).sum();
                    (s, ex.theta.len())
                })
                .fold((0.0, 0usize), |(s, k), (a, b)| (s + a, k + b));
            ErrorRow {
                samples: n,
                mean_abs_error: sum / count.max(1) as f64,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::samples::random_circuit;
    use crate::circuit::{cnf_to_aig, parse_dimacs, AigBuilder};

    fn cfg() -> SimConfig {
        SimConfig {
            seed: 42,
            ..Default::default()
        }
    }

    fn nand() -> (AigCircuit, usize, usize) {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let n = b.not(g);
        (b.finish(n), g, n)
    }

    #[test]
    fn unconditional_frequencies() {
        let (c, g, n) = nand();
        let p = estimate_probabilities(&c, &cfg(), SimKey::default());
        assert_eq!(p.accepted, 15_000);
        assert!((p.theta[0] - 0.5).abs() < 0.02);
        assert!((p.theta[g] - 0.25).abs() < 0.02);
        assert!((p.theta[n] - 0.75).abs() < 0.02);
    }

    #[test]
    fn conditioning_on_the_output() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let and = b.finish(g);
        let prof = conditional_estimate(&and, &Mask::po_only(&and), &cfg(), SimKey::default()).unwrap();
        assert_eq!(prof.theta[0], 1.0);
        assert_eq!(prof.theta[1], 1.0);

        let (c, _, n) = nand();
        let prof = conditional_estimate(&c, &Mask::po_only(&c), &cfg(), SimKey::default()).unwrap();
        assert!((prof.theta[0] - 1.0 / 3.0).abs() < 0.03);
        assert!((prof.theta[1] - 1.0 / 3.0).abs() < 0.03);
        assert_eq!(prof.theta[n], 1.0);
    }

    #[test]
    fn contradiction_has_too_few_samples() {
        let f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        let c = cnf_to_aig(&f);
        let err = conditional_estimate(&c, &Mask::po_only(&c), &cfg(), SimKey::default()).unwrap_err();
        assert_eq!(err, SimError::InsufficientSamples { accepted: 0, required: 100 });
        assert_eq!(exact_profile(&c, &Mask::po_only(&c)).unwrap_err(), SimError::Unsatisfiable);
    }

    #[test]
    fn empty_mask_matches_unconditional() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = random_circuit(&mut rng, 8, 30);
        let key = SimKey::new(3, 4);
        let a = estimate_probabilities(&c, &cfg(), key);
        let b = conditional_estimate(&c, &Mask::empty(c.len()), &cfg(), key).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, estimate_probabilities(&c, &cfg(), key));
    }

    #[test]
    fn forced_inputs_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let c = random_circuit(&mut rng, 6, 25);
        let mut m = Mask::empty(c.len());
        m.set(1, 1);
        m.set(3, -1);
        let p = conditional_estimate(&c, &m, &cfg(), SimKey::default()).unwrap();
        assert_eq!(p.theta[1], 1.0);
        assert_eq!(p.theta[3], 0.0);
    }

    #[test]
    fn exact_profiles() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let c = b.finish(g);
        assert_eq!(exact_profile(&c, &Mask::empty(c.len())).unwrap().theta[g], 0.25);
        let mut m = Mask::po_only(&c);
        m.set(0, 1);
        assert_eq!(exact_profile(&c, &m).unwrap().theta[1], 1.0);

        // phi = (!x1 | x2)(!x2 | !x3)(x1 | x3): satisfied by (0,0,1) and (1,1,0).
        let f = parse_dimacs("p cnf 3 3\n-1 2 0\n-2 -3 0\n1 3 0\n").unwrap();
        let c = cnf_to_aig(&f);
        let prof = exact_profile(&c, &Mask::po_only(&c)).unwrap();
        assert_eq!(prof.accepted, 2);
        assert_eq!(&prof.theta[..3], &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn exact_enumeration_beyond_one_word() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let c = random_circuit(&mut rng, 10, 40);
        let prof = exact_profile(&c, &Mask::empty(c.len())).unwrap();
        let mut ones = vec![0u64; c.len()];
        for m in 0..1u64 << 10 {
            let a: Vec<bool> = (0..10).map(|i| (m >> i) & 1 == 1).collect();
            for (o, v) in ones.iter_mut().zip(c.evaluate(&a)) {
                *o += v as u64;
            }
        }
        for (t, o) in prof.theta.iter().zip(ones) {
            assert_eq!(*t, o as f64 / 1024.0);
        }
    }

    #[test]
    fn estimates_within_binomial_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut checked = 0;
        let mut i = 0;
        let (mut total, mut exceed) = (0, 0);
        while checked < 50 {
            i += 1;
            let c = random_circuit(&mut rng, 6, 20);
            let mask = Mask::po_only(&c);
            let Ok(exact) = exact_profile(&c, &mask) else { continue };
            let Ok(est) = conditional_estimate(&c, &mask, &cfg(), SimKey::new(i, 0)) else { continue };
            let bound = 3.0 * (0.25 / est.accepted as f64).sqrt();
            for (a, b) in est.theta.iter().zip(&exact.theta) {
                total += 1;
                if (a - b).abs() > bound {
                    exceed += 1;
                }
            }
            checked += 1;
        }
        // A 3-sigma band is left 0.27% of the time per node; allow for that
        // across ~1400 comparisons without letting a systematic bias through.
        assert!(exceed * 100 <= total, "{exceed} of {total} outside 3 sigma");
    }

    #[test]
    fn error_shrinks_with_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let circuits: Vec<_> = (0..10).map(|_| random_circuit(&mut rng, 8, 30)).collect();
        let rows = simulation_error_study(&circuits, &[100, 1000, 10_000], 1).unwrap();
        assert!(rows[0].mean_abs_error > rows[1].mean_abs_error);
        assert!(rows[1].mean_abs_error > rows[2].mean_abs_error);
    }
}
