//! Bit-parallel logic simulation and probability labels.
//!
//! Patterns are packed 64 to a `u64` word. Random patterns come from a
//! ChaCha8 generator keyed by `(seed, circuit, record)`, with one stream per
//! 64-pattern block, so results do not depend on the number of worker threads.

mod dataset;
mod estimate;

pub use dataset::{
    build_dataset, read_dataset, write_dataset, DatasetRecord, DatasetStats, MaskPolicy, RecordLine,
};
pub use estimate::{
    conditional_estimate, estimate_probabilities, exact_profile, simulation_error_study, ErrorRow, SimConfig,
    SimError, SimKey, SimProfile, MAX_EXACT_INPUTS,
};

use crate::circuit::{AigCircuit, Gate};

/// Evaluates every node on 64 patterns at once. `pi_words[i]` drives PI `i`.
pub fn simulate_block(c: &AigCircuit, pi_words: &[u64]) -> Vec<u64> {
    let mut vals = vec![0u64; c.len()];
    simulate_into(c, pi_words, &mut vals);
    vals
}

pub(crate) fn simulate_into(c: &AigCircuit, pi_words: &[u64], vals: &mut [u64]) {
    for (id, gate) in c.nodes().iter().enumerate() {
        vals[id] = match *gate {
            Gate::Const0 => 0,
            Gate::Pi => pi_words[id],
            Gate::And(a, b) => vals[a] & vals[b],
            Gate::Not(a) => !vals[a],
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::samples::random_circuit;
    use crate::circuit::AigBuilder;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn word_semantics() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let c = b.finish(g);
        assert_eq!(simulate_block(&c, &[!0, !0])[g], !0);
        let w = 0x0123_4567_89ab_cdefu64;
        assert_eq!(simulate_block(&c, &[w, !w])[g], 0);
    }

    #[test]
    fn lanes_match_scalar_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let c = random_circuit(&mut rng, 7, 40);
            let words: Vec<u64> = (0..c.num_pis()).map(|_| rng.random()).collect();
            let vals = simulate_block(&c, &words);
            for lane in 0..64 {
                let a: Vec<bool> = words.iter().map(|w| (w >> lane) & 1 == 1).collect();
                let scalar = c.evaluate(&a);
                for (id, &v) in scalar.iter().enumerate() {
                    assert_eq!((vals[id] >> lane) & 1 == 1, v);
                }
            }
        }
    }
}
