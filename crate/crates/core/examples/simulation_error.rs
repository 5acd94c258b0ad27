//! Mean absolute error of sampled node probabilities against exact
//! enumeration for growing pattern counts, then one PO-conditioned profile.
//!
//! ```text
//! cargo run --release --example simulation_error
//! ```

use aigsat::circuit::samples::random_circuit;
use aigsat::circuit::{cnf_to_aig, Mask};
use aigsat::datagen::gen_sr;
use aigsat::sim::{conditional_estimate, exact_profile, simulation_error_study, SimConfig, SimKey};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let circuits: Vec<_> = (0..20).map(|i| random_circuit(&mut rng, 8 + i % 9, 60)).collect();
    for row in simulation_error_study(&circuits, &[100, 1_000, 10_000], 5)? {
        println!("N = {:6}  mean |error| = {:.5}", row.samples, row.mean_abs_error);
    }

    let c = cnf_to_aig(&gen_sr(6, 3)?.sat);
    let m = Mask::po_only(&c);
    let cfg = SimConfig {
        num_patterns: 15_000,
        seed: 9,
        ..Default::default()
    };
    let est = conditional_estimate(&c, &m, &cfg, SimKey::default())?;
    let exact = exact_profile(&c, &m)?;
    println!("SR(6) given PO = 1: {} of {} patterns accepted", est.accepted, cfg.num_patterns);
    for i in 0..c.num_pis() {
        println!("  x{}  sampled {:.3}  exact {:.3}", i + 1, est.theta[i], exact.theta[i]);
    }
    Ok(())
}
