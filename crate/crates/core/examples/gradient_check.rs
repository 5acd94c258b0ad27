//! Analytic gradients of the full model against central differences on a
//! six-node circuit.
//!
//! ```text
//! cargo run --release --example gradient_check -- [seed]
//! ```

use aigsat::model::{grad_check, gradcheck_circuit, ModelParams, HIDDEN};

fn main() -> anyhow::Result<()> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(17);
    let (c, m, labels) = gradcheck_circuit();
    let params = ModelParams::init(HIDDEN, seed);
    println!("{} parameters", params.num_params());
    let report = grad_check(&params, &c, &m, &labels, seed, 1e-4)?;
    for (name, dev) in &report.groups {
        println!("{name:24} {dev:.2e}");
    }
    println!("steps shrunk at kinks: {}", report.reduced_steps);
    println!("max relative deviation: {:.2e}", report.max_rel);
    Ok(())
}
