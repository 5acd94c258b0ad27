//! The sampling solver with exact conditional probabilities standing in for
//! the model, next to a random predictor and the single-sample schemes.
//!
//! ```text
//! cargo run --release --example oracle_solver -- [count] [n]
//! ```

use aigsat::circuit::{cnf_to_aig, AigCircuit};
use aigsat::datagen::gen_sr;
use aigsat::solver::{evaluate_suite, scheme_accuracy, ExactPredictor, Predictor, RandomPredictor, Scheme};
use aigsat::synth::{optimize, RewriteLibrary};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8);
    let lib = RewriteLibrary::bundled();
    let instances = (0..count)
        .map(|i| Ok((format!("sr{n}-{i}"), optimize(&cnf_to_aig(&gen_sr(n, i)?.sat), lib).0)))
        .collect::<anyhow::Result<Vec<(String, AigCircuit)>>>()?;
    let circuits: Vec<AigCircuit> = instances.iter().map(|(_, c)| c.clone()).collect();

    let predictors: [(&str, &dyn Predictor); 2] = [("exact", &ExactPredictor), ("random", &RandomPredictor { seed: 1 })];
    for (name, p) in predictors {
        let (_, m) = evaluate_suite(&instances, p)?;
        println!(
            "{name:7} solved {:3}/{}  mean samples {:.2}  histogram {:?}",
            m.solved, m.instances, m.mean_rounds, m.rounds_histogram
        );
        for s in Scheme::ALL {
            println!("        {:15} {:.2}", s.name(), scheme_accuracy(&circuits, p, s)?);
        }
    }
    Ok(())
}
